#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sbnoise::acceptance {

struct SuiteOptions {
    std::uint64_t seed = 20240917;
    std::size_t threads = 1;
    std::size_t monte_carlo_samples = 10'000'000;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Criterion {
    int id;
    std::string name;
    CriterionResult (*run)(const SuiteOptions&);
};

const std::vector<Criterion>& criteria();

// Runs one criterion; exceptions become a failed result carrying the message.
CriterionResult run_criterion(int id, const SuiteOptions& opts);

// Empty `ids` runs every criterion in order.
std::vector<CriterionResult> run_suite(const SuiteOptions& opts, const std::vector<int>& ids = {});

// "PASS  [3] name: detail (1.2 s)"
std::string format_line(const CriterionResult& r);

}  // namespace sbnoise::acceptance
