#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sbnoise/correlation.hpp"

namespace sbnoise {

constexpr std::size_t kMaxPatternOrder = 8;

// Multi-qubit error W_1 ... W_n acting on distinct qubits through one channel.
struct ErrorPattern {
    std::vector<std::size_t> qubits;
    Channel channel = Channel::DephasingZ;

    std::size_t order() const { return qubits.size(); }
    void validate(std::size_t register_size, std::size_t max_order = kMaxPatternOrder) const;
};

// (2n-1)!! = (2n)! / (2^n n!), the number of perfect matchings of 2n slots.
std::uint64_t matching_count(std::size_t n);

// sqrt(2) (2n/e)^n, the large-n form of matching_count.
double stirling_matching_count(std::size_t n);

struct MomentOptions {
    std::size_t threads = 1;
    std::size_t max_order = kMaxPatternOrder;
    // Take each contraction as <x_b x_a> instead of <x_a x_b> (a < b in operator order).
    bool reverse_ordering = false;
};

struct MomentValue {
    std::complex<double> value;
    std::uint64_t matchings = 0;
};

// A_n^2 = <phi_1^dag phi_1 ... phi_n^dag phi_n>, summed over all perfect
// matchings of the 2n operators. With phi^dag = -phi every matching term is a
// product of n entries of C (which stores <phi^dag phi>).
MomentValue gaussian_moment_full(const ContractionMatrix& c, const ErrorPattern& pattern,
                                 const MomentOptions& opts = {});

double gaussian_moment(const ContractionMatrix& c, const ErrorPattern& pattern, const MomentOptions& opts = {});

struct AmplitudeReport {
    ErrorPattern pattern;
    double amplitude_sq = 0.0;          // A_n^2
    double independent_product = 0.0;   // prod_i A_1(j_i)^2
    double enhancement = 0.0;           // A_n^2 / prod_i A_1^2
    std::uint64_t matchings = 0;
    bool violates_independence = false;  // enhancement outside [1 - delta, 1 + delta]
};

struct DeviationOptions {
    double delta = 0.1;
    MomentOptions moment{};
};

std::vector<AmplitudeReport> independence_deviation(const ContractionMatrix& c,
                                                    const std::vector<ErrorPattern>& patterns,
                                                    const DeviationOptions& opts = {});

}  // namespace sbnoise
