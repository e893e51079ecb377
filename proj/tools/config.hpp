#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbnoise/bath_kernel.hpp"
#include "sbnoise/correlation.hpp"
#include "sbnoise/errors.hpp"
#include "sbnoise/fock_space.hpp"

namespace sbnoise::cli {

// Problem with the configuration file or flags; the message names the line or [section] key.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct Units {
    std::string time_unit = "natural";  // natural, s, ms, us, ns, ps, fs
    std::optional<double> temperature_kelvin;
};

struct CorrJob {
    std::vector<double> times{10.0, 100.0};
    Channel channel = Channel::DephasingZ;
    RegimeThresholds thresholds{};
    std::vector<double> separations;  // optional pair-kernel grid
};

struct AmpsJob {
    double time = 100.0;
    Channel channel = Channel::DephasingZ;
    std::vector<std::vector<std::size_t>> patterns{{0, 1}};
    double delta = 0.1;
};

struct ThresholdJob {
    double p_th = 1e-3;
    std::vector<double> p1{1e-5, 1e-4};
    std::vector<std::uint64_t> n{1, 2, 4, 8};
};

struct DfsJob {
    double time = 100.0;
    Channel channel = Channel::DephasingZ;
    std::string states_file;          // JSON list, resolved relative to the config file
    std::vector<std::string> states;  // signed bitstring sums such as "01-10"
    std::vector<double> lambdas{0.0, 0.5, 1.0};
};

struct OracleSystem {
    FockSystem system;
    double time = 1.0;
};

struct OracleJob {
    std::vector<std::string> jobs{"dephasing", "canonical", "dfs"};
    OracleSystem dephasing;
    OracleSystem canonical;
    double canonical_base_coupling = 0.002;
    std::vector<double> canonical_factors{1.0, 2.0, 4.0, 8.0};
    OracleSystem dfs;
    std::vector<std::string> dfs_states{"01-10"};
};

struct RunConfig {
    std::string source_dir = ".";
    Units units;
    BathSpec bath;
    QubitLayout layout;
    KernelOptions kernel;
    std::string output_dir = "out";
    std::string format = "csv";
    std::size_t threads = 1;
    std::uint64_t seed = 20240917;
    std::size_t monte_carlo_samples = 10'000'000;
    CorrJob corr;
    AmpsJob amps;
    ThresholdJob threshold;
    DfsJob dfs;
    OracleJob oracle;
};

RunConfig default_config();

// Parses an INI file; keys not present keep their defaults.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source_dir = ".");

struct Overrides {
    std::optional<std::string> output_dir;
    std::optional<std::string> format;
    std::optional<std::size_t> threads;
    std::optional<double> tolerance_scale;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

// Fully resolved configuration, defaults applied.
nlohmann::json to_json(const RunConfig& cfg);

// "01-10+11" -> normalized signed superposition of the listed bitstrings.
std::pair<std::vector<std::string>, std::vector<std::complex<double>>> parse_signed_state(const std::string& text);

}  // namespace sbnoise::cli
