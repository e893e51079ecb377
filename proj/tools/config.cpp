#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sbnoise/dfs.hpp"
#include "sbnoise/serialization.hpp"

namespace sbnoise::cli {

namespace {

namespace pt = boost::property_tree;
using nlohmann::json;

constexpr double kBoltzmannOverHbar = 1.380649e-23 / 1.054571817e-34;  // 1 / (K s)

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"units", {"time_unit"}},
        {"bath",
         {"coupling_strength", "spectral_exponent", "cutoff_frequency", "sound_speed", "temperature",
          "temperature_kelvin"}},
        {"layout", {"positions", "splitting"}},
        {"tolerances", {"abs_tol", "rel_tol", "max_intervals", "upper_cutoff"}},
        {"output", {"dir", "format"}},
        {"run", {"threads", "seed", "monte_carlo_samples"}},
        {"corr", {"times", "channel", "theta_independent", "theta_correlated", "separations"}},
        {"amps", {"time", "channel", "patterns", "delta"}},
        {"threshold", {"p_th", "p1", "n"}},
        {"dfs", {"time", "channel", "states_file", "states", "lambdas"}},
        {"oracle", {"jobs"}},
        {"oracle_dephasing",
         {"positions", "wavevectors", "sound_speed", "coupling", "truncation", "temperature", "time"}},
        {"oracle_canonical",
         {"positions", "wavevectors", "sound_speed", "splitting", "truncation", "time", "base_coupling", "factors"}},
        {"oracle_dfs",
         {"positions", "wavevectors", "sound_speed", "coupling", "truncation", "temperature", "time", "states"}},
    };
    return keys;
}

std::string where(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
}

std::string trim(std::string s) {
    boost::algorithm::trim(s);
    return s;
}

double to_number(const std::string& text, const std::string& w) {
    const auto s = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw ConfigError(w + ": '" + s + "' is not a finite number");
    }
    return v;
}

std::uint64_t to_count(const std::string& text, const std::string& w) {
    const double v = to_number(text, w);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) {
        throw ConfigError(w + ": '" + trim(text) + "' is not a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_list(const std::string& text, const char* separators) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(separators));
    std::vector<std::string> out;
    for (auto& p : parts) {
        auto t = trim(p);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<double> to_numbers(const std::string& text, const std::string& w) {
    std::vector<double> out;
    for (const auto& p : split_list(text, ",")) out.push_back(to_number(p, w));
    if (out.empty()) throw ConfigError(w + ": list must not be empty");
    return out;
}

std::vector<Vec3> to_vectors(const std::string& text, const std::string& w) {
    std::vector<Vec3> out;
    for (const auto& row : split_list(text, ";")) {
        const auto parts = split_list(row, " ,\t");
        if (parts.size() != 3) throw ConfigError(w + ": '" + row + "' must have three components");
        out.emplace_back(to_number(parts[0], w), to_number(parts[1], w), to_number(parts[2], w));
    }
    if (out.empty()) throw ConfigError(w + ": list must not be empty");
    return out;
}

Channel to_channel(const std::string& text, const std::string& w) {
    try {
        return parse_channel(trim(text));
    } catch (const DomainError& e) {
        throw ConfigError(w + ": " + e.what());
    }
}

double seconds_per_unit(const std::string& unit) {
    static const std::map<std::string, double> table{{"s", 1.0},    {"ms", 1e-3},  {"us", 1e-6},
                                                     {"ns", 1e-9},  {"ps", 1e-12}, {"fs", 1e-15}};
    const auto it = table.find(unit);
    return it == table.end() ? 0.0 : it->second;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
        if (!s) return std::nullopt;
        const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return *v;
    }

    template <class T, class Parse>
    void read(const std::string& section, const std::string& key, T& target, Parse parse) const {
        if (auto v = get(section, key)) target = parse(*v, where(section, key));
    }

    void number(const std::string& section, const std::string& key, double& target) const {
        read(section, key, target, to_number);
    }

private:
    const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
    const auto& known = known_keys();
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) {
            if (body.empty()) throw ConfigError("key '" + section + "' appears outside any section");
            throw ConfigError("[" + section + "]: unknown section");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError(where(section, key) + ": unknown key");
        }
    }
}

void read_oracle_system(const Reader& r, const std::string& section, OracleSystem& o) {
    auto& s = o.system;
    r.read(section, "positions", s.positions, to_vectors);
    r.read(section, "wavevectors", s.wavevectors, to_vectors);
    r.number(section, "sound_speed", s.sound_speed);
    r.number(section, "coupling", s.coupling);
    r.number(section, "splitting", s.splitting);
    r.number(section, "temperature", s.temperature);
    r.number(section, "time", o.time);
    r.read(section, "truncation", s.truncation,
           [](const std::string& v, const std::string& w) { return static_cast<std::size_t>(to_count(v, w)); });
    try {
        s.validate();
    } catch (const Error& e) {
        throw ConfigError("[" + section + "]: " + e.what());
    }
    if (!(o.time >= 0.0)) throw ConfigError(where(section, "time") + ": must be >= 0");
}

void check_times(const std::vector<double>& times, const std::string& w) {
    for (double t : times) {
        if (!(t >= 0.0)) throw ConfigError(w + ": times must be >= 0");
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig c;
    c.layout.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
    c.layout.splitting = 1.0;

    auto& d = c.oracle.dephasing;
    d.system.positions = {Vec3(0, 0, 0), Vec3(0.6, 0.2, 0)};
    d.system.wavevectors = {Vec3(1.0, 0.3, 0.0), Vec3(-1.0, -0.3, 0.0)};
    d.system.coupling = 0.04;
    d.system.truncation = 12;
    d.time = 3.0;

    auto& k = c.oracle.canonical;
    k.system.positions = {Vec3(0, 0, 0), Vec3(0.7, 0, 0)};
    k.system.wavevectors = {Vec3(1.5, 0, 0)};
    k.system.splitting = 1.0;
    k.system.truncation = 6;
    k.time = 5.0;

    auto& f = c.oracle.dfs;
    f.system.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    f.system.wavevectors = {Vec3(1e-7, 0, 0)};
    f.system.sound_speed = 1e7;
    f.system.coupling = 0.5;
    f.system.truncation = 30;
    f.time = 4.0;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    try {
        return parse_config(buf.str(), dir.empty() ? "." : dir.string());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

RunConfig parse_config(const std::string& text, const std::string& source_dir) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    check_keys(tree);
    const Reader r(tree);
    RunConfig c = default_config();
    c.source_dir = source_dir;

    r.read("units", "time_unit", c.units.time_unit, [](const std::string& v, const std::string& w) {
        const auto u = trim(v);
        if (u != "natural" && seconds_per_unit(u) == 0.0) {
            throw ConfigError(w + ": '" + u + "' is not one of natural, s, ms, us, ns, ps, fs");
        }
        return u;
    });

    auto& b = c.bath;
    r.number("bath", "coupling_strength", b.coupling_strength);
    r.number("bath", "spectral_exponent", b.spectral_exponent);
    r.number("bath", "cutoff_frequency", b.cutoff_frequency);
    r.number("bath", "sound_speed", b.sound_speed);
    r.number("bath", "temperature", b.temperature);
    if (auto v = r.get("bath", "temperature_kelvin")) {
        const auto w = where("bath", "temperature_kelvin");
        if (r.get("bath", "temperature")) throw ConfigError(w + ": give either temperature or temperature_kelvin");
        const double kelvin = to_number(*v, w);
        const double tau = seconds_per_unit(c.units.time_unit);
        if (tau == 0.0) throw ConfigError(w + ": needs a physical [units] time_unit");
        c.units.temperature_kelvin = kelvin;
        b.temperature = kelvin * kBoltzmannOverHbar * tau;
    }
    try {
        b.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[bath]: ") + e.what());
    }

    r.read("layout", "positions", c.layout.positions, to_vectors);
    r.number("layout", "splitting", c.layout.splitting);
    try {
        c.layout.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[layout]: ") + e.what());
    }

    auto& q = c.kernel.quadrature;
    r.number("tolerances", "abs_tol", q.abs_tol);
    r.number("tolerances", "rel_tol", q.rel_tol);
    r.number("tolerances", "upper_cutoff", c.kernel.upper_cutoff);
    r.read("tolerances", "max_intervals", q.max_intervals,
           [](const std::string& v, const std::string& w) { return static_cast<std::size_t>(to_count(v, w)); });
    if (!(q.abs_tol >= 0.0) || !(q.rel_tol >= 0.0) || (q.abs_tol == 0.0 && q.rel_tol == 0.0)) {
        throw ConfigError("[tolerances]: abs_tol and rel_tol must be >= 0 and not both zero");
    }
    if (!(c.kernel.upper_cutoff > 0.0)) throw ConfigError(where("tolerances", "upper_cutoff") + ": must be > 0");

    r.read("output", "dir", c.output_dir, [](const std::string& v, const std::string&) { return trim(v); });
    r.read("output", "format", c.format, [](const std::string& v, const std::string& w) {
        const auto f = trim(v);
        if (f != "csv" && f != "json") throw ConfigError(w + ": must be csv or json");
        return f;
    });
    r.read("run", "threads", c.threads, [](const std::string& v, const std::string& w) {
        const auto n = to_count(v, w);
        if (n == 0) throw ConfigError(w + ": must be >= 1");
        return static_cast<std::size_t>(n);
    });
    r.read("run", "seed", c.seed, to_count);
    r.read("run", "monte_carlo_samples", c.monte_carlo_samples, [](const std::string& v, const std::string& w) {
        const auto n = to_count(v, w);
        if (n < 2) throw ConfigError(w + ": must be >= 2");
        return static_cast<std::size_t>(n);
    });

    r.read("corr", "times", c.corr.times, to_numbers);
    check_times(c.corr.times, where("corr", "times"));
    r.read("corr", "channel", c.corr.channel, to_channel);
    r.number("corr", "theta_independent", c.corr.thresholds.independent);
    r.number("corr", "theta_correlated", c.corr.thresholds.correlated);
    try {
        c.corr.thresholds.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[corr]: ") + e.what());
    }
    r.read("corr", "separations", c.corr.separations, to_numbers);
    for (double s : c.corr.separations) {
        if (!(s >= 0.0)) throw ConfigError(where("corr", "separations") + ": must be >= 0");
    }

    r.number("amps", "time", c.amps.time);
    check_times({c.amps.time}, where("amps", "time"));
    r.read("amps", "channel", c.amps.channel, to_channel);
    r.number("amps", "delta", c.amps.delta);
    if (!(c.amps.delta >= 0.0)) throw ConfigError(where("amps", "delta") + ": must be >= 0");
    r.read("amps", "patterns", c.amps.patterns, [](const std::string& v, const std::string& w) {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& row : split_list(v, ";")) {
            std::vector<std::size_t> p;
            for (const auto& q : split_list(row, " ,\t")) p.push_back(static_cast<std::size_t>(to_count(q, w)));
            out.push_back(std::move(p));
        }
        if (out.empty()) throw ConfigError(w + ": list must not be empty");
        return out;
    });
    for (const auto& p : c.amps.patterns) {
        try {
            ErrorPattern probe{p, c.amps.channel};
            probe.validate(c.layout.size());
        } catch (const Error& e) {
            throw ConfigError(where("amps", "patterns") + ": " + e.what());
        }
    }

    r.number("threshold", "p_th", c.threshold.p_th);
    r.read("threshold", "p1", c.threshold.p1, to_numbers);
    r.read("threshold", "n", c.threshold.n, [](const std::string& v, const std::string& w) {
        std::vector<std::uint64_t> out;
        for (const auto& p : split_list(v, ",")) {
            const auto n = to_count(p, w);
            if (n == 0) throw ConfigError(w + ": error weights must be >= 1");
            out.push_back(n);
        }
        if (out.empty()) throw ConfigError(w + ": list must not be empty");
        return out;
    });
    if (!(c.threshold.p_th > 0.0 && c.threshold.p_th < 1.0)) {
        throw ConfigError(where("threshold", "p_th") + ": must lie in (0, 1)");
    }
    for (double p : c.threshold.p1) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where("threshold", "p1") + ": must lie in [0, 1]");
    }

    r.number("dfs", "time", c.dfs.time);
    check_times({c.dfs.time}, where("dfs", "time"));
    r.read("dfs", "channel", c.dfs.channel, to_channel);
    r.read("dfs", "states_file", c.dfs.states_file, [](const std::string& v, const std::string&) { return trim(v); });
    r.read("dfs", "states", c.dfs.states,
           [](const std::string& v, const std::string&) { return split_list(v, ","); });
    r.read("dfs", "lambdas", c.dfs.lambdas, to_numbers);
    for (double l : c.dfs.lambdas) {
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError(where("dfs", "lambdas") + ": must lie in [0, 1]");
    }
    if (c.dfs.states.empty() && c.dfs.states_file.empty()) {
        c.dfs.states = {std::string(c.layout.size() / 2, '0') + std::string(c.layout.size() - c.layout.size() / 2, '1')};
    }
    for (const auto& s : c.dfs.states) {
        try {
            const auto [bits, coeffs] = parse_signed_state(s);
            if (bits.front().size() != c.layout.size()) {
                throw ConfigError("state '" + s + "' has " + std::to_string(bits.front().size()) +
                                  " qubits, layout has " + std::to_string(c.layout.size()));
            }
        } catch (const Error& e) {
            throw ConfigError(where("dfs", "states") + ": " + e.what());
        }
    }

    r.read("oracle", "jobs", c.oracle.jobs, [](const std::string& v, const std::string& w) {
        auto jobs = split_list(v, ",");
        for (const auto& j : jobs) {
            if (j != "dephasing" && j != "canonical" && j != "dfs") {
                throw ConfigError(w + ": unknown job '" + j + "' (expected dephasing, canonical, dfs)");
            }
        }
        if (jobs.empty()) throw ConfigError(w + ": list must not be empty");
        return jobs;
    });
    read_oracle_system(r, "oracle_dephasing", c.oracle.dephasing);
    read_oracle_system(r, "oracle_canonical", c.oracle.canonical);
    r.number("oracle_canonical", "base_coupling", c.oracle.canonical_base_coupling);
    r.read("oracle_canonical", "factors", c.oracle.canonical_factors, to_numbers);
    read_oracle_system(r, "oracle_dfs", c.oracle.dfs);
    r.read("oracle_dfs", "states", c.oracle.dfs_states,
           [](const std::string& v, const std::string&) { return split_list(v, ","); });
    for (const auto& s : c.oracle.dfs_states) {
        try {
            parse_signed_state(s);
        } catch (const Error& e) {
            throw ConfigError(where("oracle_dfs", "states") + ": " + e.what());
        }
    }
    return c;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.format) {
        if (*o.format != "csv" && *o.format != "json") throw ConfigError("--format: must be csv or json");
        cfg.format = *o.format;
    }
    if (o.threads) {
        if (*o.threads == 0) throw ConfigError("--threads: must be >= 1");
        cfg.threads = *o.threads;
    }
    if (o.tolerance_scale) {
        if (!(*o.tolerance_scale > 0.0) || !std::isfinite(*o.tolerance_scale)) {
            throw ConfigError("--tolerance-scale: must be a finite number > 0");
        }
        cfg.kernel.quadrature.abs_tol *= *o.tolerance_scale;
        cfg.kernel.quadrature.rel_tol *= *o.tolerance_scale;
    }
    if (o.seed) cfg.seed = *o.seed;
}

std::pair<std::vector<std::string>, std::vector<std::complex<double>>> parse_signed_state(const std::string& text) {
    std::vector<std::string> bits;
    std::vector<std::complex<double>> coeffs;
    double sign = 1.0;
    std::string current;
    auto flush = [&] {
        if (current.empty()) throw DomainError("state '" + text + "': empty term");
        bits.push_back(current);
        coeffs.emplace_back(sign);
        current.clear();
    };
    const auto s = trim(text);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (ch == '+' || ch == '-') {
            if (i > 0) flush();
            sign = ch == '-' ? -1.0 : 1.0;
        } else if (ch == '0' || ch == '1') {
            current.push_back(ch);
        } else if (ch != ' ') {
            throw DomainError("state '" + text + "': unexpected character '" + std::string(1, ch) + "'");
        }
    }
    flush();
    for (const auto& b : bits) {
        if (b.size() != bits.front().size()) throw DomainError("state '" + text + "': terms differ in length");
    }
    RegisterState::superposition(bits, coeffs);
    return {bits, coeffs};
}

nlohmann::json to_json(const RunConfig& c) {
    auto vectors = [](const std::vector<Vec3>& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back({x.x(), x.y(), x.z()});
        return a;
    };
    auto oracle_system = [&](const OracleSystem& o) {
        return json{{"positions", vectors(o.system.positions)},
                    {"wavevectors", vectors(o.system.wavevectors)},
                    {"sound_speed", o.system.sound_speed},
                    {"coupling", o.system.coupling},
                    {"splitting", o.system.splitting},
                    {"truncation", o.system.truncation},
                    {"temperature", o.system.temperature},
                    {"time", o.time}};
    };
    json units{{"time_unit", c.units.time_unit}, {"internal", "hbar = k_B = 1"}};
    if (c.units.temperature_kelvin) units["temperature_kelvin"] = *c.units.temperature_kelvin;
    return {
        {"units", units},
        {"bath", io::to_json(c.bath)},
        {"layout", io::to_json(c.layout)},
        {"tolerances",
         {{"abs_tol", c.kernel.quadrature.abs_tol},
          {"rel_tol", c.kernel.quadrature.rel_tol},
          {"max_intervals", c.kernel.quadrature.max_intervals},
          {"upper_cutoff", c.kernel.upper_cutoff}}},
        {"output", {{"dir", c.output_dir}, {"format", c.format}}},
        {"run", {{"threads", c.threads}, {"seed", c.seed}, {"monte_carlo_samples", c.monte_carlo_samples}}},
        {"corr",
         {{"times", c.corr.times},
          {"channel", std::string(to_string(c.corr.channel))},
          {"theta_independent", c.corr.thresholds.independent},
          {"theta_correlated", c.corr.thresholds.correlated},
          {"separations", c.corr.separations}}},
        {"amps",
         {{"time", c.amps.time},
          {"channel", std::string(to_string(c.amps.channel))},
          {"patterns", c.amps.patterns},
          {"delta", c.amps.delta}}},
        {"threshold", {{"p_th", c.threshold.p_th}, {"p1", c.threshold.p1}, {"n", c.threshold.n}}},
        {"dfs",
         {{"time", c.dfs.time},
          {"channel", std::string(to_string(c.dfs.channel))},
          {"states_file", c.dfs.states_file},
          {"states", c.dfs.states},
          {"lambdas", c.dfs.lambdas}}},
        {"oracle",
         {{"jobs", c.oracle.jobs},
          {"dephasing", oracle_system(c.oracle.dephasing)},
          {"canonical", oracle_system(c.oracle.canonical)},
          {"canonical_base_coupling", c.oracle.canonical_base_coupling},
          {"canonical_factors", c.oracle.canonical_factors},
          {"dfs", oracle_system(c.oracle.dfs)},
          {"dfs_states", c.oracle.dfs_states}}},
    };
}

}  // namespace sbnoise::cli
