#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sbnoise/acceptance/suite.hpp"
#include "sbnoise/dfs.hpp"
#include "sbnoise/oracle.hpp"
#include "sbnoise/serialization.hpp"
#include "sbnoise/threshold.hpp"
#include "sbnoise/wick.hpp"

namespace sbnoise::cli {

namespace {

using nlohmann::json;
using io::format_number;

class Emitter {
public:
    Emitter(const RunConfig& cfg, std::ostream& out) : dir_(cfg.output_dir), config_(to_json(cfg)), out_(out) {}

    void csv(const std::string& name, const std::string& schema, const std::string& content) {
        const auto path = (std::filesystem::path(dir_) / name).string();
        io::write_atomic(path, content);
        const json sidecar{{"schema", schema}, {"artifact", name}, {"config", config_}};
        io::write_atomic(path + ".config.json", sidecar.dump(2) + "\n");
        out_ << "wrote " << path << "\n";
    }

    // Returns false if the written artifact does not re-validate.
    bool json_artifact(const std::string& name, const std::string& schema, const json& result) {
        const auto path = (std::filesystem::path(dir_) / name).string();
        io::write_atomic(path, io::make_artifact(schema, config_, result).dump(2) + "\n");
        out_ << "wrote " << path << "\n";
        try {
            std::ifstream in(path);
            io::validate_artifact(json::parse(in));
        } catch (const std::exception& e) {
            out_ << "artifact " << path << " failed re-validation: " << e.what() << "\n";
            return false;
        }
        return true;
    }

private:
    std::string dir_;
    json config_;
    std::ostream& out_;
};

BuildOptions build_options(const RunConfig& cfg) {
    BuildOptions b;
    b.kernel = cfg.kernel;
    b.threads = cfg.threads;
    return b;
}

std::string pattern_label(const ErrorPattern& p) {
    std::string s;
    for (auto q : p.qubits) s += (s.empty() ? "" : " ") + std::to_string(q);
    return s;
}

int finish(bool valid) {
    return valid ? kExitOk : kExitValidationFailed;
}

int cmd_corr(const RunConfig& cfg, std::ostream& out) {
    const auto& job = cfg.corr;
    Emitter emit(cfg, out);
    json matrices = json::array();
    json regimes = json::array();
    json pairs = json::array();
    std::string matrix_csv = io::contraction_csv_header();
    std::string regime_csv = "t,row,col,ratio,regime\n";
    std::string pair_csv = "t,channel,delta,separation,value,ratio\n";
    const double delta = job.channel == Channel::DephasingZ ? 0.0 : cfg.layout.splitting;

    for (double t : job.times) {
        const auto c = build_contraction_matrix(cfg.bath, cfg.layout, t, job.channel, build_options(cfg));
        matrices.push_back(io::to_json(c));
        matrix_csv += io::contraction_csv_rows(c);
        out << "t = " << t << ": ";
        if (c.entries().diagonal().real().minCoeff() > 0.0) {
            const auto cls = classify_regime(c, job.thresholds);
            json entry{{"time", t}, {"global", std::string(to_string(cls.global))}, {"pairs", json::array()}};
            for (const auto& p : cls.pairs) {
                entry["pairs"].push_back({{"row", p.j}, {"col", p.m}, {"ratio", p.ratio},
                                          {"regime", std::string(to_string(p.regime))}});
                regime_csv += format_number(t) + "," + std::to_string(p.j) + "," + std::to_string(p.m) + "," +
                              format_number(p.ratio) + "," + std::string(to_string(p.regime)) + "\n";
            }
            regimes.push_back(entry);
            out << "regime " << to_string(cls.global) << "\n";
        } else {
            out << "zero self-correlation, ratios undefined\n";
        }

        if (!job.separations.empty() && t > 0.0) {
            auto kernel = [&](double r) {
                return delta == 0.0 ? dephasing_kernel(cfg.bath, {r, t, 0.0}, cfg.kernel).value.real()
                                    : bitflip_kernel(cfg.bath, {r, t, delta}, cfg.kernel).value.real();
            };
            const double self = kernel(0.0);
            for (double r : job.separations) {
                const double v = kernel(r);
                const double ratio = self > 0.0 ? v / self : 0.0;
                pairs.push_back({{"time", t}, {"separation", r}, {"value", v}, {"ratio", ratio}});
                pair_csv += format_number(t) + "," + std::string(to_string(job.channel)) + "," +
                            format_number(delta) + "," + format_number(r) + "," + format_number(v) + "," +
                            format_number(ratio) + "\n";
            }
        }
    }

    if (cfg.format == "json") {
        return finish(emit.json_artifact("corr.json", "sbnoise.corr",
                                         {{"matrices", matrices}, {"regimes", regimes}, {"pair_kernels", pairs}}));
    }
    emit.csv("corr.csv", "sbnoise.corr", matrix_csv);
    emit.csv("corr_regimes.csv", "sbnoise.corr", regime_csv);
    if (!job.separations.empty()) emit.csv("corr_pairs.csv", "sbnoise.corr", pair_csv);
    return kExitOk;
}

int cmd_amps(const RunConfig& cfg, std::ostream& out) {
    const auto& job = cfg.amps;
    const auto c = build_contraction_matrix(cfg.bath, cfg.layout, job.time, job.channel, build_options(cfg));
    std::vector<ErrorPattern> patterns;
    for (const auto& q : job.patterns) patterns.push_back({q, job.channel});
    DeviationOptions dev;
    dev.delta = job.delta;
    dev.moment.threads = cfg.threads;
    const auto reports = independence_deviation(c, patterns, dev);

    out << std::left << std::setw(18) << "pattern" << std::setw(20) << "A_n^2" << std::setw(20) << "prod A_1^2"
        << std::setw(14) << "enhancement" << "independent\n";
    std::string csv = "pattern,order,amplitude_sq,independent_product,enhancement,matchings,violates_independence\n";
    json list = json::array();
    for (const auto& r : reports) {
        out << std::setw(18) << pattern_label(r.pattern) << std::setw(20) << format_number(r.amplitude_sq)
            << std::setw(20) << format_number(r.independent_product) << std::setw(14) << std::setprecision(6)
            << r.enhancement << (r.violates_independence ? "no" : "yes") << "\n";
        csv += pattern_label(r.pattern) + "," + std::to_string(r.pattern.order()) + "," +
               format_number(r.amplitude_sq) + "," + format_number(r.independent_product) + "," +
               format_number(r.enhancement) + "," + std::to_string(r.matchings) + "," +
               (r.violates_independence ? "true" : "false") + "\n";
        list.push_back(io::to_json(r));
    }
    Emitter emit(cfg, out);
    if (cfg.format == "json") {
        return finish(emit.json_artifact("amps.json", "sbnoise.amps", {{"matrix", io::to_json(c)}, {"reports", list}}));
    }
    emit.csv("amps.csv", "sbnoise.amps", csv);
    return kExitOk;
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
    const auto& job = cfg.threshold;
    std::string csv = "n,P_1,P_fail_indep,P_fail_corr,breakdown,P_fail_corr_exact\n";
    json rows = json::array();
    for (auto n : job.n) {
        for (double p1 : job.p1) {
            const ThresholdQuery q{p1, job.p_th, n};
            const double indep = independent_pfail(q);
            const double corr = correlated_pfail(q);
            const double exact = correlated_pfail_exact(q);
            const double brk = breakdown_point(job.p_th, n);
            csv += std::to_string(n) + "," + format_number(p1) + "," + format_number(indep) + "," +
                   format_number(corr) + "," + format_number(brk) + "," + format_number(exact) + "\n";
            rows.push_back({{"n", n}, {"p1", p1}, {"p_fail_indep", indep}, {"p_fail_corr", corr},
                            {"p_fail_corr_exact", exact}, {"breakdown", brk}});
        }
    }
    out << "P_fail values are upper bounds (A_n^2 used for P_n)\n";
    Emitter emit(cfg, out);
    if (cfg.format == "json") {
        return finish(emit.json_artifact("threshold.json", "sbnoise.threshold", {{"rows", rows}}));
    }
    emit.csv("threshold.csv", "sbnoise.threshold", csv);
    return kExitOk;
}

std::vector<std::pair<std::string, RegisterState>> dfs_states(const RunConfig& cfg) {
    std::vector<std::pair<std::string, RegisterState>> states;
    for (const auto& s : cfg.dfs.states) {
        const auto [bits, coeffs] = parse_signed_state(s);
        states.emplace_back(s, RegisterState::superposition(bits, coeffs));
    }
    if (!cfg.dfs.states_file.empty()) {
        auto path = std::filesystem::path(cfg.dfs.states_file);
        if (path.is_relative()) path = std::filesystem::path(cfg.source_dir) / path;
        std::ifstream in(path);
        if (!in) throw ConfigError("[dfs] states_file: cannot open '" + path.string() + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("[dfs] states_file: " + path.string() + ": " + e.what());
        }
        try {
            for (auto& s : io::states_from_json(j)) states.push_back(std::move(s));
        } catch (const io::FormatError& e) {
            throw ConfigError("[dfs] states_file: " + path.string() + ": " + e.what());
        }
    }
    for (const auto& [label, s] : states) {
        if (s.qubits() != cfg.layout.size()) {
            throw ConfigError("[dfs] state '" + label + "' has " + std::to_string(s.qubits()) +
                              " qubits but the layout has " + std::to_string(cfg.layout.size()));
        }
    }
    return states;
}

int cmd_dfs(const RunConfig& cfg, std::ostream& out) {
    const auto states = dfs_states(cfg);
    const auto c = build_contraction_matrix(cfg.bath, cfg.layout, cfg.dfs.time, cfg.dfs.channel, build_options(cfg));
    std::string csv = "label,lambda,collective_z_residual,decoupling\n";
    json list = json::array();
    out << std::left << std::setw(24) << "state" << std::setw(22) << "||sum Z psi||" << "<sum C_jm Z_j Z_m>\n";
    for (const auto& [label, s] : states) {
        const double residual = collective_z_residual(s);
        const double value = dfs_decoupling_check(c, s);
        json interp = json::array();
        for (double lambda : cfg.dfs.lambdas) {
            const double v = dfs_decoupling_check(interpolate_correlation(c, lambda), s);
            interp.push_back({{"lambda", lambda}, {"decoupling", v}});
            csv += label + "," + format_number(lambda) + "," + format_number(residual) + "," + format_number(v) + "\n";
        }
        out << std::setw(24) << label << std::setw(22) << format_number(residual) << format_number(value) << "\n";
        list.push_back({{"label", label}, {"state", io::to_json(s)}, {"collective_z_residual", residual},
                        {"decoupling", value}, {"interpolation", interp}});
    }
    Emitter emit(cfg, out);
    if (cfg.format == "json") {
        return finish(
            emit.json_artifact("dfs.json", "sbnoise.dfs-check", {{"matrix", io::to_json(c)}, {"states", list}}));
    }
    emit.csv("dfs.csv", "sbnoise.dfs-check", csv);
    return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
    const auto& job = cfg.oracle;
    json result = json::object();
    for (const auto& name : job.jobs) {
        if (name == "dephasing") {
            const auto r = verify_dephasing_decomposition(job.dephasing.system, job.dephasing.time);
            out << "dephasing decomposition: ||U_exact - U_decomposed|| = " << r.difference
                << ", ||[phi_j, phi_m]|| = " << r.commutator_norm << "\n";
            result["dephasing"] = io::to_json(r);
        } else if (name == "canonical") {
            CanonicalOptions co;
            co.base_coupling = job.canonical_base_coupling;
            co.factors = job.canonical_factors;
            const auto r = verify_canonical_transformation(job.canonical.system, job.canonical.time, co);
            out << "canonical transformation: infidelity exponent p = " << r.exponent << "\n";
            result["canonical"] = io::to_json(r);
        } else if (name == "dfs") {
            json list = json::array();
            for (const auto& s : job.dfs_states) {
                const auto [bits, coeffs] = parse_signed_state(s);
                const auto state = RegisterState::superposition(bits, coeffs);
                if (state.qubits() != job.dfs.system.spins()) {
                    throw ConfigError("[oracle_dfs] states: '" + s + "' does not match the number of spins");
                }
                const auto r = verify_dfs_decoupling(job.dfs.system, state, job.dfs.time);
                out << "dfs decoupling " << s << ": fidelity " << std::setprecision(15) << r.fidelity << ", purity "
                    << r.purity << "\n";
                auto j = io::to_json(r);
                j["state"] = s;
                list.push_back(j);
            }
            result["dfs"] = list;
        }
    }
    if (cfg.format == "csv") out << "oracle reports are written as JSON\n";
    Emitter emit(cfg, out);
    return finish(emit.json_artifact("oracle.json", "sbnoise.oracle", result));
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    acceptance::SuiteOptions opts;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    opts.monte_carlo_samples = cfg.monte_carlo_samples;
    json list = json::array();
    bool all = true;
    for (const auto& c : acceptance::criteria()) {
        const auto r = acceptance::run_criterion(c.id, opts);
        out << acceptance::format_line(r) << std::endl;
        all = all && r.passed;
        list.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    out << (all ? "all acceptance checks passed" : "some acceptance checks failed") << "\n";
    Emitter emit(cfg, out);
    const bool valid = emit.json_artifact("acceptance.json", "sbnoise.acceptance", {{"criteria", list}, {"passed", all}});
    return all && valid ? kExitOk : kExitValidationFailed;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"corr", "amps", "threshold", "dfs-check", "oracle", "validate"};
    return names;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out) {
    if (name == "corr") return cmd_corr(cfg, out);
    if (name == "amps") return cmd_amps(cfg, out);
    if (name == "threshold") return cmd_threshold(cfg, out);
    if (name == "dfs-check") return cmd_dfs(cfg, out);
    if (name == "oracle") return cmd_oracle(cfg, out);
    if (name == "validate") return cmd_validate(cfg, out);
    throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace sbnoise::cli
