#include "sbnoise/serialization.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "sbnoise/errors.hpp"

namespace sbnoise::io {

namespace {

using cd = std::complex<double>;

const json& field(const json& j, const char* name, const std::string& where) {
    if (!j.is_object()) {
        throw FormatError(where + ": expected an object");
    }
    const auto it = j.find(name);
    if (it == j.end()) {
        throw FormatError(where + ": missing field '" + name + "'");
    }
    return *it;
}

double number(const json& j, const char* name, const std::string& where) {
    const auto& v = field(j, name, where);
    if (!v.is_number()) {
        throw FormatError(where + "." + name + ": expected a number");
    }
    return v.get<double>();
}

std::size_t index_value(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw FormatError(where + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

json complex_json(cd z) {
    return json::array({z.real(), z.imag()});
}

cd complex_from(const json& v, const std::string& where) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw FormatError(where + ": expected a number or [re, im]");
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw FormatError(where + ": '" + s + "' is not a number");
    }
    if (used != s.size()) {
        throw FormatError(where + ": '" + s + "' is not a number");
    }
    return v;
}

template <class Fn>
void wrap_domain(const std::string& where, Fn&& fn) {
    try {
        fn();
    } catch (const DomainError& e) {
        throw FormatError(where + ": " + e.what());
    }
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

json to_json(const BathSpec& b) {
    return {{"coupling_strength", b.coupling_strength},
            {"spectral_exponent", b.spectral_exponent},
            {"cutoff_frequency", b.cutoff_frequency},
            {"sound_speed", b.sound_speed},
            {"temperature", b.temperature}};
}

BathSpec bath_from_json(const json& j) {
    const std::string w = "bath";
    BathSpec b;
    b.coupling_strength = number(j, "coupling_strength", w);
    b.spectral_exponent = number(j, "spectral_exponent", w);
    b.cutoff_frequency = number(j, "cutoff_frequency", w);
    b.sound_speed = number(j, "sound_speed", w);
    b.temperature = number(j, "temperature", w);
    wrap_domain(w, [&] { b.validate(); });
    return b;
}

json to_json(const QubitLayout& l) {
    json positions = json::array();
    for (const auto& p : l.positions) positions.push_back({p.x(), p.y(), p.z()});
    return {{"positions", positions}, {"splitting", l.splitting}};
}

QubitLayout layout_from_json(const json& j) {
    const std::string w = "layout";
    QubitLayout l;
    l.splitting = number(j, "splitting", w);
    const auto& ps = field(j, "positions", w);
    if (!ps.is_array()) throw FormatError(w + ".positions: expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps[i];
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
            throw FormatError(w + ".positions[" + std::to_string(i) + "]: expected [x, y, z]");
        }
        l.positions.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    wrap_domain(w, [&] { l.validate(); });
    return l;
}

json to_json(const ContractionMatrix& c) {
    json rows = json::array();
    for (std::size_t j = 0; j < c.size(); ++j) {
        json row = json::array();
        for (std::size_t m = 0; m < c.size(); ++m) row.push_back(complex_json(c(j, m)));
        rows.push_back(std::move(row));
    }
    return {{"time", c.time()},
            {"channel", std::string(to_string(c.channel()))},
            {"splitting", c.splitting()},
            {"size", c.size()},
            {"entries", rows}};
}

ContractionMatrix contraction_from_json(const json& j) {
    const std::string w = "contraction";
    const double t = number(j, "time", w);
    const double delta = number(j, "splitting", w);
    const auto& ch = field(j, "channel", w);
    if (!ch.is_string()) throw FormatError(w + ".channel: expected a string");
    const auto n = index_value(field(j, "size", w), w + ".size");
    const auto& rows = field(j, "entries", w);
    if (!rows.is_array() || rows.size() != n) {
        throw FormatError(w + ".entries: expected " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (!rows[r].is_array() || rows[r].size() != n) {
            throw FormatError(w + ".entries[" + std::to_string(r) + "]: expected " + std::to_string(n) + " columns");
        }
        for (std::size_t c = 0; c < n; ++c) {
            m(r, c) = complex_from(rows[r][c], w + ".entries[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    Channel channel{};
    wrap_domain(w, [&] { channel = parse_channel(ch.get<std::string>()); });
    std::optional<ContractionMatrix> out;
    wrap_domain(w, [&] { out.emplace(std::move(m), t, channel, delta); });
    return *out;
}

std::string contraction_csv_header() {
    return "t,channel,delta,row,col,re,im\n";
}

std::string contraction_csv_rows(const ContractionMatrix& c) {
    std::string out;
    const std::string prefix = format_number(c.time()) + "," + std::string(to_string(c.channel())) + "," +
                               format_number(c.splitting()) + ",";
    for (std::size_t j = 0; j < c.size(); ++j) {
        for (std::size_t m = 0; m < c.size(); ++m) {
            out += prefix + std::to_string(j) + "," + std::to_string(m) + "," + format_number(c(j, m).real()) + "," +
                   format_number(c(j, m).imag()) + "\n";
        }
    }
    return out;
}

std::vector<ContractionMatrix> contraction_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line + "\n" != contraction_csv_header()) {
        throw FormatError("line 1: expected header " + contraction_csv_header().substr(0, 30));
    }
    struct Block {
        std::string key;
        double t;
        Channel channel;
        double delta;
        std::vector<std::tuple<std::size_t, std::size_t, cd>> cells;
    };
    std::vector<Block> blocks;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        const auto cells = split(line, ',');
        if (cells.size() != 7) throw FormatError(where + ": expected 7 columns, got " + std::to_string(cells.size()));
        const std::string key = cells[0] + "," + cells[1] + "," + cells[2];
        if (blocks.empty() || blocks.back().key != key) {
            Channel ch{};
            wrap_domain(where, [&] { ch = parse_channel(cells[1]); });
            blocks.push_back({key, parse_double(cells[0], where), ch, parse_double(cells[2], where), {}});
        }
        const auto r = static_cast<std::size_t>(parse_double(cells[3], where));
        const auto c = static_cast<std::size_t>(parse_double(cells[4], where));
        blocks.back().cells.emplace_back(r, c, cd(parse_double(cells[5], where), parse_double(cells[6], where)));
    }
    std::vector<ContractionMatrix> out;
    for (const auto& b : blocks) {
        std::size_t n = 0;
        while (n * n < b.cells.size()) ++n;
        if (n * n != b.cells.size()) {
            throw FormatError("block t=" + b.key + ": " + std::to_string(b.cells.size()) + " entries is not a square");
        }
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                                        cd(NAN, NAN));
        for (const auto& [r, c, v] : b.cells) {
            if (r >= n || c >= n) throw FormatError("block " + b.key + ": index out of range");
            m(r, c) = v;
        }
        wrap_domain("block " + b.key, [&] { out.emplace_back(std::move(m), b.t, b.channel, b.delta); });
    }
    return out;
}

json to_json(const ErrorPattern& p) {
    return {{"qubits", p.qubits}, {"channel", std::string(to_string(p.channel))}};
}

ErrorPattern pattern_from_json(const json& j) {
    const std::string w = "pattern";
    ErrorPattern p;
    const auto& qs = field(j, "qubits", w);
    if (!qs.is_array()) throw FormatError(w + ".qubits: expected an array");
    for (const auto& q : qs) p.qubits.push_back(index_value(q, w + ".qubits"));
    const auto& ch = field(j, "channel", w);
    if (!ch.is_string()) throw FormatError(w + ".channel: expected a string");
    wrap_domain(w, [&] { p.channel = parse_channel(ch.get<std::string>()); });
    return p;
}

json to_json(const AmplitudeReport& r) {
    return {{"pattern", to_json(r.pattern)},
            {"order", r.pattern.order()},
            {"amplitude_sq", r.amplitude_sq},
            {"independent_product", r.independent_product},
            {"enhancement", r.enhancement},
            {"matchings", r.matchings},
            {"violates_independence", r.violates_independence}};
}

AmplitudeReport amplitude_report_from_json(const json& j) {
    const std::string w = "amplitude_report";
    AmplitudeReport r;
    r.pattern = pattern_from_json(field(j, "pattern", w));
    r.amplitude_sq = number(j, "amplitude_sq", w);
    r.independent_product = number(j, "independent_product", w);
    r.enhancement = number(j, "enhancement", w);
    r.matchings = index_value(field(j, "matchings", w), w + ".matchings");
    const auto& v = field(j, "violates_independence", w);
    if (!v.is_boolean()) throw FormatError(w + ".violates_independence: expected a boolean");
    r.violates_independence = v.get<bool>();
    if (r.amplitude_sq < 0.0 || r.independent_product < 0.0 || r.enhancement < 0.0) {
        throw FormatError(w + ": amplitudes and enhancement must be >= 0");
    }
    if (r.matchings != matching_count(r.pattern.order())) {
        throw FormatError(w + ".matchings: inconsistent with the pattern order");
    }
    return r;
}

RegisterState state_from_json(const json& j) {
    const json& amps = j.is_object() ? field(j, "amplitudes", "state") : j;
    if (!amps.is_array() || amps.empty()) {
        throw FormatError("state.amplitudes: expected a non-empty array");
    }
    std::size_t qubits = 0;
    while ((std::size_t{1} << qubits) < amps.size() && qubits <= kMaxRegisterQubits) ++qubits;
    if ((std::size_t{1} << qubits) != amps.size()) {
        throw FormatError("state.amplitudes: length " + std::to_string(amps.size()) + " is not a power of two");
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_from(amps[i], "state.amplitudes[" + std::to_string(i) + "]");
    }
    std::optional<RegisterState> out;
    try {
        out.emplace(qubits, std::move(v));
    } catch (const Error& e) {
        throw FormatError(std::string("state: ") + e.what());
    }
    return *out;
}

std::vector<std::pair<std::string, RegisterState>> states_from_json(const json& j) {
    if (!j.is_array()) throw FormatError("states: expected a JSON list");
    std::vector<std::pair<std::string, RegisterState>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string label = "state" + std::to_string(i);
        if (j[i].is_object() && j[i].contains("label")) {
            if (!j[i]["label"].is_string()) throw FormatError("states[" + std::to_string(i) + "].label: expected a string");
            label = j[i]["label"].get<std::string>();
        }
        try {
            out.emplace_back(label, state_from_json(j[i]));
        } catch (const FormatError& e) {
            throw FormatError("states[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

json to_json(const RegisterState& s) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) amps.push_back(complex_json(s.amplitudes()(i)));
    return {{"qubits", s.qubits()}, {"amplitudes", amps}};
}

json to_json(const DecompositionReport& r) {
    return {{"difference", r.difference}, {"commutator_norm", r.commutator_norm},
            {"unitarity_error", r.unitarity_error}};
}

json to_json(const CanonicalReport& r) {
    return {{"couplings", r.couplings},
            {"infidelities", r.infidelities},
            {"exponent", r.exponent},
            {"doubling_ratios", r.doubling_ratios},
            {"doubling_consistent", r.doubling_consistent},
            {"generator_residual", r.generator_residual}};
}

json to_json(const DfsDecouplingReport& r) {
    return {{"fidelity", r.fidelity},
            {"purity", r.purity},
            {"collective_z_residual", r.collective_z_residual},
            {"phase_spread", r.phase_spread},
            {"truncation_converged", r.truncation_converged},
            {"truncation_change", r.truncation_change}};
}

json make_artifact(const std::string& schema, const json& config, const json& result) {
    return {{"schema", schema}, {"version", 1}, {"config", config}, {"result", result}};
}

namespace {

void require_numbers(const json& j, std::initializer_list<const char*> names, const std::string& where) {
    for (auto n : names) number(j, n, where);
}

void require_array(const json& j, const char* name, const std::string& where) {
    if (!field(j, name, where).is_array()) throw FormatError(where + "." + name + ": expected an array");
}

}  // namespace

void validate_artifact(const json& a) {
    const auto& schema = field(a, "schema", "artifact");
    if (!schema.is_string()) throw FormatError("artifact.schema: expected a string");
    if (field(a, "version", "artifact") != 1) throw FormatError("artifact.version: unsupported version");
    if (!field(a, "config", "artifact").is_object()) throw FormatError("artifact.config: expected an object");
    const auto& r = field(a, "result", "artifact");
    const auto s = schema.get<std::string>();
    if (s == "sbnoise.corr") {
        require_array(r, "matrices", "result");
        for (const auto& m : r["matrices"]) contraction_from_json(m);
        require_array(r, "regimes", "result");
        require_array(r, "pair_kernels", "result");
        for (const auto& p : r["pair_kernels"]) require_numbers(p, {"time", "separation", "value", "ratio"}, "pair");
    } else if (s == "sbnoise.amps") {
        contraction_from_json(field(r, "matrix", "result"));
        require_array(r, "reports", "result");
        for (const auto& x : r["reports"]) amplitude_report_from_json(x);
    } else if (s == "sbnoise.threshold") {
        require_array(r, "rows", "result");
        for (const auto& x : r["rows"]) {
            require_numbers(x, {"n", "p1", "p_fail_indep", "p_fail_corr", "p_fail_corr_exact", "breakdown"}, "row");
        }
    } else if (s == "sbnoise.dfs-check") {
        contraction_from_json(field(r, "matrix", "result"));
        require_array(r, "states", "result");
        for (const auto& x : r["states"]) {
            require_numbers(x, {"collective_z_residual", "decoupling"}, "state");
            require_array(x, "interpolation", "state");
        }
    } else if (s == "sbnoise.oracle") {
        if (r.contains("dephasing")) require_numbers(r["dephasing"], {"difference", "commutator_norm", "unitarity_error"}, "dephasing");
        if (r.contains("canonical")) require_numbers(r["canonical"], {"exponent", "generator_residual"}, "canonical");
        if (r.contains("dfs")) {
            require_array(r, "dfs", "result");
            for (const auto& x : r["dfs"]) require_numbers(x, {"fidelity", "purity", "collective_z_residual"}, "dfs");
        }
    } else if (s == "sbnoise.acceptance") {
        require_array(r, "criteria", "result");
        for (const auto& x : r["criteria"]) {
            number(x, "id", "criterion");
            if (!field(x, "passed", "criterion").is_boolean()) throw FormatError("criterion.passed: expected a boolean");
        }
    } else {
        throw FormatError("artifact.schema: unknown schema '" + s + "'");
    }
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

}  // namespace sbnoise::io
