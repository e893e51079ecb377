#include "sbnoise/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sbnoise/errors.hpp"
#include "sbnoise/parallel.hpp"

namespace sbnoise {

namespace {

constexpr double kDistanceRelTol = 1e-12;
constexpr double kMatrixRelTol = 1e-8;

void validate_entries(const Eigen::MatrixXcd& c) {
    if (c.rows() != c.cols() || c.rows() == 0) {
        throw DomainError("contraction matrix must be square and non-empty");
    }
    if (!c.allFinite()) {
        throw DomainError("contraction matrix has non-finite entries");
    }
    const double scale = c.diagonal().cwiseAbs().maxCoeff();
    const double tol = kMatrixRelTol * scale;
    const auto n = c.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto d = c(j, j);
        if (std::abs(d.imag()) > tol || d.real() < -tol) {
            std::ostringstream msg;
            msg << "contraction matrix diagonal entry " << j << " must be real and non-negative, got " << d;
            throw DomainError(msg.str());
        }
        for (Eigen::Index m = j + 1; m < n; ++m) {
            if (std::abs(c(j, m) - c(m, j)) > tol) {
                std::ostringstream msg;
                msg << "contraction matrix is not symmetric at (" << j << "," << m << ")";
                throw DomainError(msg.str());
            }
            const double bound = std::sqrt(std::max(0.0, c(j, j).real()) * std::max(0.0, c(m, m).real()));
            if (std::abs(c(j, m)) > bound + tol) {
                std::ostringstream msg;
                msg << "contraction matrix violates |C_jm| <= sqrt(C_jj C_mm) at (" << j << "," << m << ")";
                throw DomainError(msg.str());
            }
        }
    }
}

}  // namespace

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::DephasingZ: return "dephasing-z";
        case Channel::BitflipZ: return "bitflip-z";
        case Channel::BitflipY: return "bitflip-y";
    }
    return "unknown";
}

Channel parse_channel(std::string_view name) {
    if (name == "dephasing-z") return Channel::DephasingZ;
    if (name == "bitflip-z") return Channel::BitflipZ;
    if (name == "bitflip-y") return Channel::BitflipY;
    throw DomainError("unknown channel '" + std::string(name) + "' (expected dephasing-z, bitflip-z or bitflip-y)");
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Independent: return "independent";
        case Regime::Intermediate: return "intermediate";
        case Regime::Correlated: return "correlated";
    }
    return "unknown";
}

double QubitLayout::distance(std::size_t j, std::size_t m) const {
    return (positions.at(j) - positions.at(m)).norm();
}

void QubitLayout::validate() const {
    if (positions.empty()) {
        throw DomainError("layout: at least one qubit is required");
    }
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (!positions[j].allFinite()) {
            throw DomainError("layout: position of qubit " + std::to_string(j) + " is not finite");
        }
    }
    if (!std::isfinite(splitting) || splitting < 0.0) {
        throw DomainError("layout: splitting must be >= 0");
    }
}

ContractionMatrix::ContractionMatrix(Eigen::MatrixXcd entries, double time, Channel channel, double splitting)
    : entries_(std::move(entries)), time_(time), channel_(channel), splitting_(splitting) {
    validate_entries(entries_);
}

ContractionMatrix ContractionMatrix::fully_correlated(std::size_t n, double value, double time, Channel channel,
                                                      double splitting) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), value);
    return ContractionMatrix(std::move(c), time, channel, splitting);
}

ContractionMatrix build_contraction_matrix(const BathSpec& bath, const QubitLayout& layout, double time,
                                           Channel channel, const BuildOptions& opts) {
    bath.validate();
    layout.validate();
    if (!std::isfinite(time) || time < 0.0) {
        throw DomainError("build_contraction_matrix: time must be >= 0");
    }
    const bool bitflip = channel != Channel::DephasingZ;
    if (bitflip && !(layout.splitting > 0.0)) {
        throw DomainError("build_contraction_matrix: bit-flip channels require splitting > 0");
    }

    const std::size_t n = layout.size();
    struct PairDistance {
        double r;
        std::size_t j;
        std::size_t m;
    };
    std::vector<PairDistance> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = j; m < n; ++m) {
            pairs.push_back({j == m ? 0.0 : layout.distance(j, m), j, m});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.r < b.r; });

    // Group sorted distances; each group shares one kernel evaluation at its first member.
    std::vector<std::size_t> group_of(pairs.size());
    std::vector<std::size_t> group_head;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (group_head.empty() ||
            std::abs(pairs[i].r - pairs[group_head.back()].r) > kDistanceRelTol * pairs[group_head.back()].r) {
            group_head.push_back(i);
        }
        group_of[i] = group_head.size() - 1;
    }

    std::vector<std::complex<double>> values(group_head.size());
    parallel_for(group_head.size(), opts.threads, [&](std::size_t g) {
        const auto& p = pairs[group_head[g]];
        try {
            if (!bitflip) {
                values[g] = dephasing_kernel(bath, {p.r, time, 0.0}, opts.kernel).value;
            } else if (time == 0.0) {
                values[g] = 0.0;
            } else {
                // Y and Z bit-flip channels share |f~_k|^2 and hence the kernel.
                values[g] = bitflip_kernel(bath, {p.r, time, layout.splitting}, opts.kernel).value;
            }
        } catch (const IntegrationError& e) {
            std::ostringstream msg;
            msg << "pair (" << p.j << "," << p.m << ") at R=" << p.r << ": " << e.what();
            throw IntegrationError(msg.str(), e.residual());
        }
    });

    Eigen::MatrixXcd c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto v = values[group_of[i]];
        c(pairs[i].j, pairs[i].m) = v;
        c(pairs[i].m, pairs[i].j) = v;
    }
    return ContractionMatrix(std::move(c), time, channel, bitflip ? layout.splitting : 0.0);
}

double correlation_ratio(const ContractionMatrix& c, std::size_t j, std::size_t m) {
    if (j >= c.size() || m >= c.size()) {
        throw DomainError("correlation_ratio: qubit index out of range");
    }
    const double norm = std::sqrt(c(j, j).real() * c(m, m).real());
    if (!(norm > 0.0)) {
        std::ostringstream msg;
        msg << "correlation_ratio: undefined for zero self-correlation (pair " << j << "," << m << ", t=" << c.time()
            << ")";
        throw DomainError(msg.str());
    }
    return c(j, m).real() / norm;
}

void RegimeThresholds::validate() const {
    if (!(independent > 0.0 && independent < correlated && correlated < 1.0)) {
        throw DomainError("regime thresholds must satisfy 0 < independent < correlated < 1");
    }
}

RegimeClassification classify_regime(const ContractionMatrix& c, const RegimeThresholds& thresholds) {
    thresholds.validate();
    RegimeClassification out;
    for (std::size_t j = 0; j < c.size(); ++j) {
        for (std::size_t m = j + 1; m < c.size(); ++m) {
            const double r = correlation_ratio(c, j, m);
            const double a = std::abs(r);
            Regime regime = Regime::Intermediate;
            if (a < thresholds.independent) {
                regime = Regime::Independent;
            } else if (a > thresholds.correlated) {
                regime = Regime::Correlated;
            }
            out.pairs.push_back({j, m, r, regime});
            out.global = std::max(out.global, regime);
        }
    }
    return out;
}

}  // namespace sbnoise
