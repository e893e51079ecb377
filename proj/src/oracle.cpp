#include "sbnoise/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sbnoise/errors.hpp"

namespace sbnoise {

namespace {

using cd = std::complex<double>;
constexpr double kDensityTolerance = 1e-10;

double spin_sign(std::size_t spin_index, std::size_t j, std::size_t spins) {
    return ((spin_index >> (spins - 1 - j)) & 1U) ? -1.0 : 1.0;
}

std::size_t occupation(std::size_t bath_index, std::size_t k, const FockSystem& sys) {
    for (std::size_t i = sys.modes() - 1; i > k; --i) {
        bath_index /= sys.truncation;
    }
    return bath_index % sys.truncation;
}

double operator_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

double hermitian_norm(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXcd product_state(const FockSystem& sys, const Eigen::VectorXcd& spin, std::size_t bath_index) {
    const auto db = sys.bath_dimension();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.dimension()));
    for (Eigen::Index s = 0; s < spin.size(); ++s) {
        psi(s * static_cast<Eigen::Index>(db) + static_cast<Eigen::Index>(bath_index)) = spin(s);
    }
    return psi;
}

Eigen::MatrixXcd reduce_to_spins(const FockSystem& sys, const Eigen::VectorXcd& psi) {
    const auto db = static_cast<Eigen::Index>(sys.bath_dimension());
    const auto ds = static_cast<Eigen::Index>(sys.spin_dimension());
    const Eigen::Map<const Eigen::MatrixXcd> m(psi.data(), db, ds);  // m(b, s) = psi[s db + b]
    return m.transpose() * m.conjugate();
}

std::vector<double> thermal_weights(const FockSystem& sys) {
    std::vector<double> w(sys.bath_dimension(), 0.0);
    if (sys.temperature == 0.0) {
        w[0] = 1.0;
        return w;
    }
    double total = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) {
        double energy = 0.0;
        for (std::size_t k = 0; k < sys.modes(); ++k) {
            energy += static_cast<double>(occupation(b, k, sys)) * sys.frequency(k);
        }
        w[b] = std::exp(-energy / sys.temperature);
        total += w[b];
    }
    for (auto& x : w) x /= total;
    return w;
}

Eigen::MatrixXcd spin_hamiltonian(std::size_t spins, double splitting) {
    const auto ds = static_cast<Eigen::Index>(std::size_t{1} << spins);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ds, ds);
    for (Eigen::Index s = 0; s < ds; ++s) {
        for (std::size_t j = 0; j < spins; ++j) {
            h(s ^ (Eigen::Index{1} << (spins - 1 - j)), s) += 0.5 * splitting;
        }
    }
    return h;
}

struct SpinDynamics {
    Eigen::VectorXcd joint;
    Eigen::MatrixXcd rho;
};

SpinDynamics run(const FockSystem& sys, const Eigen::VectorXcd& spin, double t) {
    const Propagator prop(build_hamiltonian(sys));
    SpinDynamics out;
    const auto weights = thermal_weights(sys);
    const auto ds = static_cast<Eigen::Index>(sys.spin_dimension());
    out.rho = Eigen::MatrixXcd::Zero(ds, ds);
    for (std::size_t b = 0; b < weights.size(); ++b) {
        if (weights[b] == 0.0) continue;
        const Eigen::VectorXcd psi = prop.apply(product_state(sys, spin, b), t);
        out.rho += weights[b] * reduce_to_spins(sys, psi);
        if (sys.temperature == 0.0) out.joint = psi;
    }

    const Eigen::MatrixXcd& rho = out.rho;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kDensityTolerance ||
        std::abs(rho.trace() - cd(1.0)) > kDensityTolerance) {
        throw Error("reduced density matrix lost Hermiticity or unit trace");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kDensityTolerance) {
        throw Error("reduced density matrix has a negative eigenvalue");
    }
    return out;
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& chi) {
    return std::real(chi.dot(rho * chi));
}

// Bath operator phi_j = sum_k (f_kj a_k^dag - f_kj^* a_k).
Eigen::MatrixXcd bath_displacement_generator(const FockSystem& sys, std::size_t j, double t,
                                             const std::vector<Eigen::MatrixXcd>& a) {
    const auto db = static_cast<Eigen::Index>(sys.bath_dimension());
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(db, db);
    for (std::size_t k = 0; k < sys.modes(); ++k) {
        const cd f = displacement_amplitude(sys, k, j, t);
        phi += f * a[k].adjoint() - std::conj(f) * a[k];
    }
    return phi;
}

void require_dephasing(const FockSystem& sys, const char* what) {
    sys.validate();
    if (sys.splitting != 0.0) {
        throw DomainError(std::string(what) + " requires Delta = 0");
    }
}

}  // namespace

std::complex<double> displacement_amplitude(const FockSystem& sys, std::size_t k, std::size_t j, double t) {
    const double w = sys.frequency(k);
    return (sys.coupling / w) * sys.phase(k, j) * (1.0 - std::polar(1.0, w * t));
}

double effective_phase(const FockSystem& sys, std::size_t spin_index, double t) {
    double phase = 0.0;
    for (std::size_t k = 0; k < sys.modes(); ++k) {
        const double w = sys.frequency(k);
        cd zt = 0.0;
        for (std::size_t j = 0; j < sys.spins(); ++j) {
            zt += spin_sign(spin_index, j, sys.spins()) * sys.phase(k, j);
        }
        phase += (sys.coupling / w) * (sys.coupling / w) * std::norm(zt) * (w * t - std::sin(w * t));
    }
    return phase;
}

EvolutionResult evolve(const FockSystem& sys, const RegisterState& spin, double t, const EvolveOptions& opts) {
    sys.validate();
    if (spin.qubits() != sys.spins()) {
        throw DomainError("initial spin state has " + std::to_string(spin.qubits()) + " qubits, system has " +
                          std::to_string(sys.spins()));
    }
    if (!std::isfinite(t)) {
        throw DomainError("evolution time must be finite");
    }
    const Eigen::VectorXcd chi = Propagator(spin_hamiltonian(sys.spins(), sys.splitting)).apply(spin.amplitudes(), t);

    auto measure = [&](const FockSystem& s, EvolutionResult& r) {
        auto dyn = run(s, spin.amplitudes(), t);
        r.joint_state = std::move(dyn.joint);
        r.spin_density = std::move(dyn.rho);
        r.purity = std::real((r.spin_density * r.spin_density).trace());
        r.free_fidelity = fidelity(r.spin_density, chi);
    };

    EvolutionResult result;
    measure(sys, result);
    if (opts.check_truncation) {
        FockSystem wider = sys;
        wider.truncation += 2;
        EvolutionResult check;
        measure(wider, check);
        result.truncation_change = std::max({(check.spin_density - result.spin_density).cwiseAbs().maxCoeff(),
                                             std::abs(check.purity - result.purity),
                                             std::abs(check.free_fidelity - result.free_fidelity)});
        result.truncation_converged = result.truncation_change <= opts.truncation_tolerance;
    }
    return result;
}

DecompositionReport verify_dephasing_decomposition(const FockSystem& sys, double t) {
    require_dephasing(sys, "dephasing decomposition");
    const Eigen::MatrixXcd u = Propagator(build_hamiltonian(sys)).unitary(t);
    const auto db = static_cast<Eigen::Index>(sys.bath_dimension());
    const auto ds = static_cast<Eigen::Index>(sys.spin_dimension());

    std::vector<Eigen::MatrixXcd> a;
    for (std::size_t k = 0; k < sys.modes(); ++k) a.push_back(ops::bath_annihilation(sys, k));
    std::vector<Eigen::MatrixXcd> phi;
    for (std::size_t j = 0; j < sys.spins(); ++j) phi.push_back(bath_displacement_generator(sys, j, t, a));

    Eigen::VectorXcd free_bath(db);
    for (Eigen::Index b = 0; b < db; ++b) {
        double energy = 0.0;
        for (std::size_t k = 0; k < sys.modes(); ++k) {
            energy += static_cast<double>(occupation(static_cast<std::size_t>(b), k, sys)) * sys.frequency(k);
        }
        free_bath(b) = std::polar(1.0, -energy * t);
    }

    // U is block diagonal in the spin configuration; compare the vacuum-input column of each block.
    Eigen::MatrixXcd diff(u.rows(), ds);
    for (Eigen::Index s = 0; s < ds; ++s) {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(db, db);
        for (std::size_t j = 0; j < sys.spins(); ++j) {
            g += spin_sign(static_cast<std::size_t>(s), j, sys.spins()) * phi[j];
        }
        const Eigen::VectorXcd column = free_bath.asDiagonal() * expm_antihermitian(g).col(0) *
                                        std::polar(1.0, effective_phase(sys, static_cast<std::size_t>(s), t));
        diff.col(s) = u.col(s * db);
        diff.col(s).segment(s * db, db) -= column;
    }

    DecompositionReport report;
    report.difference = operator_norm(diff);

    std::vector<Eigen::Index> interior;
    for (Eigen::Index b = 0; b < db; ++b) {
        bool inside = true;
        for (std::size_t k = 0; k < sys.modes(); ++k) {
            inside = inside && occupation(static_cast<std::size_t>(b), k, sys) + 2 <= sys.truncation;
        }
        if (inside) interior.push_back(b);
    }
    for (std::size_t j = 0; j < sys.spins(); ++j) {
        for (std::size_t m = j + 1; m < sys.spins(); ++m) {
            const Eigen::MatrixXcd c = phi[j] * phi[m] - phi[m] * phi[j];
            report.commutator_norm = std::max(report.commutator_norm, operator_norm(c(interior, interior)));
        }
    }
    report.unitarity_error =
        hermitian_norm(u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()));
    return report;
}

Eigen::MatrixXcd canonical_generator(const FockSystem& sys) {
    sys.validate();
    const double delta = sys.splitting;
    if (!(delta > 0.0)) {
        throw DomainError("canonical transformation requires Delta > 0");
    }
    for (std::size_t k = 0; k < sys.modes(); ++k) {
        const double w = sys.frequency(k);
        if (!(std::abs(w - delta) > 0.1 * delta)) {
            std::ostringstream msg;
            msg << "mode " << k << " is too close to resonance: |w - Delta| = " << std::abs(w - delta)
                << " <= 0.1 Delta";
            throw DomainError(msg.str());
        }
    }
    const auto dim = static_cast<Eigen::Index>(sys.dimension());
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t j = 0; j < sys.spins(); ++j) {
        const auto z = ops::spin_op(sys, j, 'Z');
        const auto y = ops::spin_op(sys, j, 'Y');
        const Eigen::MatrixXcd raise = 0.5 * (z - cd(0, 1) * y);
        const Eigen::MatrixXcd lower = 0.5 * (z + cd(0, 1) * y);
        for (std::size_t k = 0; k < sys.modes(); ++k) {
            const double w = sys.frequency(k);
            const auto a = ops::mode_annihilation(sys, k);
            const Eigen::MatrixXcd t_plus = lower / (delta - w) - raise / (delta + w);
            const Eigen::MatrixXcd t_minus = lower / (delta + w) - raise / (delta - w);
            s += sys.coupling * (sys.phase(k, j) * t_plus * a.adjoint() + std::conj(sys.phase(k, j)) * t_minus * a);
        }
    }
    return s;
}

double canonical_infidelity(const FockSystem& sys, double t) {
    const Eigen::MatrixXcd s = canonical_generator(sys);
    const auto ds = static_cast<Eigen::Index>(sys.spin_dimension());
    const Eigen::VectorXcd uniform = Eigen::VectorXcd::Constant(ds, 1.0 / std::sqrt(static_cast<double>(ds)));
    const Eigen::VectorXcd psi0 = product_state(sys, uniform, 0);

    const Eigen::VectorXcd exact = Propagator(build_hamiltonian(sys)).apply(psi0, t);
    const Eigen::MatrixXcd es = expm_antihermitian(s);
    const Eigen::MatrixXcd h0 = system_hamiltonian(sys) + bath_hamiltonian(sys);
    const Eigen::VectorXcd approx = es * Propagator(h0).apply(es.adjoint() * psi0, t);
    return std::max(0.0, 1.0 - std::norm(exact.dot(approx)));
}

CanonicalReport verify_canonical_transformation(const FockSystem& sys, double t, const CanonicalOptions& opts) {
    if (opts.factors.size() < 2 || !(opts.base_coupling > 0.0)) {
        throw FitError("coupling sweep needs a positive base coupling and at least two factors");
    }
    CanonicalReport report;
    FockSystem probe = sys;
    for (double f : opts.factors) {
        if (!(f > 0.0) || (!report.couplings.empty() && !(opts.base_coupling * f > report.couplings.back()))) {
            throw FitError("coupling sweep factors must be positive and increasing");
        }
        probe.coupling = opts.base_coupling * f;
        const double eps = canonical_infidelity(probe, t);
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            std::ostringstream msg;
            msg << "infidelity " << eps << " at g = " << probe.coupling << " cannot enter a log-log fit";
            throw FitError(msg.str());
        }
        report.couplings.push_back(probe.coupling);
        report.infidelities.push_back(eps);
    }

    const auto n = static_cast<double>(report.couplings.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < report.couplings.size(); ++i) {
        const double x = std::log(report.couplings[i]);
        const double y = std::log(report.infidelities[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    report.doubling_consistent = true;
    for (std::size_t i = 1; i < report.couplings.size(); ++i) {
        const double ratio = report.infidelities[i] / report.infidelities[i - 1];
        const double expected = std::pow(report.couplings[i] / report.couplings[i - 1], report.exponent);
        report.doubling_ratios.push_back(ratio);
        report.doubling_consistent =
            report.doubling_consistent && std::abs(ratio / expected - 1.0) <= opts.halving_tolerance;
    }

    const Eigen::MatrixXcd s = canonical_generator(probe);
    const Eigen::MatrixXcd h0 = system_hamiltonian(probe) + bath_hamiltonian(probe);
    report.generator_residual = operator_norm(coupling_hamiltonian(probe) + h0 * s - s * h0);
    return report;
}

DfsDecouplingReport verify_dfs_decoupling(const FockSystem& sys, const RegisterState& state, double t,
                                          const EvolveOptions& opts) {
    require_dephasing(sys, "decoherence-free decoupling check");
    DfsDecouplingReport report;
    for (std::size_t k = 0; k < sys.modes(); ++k) {
        for (std::size_t j = 1; j < sys.spins(); ++j) {
            report.phase_spread = std::max(report.phase_spread, std::abs(sys.phase(k, j) - sys.phase(k, 0)));
        }
    }
    if (report.phase_spread > kLongWavelengthPhaseTolerance) {
        std::ostringstream msg;
        msg << "mode phases across the register differ by " << report.phase_spread
            << "; the decoupling check needs long-wavelength modes (spread <= " << kLongWavelengthPhaseTolerance
            << ")";
        throw DomainError(msg.str());
    }

    const auto result = evolve(sys, state, t, opts);
    Eigen::VectorXcd predicted = state.amplitudes();
    for (Eigen::Index s = 0; s < predicted.size(); ++s) {
        predicted(s) *= std::polar(1.0, effective_phase(sys, static_cast<std::size_t>(s), t));
    }
    report.fidelity = fidelity(result.spin_density, predicted);
    report.purity = result.purity;
    report.collective_z_residual = collective_z_residual(state);
    report.truncation_converged = result.truncation_converged;
    report.truncation_change = result.truncation_change;
    return report;
}

}  // namespace sbnoise
