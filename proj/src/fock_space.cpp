#include "sbnoise/fock_space.hpp"

#include <cmath>
#include <sstream>

#include "sbnoise/errors.hpp"

namespace sbnoise {

namespace {

using cd = std::complex<double>;
constexpr double kThermalTailLimit = 1e-8;

Eigen::MatrixXcd pauli(char which) {
    Eigen::Matrix2cd m;
    switch (which) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw DomainError(std::string("unknown Pauli operator '") + which + "'");
    }
    return m;
}

Eigen::MatrixXcd identity(std::size_t n) {
    return Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

void check_dense(const FockSystem& sys) {
    sys.validate();
    if (sys.dimension() > kMaxDenseDimension) {
        std::ostringstream msg;
        msg << "joint dimension " << sys.dimension() << " exceeds the dense limit " << kMaxDenseDimension;
        throw CapacityError(msg.str());
    }
}

}  // namespace

std::size_t FockSystem::bath_dimension() const {
    std::size_t d = 1;
    for (std::size_t k = 0; k < modes(); ++k) {
        if (d > kMaxFockDimension / std::max<std::size_t>(truncation, 1)) {
            return kMaxFockDimension + 1;
        }
        d *= truncation;
    }
    return d;
}

double FockSystem::frequency(std::size_t k) const {
    return sound_speed * wavevectors.at(k).norm();
}

std::complex<double> FockSystem::phase(std::size_t k, std::size_t j) const {
    return std::polar(1.0, -wavevectors.at(k).dot(positions.at(j)));
}

double FockSystem::thermal_tail() const {
    if (temperature == 0.0) {
        return 0.0;
    }
    double log_kept = 0.0;
    for (std::size_t k = 0; k < modes(); ++k) {
        log_kept += std::log1p(-std::exp(-static_cast<double>(truncation) * frequency(k) / temperature));
    }
    return -std::expm1(log_kept);
}

void FockSystem::validate() const {
    if (positions.empty() || positions.size() > kMaxOracleSpins) {
        throw CapacityError("oracle supports 1 to " + std::to_string(kMaxOracleSpins) + " spins, got " +
                            std::to_string(positions.size()));
    }
    if (wavevectors.empty() || wavevectors.size() > kMaxOracleModes) {
        throw CapacityError("oracle supports 1 to " + std::to_string(kMaxOracleModes) + " modes, got " +
                            std::to_string(wavevectors.size()));
    }
    if (truncation < 2) {
        throw DomainError("Fock truncation must keep at least 2 levels");
    }
    if (!std::isfinite(splitting) || splitting < 0.0) {
        throw DomainError("splitting must be finite and >= 0");
    }
    if (!std::isfinite(coupling)) {
        throw DomainError("coupling must be finite");
    }
    if (!(sound_speed > 0.0) || !std::isfinite(sound_speed)) {
        throw DomainError("sound speed must be finite and > 0");
    }
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw DomainError("temperature must be finite and >= 0");
    }
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (!positions[j].allFinite()) throw DomainError("spin position " + std::to_string(j) + " is not finite");
    }
    for (std::size_t k = 0; k < wavevectors.size(); ++k) {
        if (!wavevectors[k].allFinite() || !(frequency(k) > 0.0)) {
            throw DomainError("mode " + std::to_string(k) + " needs a finite nonzero wavevector");
        }
    }
    if (dimension() > kMaxFockDimension) {
        throw CapacityError("joint dimension 2^N d^M exceeds 2^20");
    }
    if (thermal_tail() >= kThermalTailLimit) {
        std::ostringstream msg;
        msg << "thermal occupation beyond " << truncation << " levels carries probability " << thermal_tail()
            << " (limit " << kThermalTailLimit << "); raise the truncation";
        throw DomainError(msg.str());
    }
}

namespace ops {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXcd annihilation(std::size_t d) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t n = 1; n < d; ++n) {
        a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

Eigen::MatrixXcd spin_op(const FockSystem& sys, std::size_t j, char which) {
    Eigen::MatrixXcd s = identity(1);
    for (std::size_t i = 0; i < sys.spins(); ++i) {
        s = kron(s, i == j ? pauli(which) : identity(2));
    }
    return kron(s, identity(sys.bath_dimension()));
}

Eigen::MatrixXcd bath_annihilation(const FockSystem& sys, std::size_t k) {
    Eigen::MatrixXcd b = identity(1);
    for (std::size_t i = 0; i < sys.modes(); ++i) {
        b = kron(b, i == k ? annihilation(sys.truncation) : identity(sys.truncation));
    }
    return b;
}

Eigen::MatrixXcd mode_annihilation(const FockSystem& sys, std::size_t k) {
    return kron(identity(sys.spin_dimension()), bath_annihilation(sys, k));
}

}  // namespace ops

Eigen::MatrixXcd system_hamiltonian(const FockSystem& sys) {
    check_dense(sys);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sys.dimension()),
                                                static_cast<Eigen::Index>(sys.dimension()));
    for (std::size_t j = 0; j < sys.spins(); ++j) {
        h += 0.5 * sys.splitting * ops::spin_op(sys, j, 'X');
    }
    return h;
}

Eigen::MatrixXcd bath_hamiltonian(const FockSystem& sys) {
    check_dense(sys);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sys.dimension()),
                                                static_cast<Eigen::Index>(sys.dimension()));
    for (std::size_t k = 0; k < sys.modes(); ++k) {
        const auto a = ops::mode_annihilation(sys, k);
        h += sys.frequency(k) * a.adjoint() * a;
    }
    return h;
}

Eigen::MatrixXcd coupling_hamiltonian(const FockSystem& sys) {
    check_dense(sys);
    const auto dim = static_cast<Eigen::Index>(sys.dimension());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    if (sys.coupling == 0.0) {
        return h;
    }
    std::vector<Eigen::MatrixXcd> z;
    for (std::size_t j = 0; j < sys.spins(); ++j) {
        z.push_back(ops::spin_op(sys, j, 'Z'));
    }
    for (std::size_t k = 0; k < sys.modes(); ++k) {
        Eigen::MatrixXcd zt = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t j = 0; j < sys.spins(); ++j) {
            zt += sys.phase(k, j) * z[j];
        }
        const auto a = ops::mode_annihilation(sys, k);
        const Eigen::MatrixXcd term = zt * a.adjoint();
        h += sys.coupling * (term + term.adjoint());
    }
    return h;
}

Eigen::MatrixXcd build_hamiltonian(const FockSystem& sys) {
    Eigen::MatrixXcd h = system_hamiltonian(sys) + bath_hamiltonian(sys) + coupling_hamiltonian(sys);
    // Symmetrize away rounding so the eigensolver sees an exactly Hermitian input.
    return 0.5 * (h + h.adjoint());
}

Propagator::Propagator(const Eigen::MatrixXcd& hamiltonian) {
    if (hamiltonian.rows() != hamiltonian.cols()) {
        throw DomainError("Hamiltonian must be square");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
    if (solver.info() != Eigen::Success) {
        throw Error("Hermitian eigendecomposition failed");
    }
    vectors_ = solver.eigenvectors();
    energies_ = solver.eigenvalues();
}

Eigen::MatrixXcd Propagator::unitary(double t) const {
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index i = 0; i < energies_.size(); ++i) {
        phases(i) = std::polar(1.0, -energies_(i) * t);
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& state, double t) const {
    Eigen::VectorXcd c = vectors_.adjoint() * state;
    for (Eigen::Index i = 0; i < energies_.size(); ++i) {
        c(i) *= std::polar(1.0, -energies_(i) * t);
    }
    return vectors_ * c;
}

Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& a) {
    // exp(A) = exp(-i H) with H = i A Hermitian.
    const Eigen::MatrixXcd h = cd(0, 1) * a;
    return Propagator(0.5 * (h + h.adjoint())).unitary(1.0);
}

}  // namespace sbnoise
