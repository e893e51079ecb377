#include "sbnoise/dfs.hpp"

#include <cmath>
#include <sstream>

#include "sbnoise/errors.hpp"

namespace sbnoise {

namespace {

constexpr double kNormTolerance = 1e-12;

void check_qubits(std::size_t qubits) {
    if (qubits == 0) {
        throw DomainError("register must contain at least one qubit");
    }
    if (qubits > kMaxRegisterQubits) {
        throw CapacityError("register size must be at most " + std::to_string(kMaxRegisterQubits) +
                            " qubits, got " + std::to_string(qubits));
    }
}

}  // namespace

RegisterState::RegisterState(std::size_t qubits, Eigen::VectorXcd amplitudes)
    : qubits_(qubits), amplitudes_(std::move(amplitudes)) {
    check_qubits(qubits_);
    if (amplitudes_.size() != (Eigen::Index{1} << qubits_)) {
        std::ostringstream msg;
        msg << "register state of " << qubits_ << " qubits needs " << (std::size_t{1} << qubits_)
            << " amplitudes, got " << amplitudes_.size();
        throw DomainError(msg.str());
    }
    if (!amplitudes_.allFinite()) {
        throw DomainError("register state has non-finite amplitudes");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg.precision(15);
        msg << "register state is not normalized (norm " << norm << ")";
        throw DomainError(msg.str());
    }
}

RegisterState RegisterState::superposition(const std::vector<std::string>& bitstrings,
                                           const std::vector<std::complex<double>>& coefficients) {
    if (bitstrings.empty() || bitstrings.size() != coefficients.size()) {
        throw DomainError("superposition needs one coefficient per bitstring");
    }
    const std::size_t n = bitstrings.front().size();
    check_qubits(n);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
    for (std::size_t i = 0; i < bitstrings.size(); ++i) {
        if (bitstrings[i].size() != n) {
            throw DomainError("bitstrings in a superposition must have equal length");
        }
        v(static_cast<Eigen::Index>(bitstring_index(bitstrings[i]))) += coefficients[i];
    }
    const double norm = v.norm();
    if (!(norm > 0.0)) {
        throw DomainError("superposition has zero norm");
    }
    return RegisterState(n, v / norm);
}

RegisterState RegisterState::basis(const std::string& bitstring) {
    return superposition({bitstring}, {1.0});
}

std::size_t bitstring_index(const std::string& bitstring) {
    check_qubits(bitstring.size());
    std::size_t index = 0;
    for (char ch : bitstring) {
        if (ch != '0' && ch != '1') {
            throw DomainError("bitstring '" + bitstring + "' may only contain 0 and 1");
        }
        index = (index << 1) | static_cast<std::size_t>(ch - '0');
    }
    return index;
}

std::string index_bitstring(std::size_t index, std::size_t qubits) {
    std::string s(qubits, '0');
    for (std::size_t j = 0; j < qubits; ++j) {
        if ((index >> (qubits - 1 - j)) & 1U) s[j] = '1';
    }
    return s;
}

int collective_z_eigenvalue(std::size_t index, std::size_t qubits) {
    int ones = 0;
    for (std::size_t j = 0; j < qubits; ++j) {
        ones += static_cast<int>((index >> j) & 1U);
    }
    return static_cast<int>(qubits) - 2 * ones;
}

std::vector<std::string> dfs_basis(std::size_t qubits) {
    check_qubits(qubits);
    if (qubits % 2 != 0) {
        std::ostringstream msg;
        msg << "no exact decoherence-free subspace for odd N = " << qubits
            << "; the nearest weight sectors have sum Z = +1 or -1 (" << (qubits - 1) / 2 << " or "
            << (qubits + 1) / 2 << " ones)";
        throw DomainError(msg.str());
    }
    std::vector<std::string> out;
    for (std::size_t x = 0; x < (std::size_t{1} << qubits); ++x) {
        if (collective_z_eigenvalue(x, qubits) == 0) {
            out.push_back(index_bitstring(x, qubits));
        }
    }
    return out;
}

double collective_z_residual(const RegisterState& state) {
    const auto& psi = state.amplitudes();
    double sum = 0.0;
    for (Eigen::Index x = 0; x < psi.size(); ++x) {
        const double z = collective_z_eigenvalue(static_cast<std::size_t>(x), state.qubits());
        sum += z * z * std::norm(psi(x));
    }
    return std::sqrt(sum);
}

double dfs_decoupling_check(const ContractionMatrix& c, const RegisterState& state) {
    const std::size_t n = state.qubits();
    if (c.size() != n) {
        std::ostringstream msg;
        msg << "contraction matrix is " << c.size() << "x" << c.size() << " but the state has " << n << " qubits";
        throw DomainError(msg.str());
    }
    const auto& psi = state.amplitudes();
    const Eigen::MatrixXd re = c.entries().real();
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    double sum = 0.0;
    for (Eigen::Index x = 0; x < psi.size(); ++x) {
        const double w = std::norm(psi(x));
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            z(static_cast<Eigen::Index>(j)) = ((x >> (n - 1 - j)) & 1) ? -1.0 : 1.0;
        }
        sum += w * z.dot(re * z);
    }
    return sum;
}

ContractionMatrix interpolate_correlation(const ContractionMatrix& c, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError("interpolation parameter lambda must lie in [0, 1]");
    }
    const auto n = static_cast<Eigen::Index>(c.size());
    const std::complex<double> c0 = c.entries().diagonal().mean();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Constant(n, n, lambda * c0);
    m.diagonal() += (1.0 - lambda) * c.entries().diagonal();
    return ContractionMatrix(std::move(m), c.time(), c.channel(), c.splitting());
}

}  // namespace sbnoise
