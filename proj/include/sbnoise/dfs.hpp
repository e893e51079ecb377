#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbnoise/correlation.hpp"

namespace sbnoise {

constexpr std::size_t kMaxRegisterQubits = 12;

// Pure state of N qubits in the computational basis. Basis index of a bitstring
// b_0 b_1 ... b_{N-1} is sum_j b_j 2^(N-1-j); b_j = 0 is the Z = +1 eigenstate.
class RegisterState {
public:
    RegisterState(std::size_t qubits, Eigen::VectorXcd amplitudes);

    // Equal superposition of the given bitstrings with the given coefficients, normalized.
    static RegisterState superposition(const std::vector<std::string>& bitstrings,
                                       const std::vector<std::complex<double>>& coefficients);
    static RegisterState basis(const std::string& bitstring);

    std::size_t qubits() const { return qubits_; }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

private:
    std::size_t qubits_;
    Eigen::VectorXcd amplitudes_;
};

std::size_t bitstring_index(const std::string& bitstring);
std::string index_bitstring(std::size_t index, std::size_t qubits);

// Sum_j z_j for computational basis state `index`.
int collective_z_eigenvalue(std::size_t index, std::size_t qubits);

// All bitstrings with N/2 ones, in increasing basis index.
std::vector<std::string> dfs_basis(std::size_t qubits);

// || (sum_j Z_j) |psi> ||
double collective_z_residual(const RegisterState& state);

// <psi| sum_{j,m} C[j][m] Z_j Z_m |psi>, the second-moment decoherence exponent.
double dfs_decoupling_check(const ContractionMatrix& c, const RegisterState& state);

// (1 - lambda) diag(C) + lambda c0 J with c0 the mean diagonal entry and J the all-ones matrix.
ContractionMatrix interpolate_correlation(const ContractionMatrix& c, double lambda);

}  // namespace sbnoise
