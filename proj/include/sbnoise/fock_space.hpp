#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sbnoise/types.hpp"

namespace sbnoise {

constexpr std::size_t kMaxOracleSpins = 3;
constexpr std::size_t kMaxOracleModes = 3;
constexpr std::size_t kMaxFockDimension = std::size_t{1} << 20;
// Dense eigendecomposition is cubic in the dimension; beyond this it stops being a desk computation.
constexpr std::size_t kMaxDenseDimension = 4096;

// Spins coupled to a few discrete bosonic modes,
//   H = sum_j (Delta/2) X_j + sum_k w_k a_k^dag a_k + g sum_k (Zt_k a_k^dag + Zt_k^dag a_k),
//   Zt_k = sum_j Z_j exp(-i k.r_j),  w_k = c |k|.
// Basis index = spin_index * d^M + bath_index; spin_index uses qubit 0 as the most
// significant bit, bath_index uses mode 0 as the most significant digit.
struct FockSystem {
    std::vector<Vec3> positions;
    double splitting = 0.0;    // Delta
    double coupling = 0.0;     // g
    double sound_speed = 1.0;  // c
    std::vector<Vec3> wavevectors;
    std::size_t truncation = 8;  // per-mode Fock dimension d
    double temperature = 0.0;    // 0 selects the vacuum

    std::size_t spins() const { return positions.size(); }
    std::size_t modes() const { return wavevectors.size(); }
    std::size_t spin_dimension() const { return std::size_t{1} << spins(); }
    std::size_t bath_dimension() const;
    std::size_t dimension() const { return spin_dimension() * bath_dimension(); }
    double frequency(std::size_t k) const;
    // exp(-i k.r_j)
    std::complex<double> phase(std::size_t k, std::size_t j) const;
    // Probability mass of the thermal state lost by truncating at d levels.
    double thermal_tail() const;

    void validate() const;
};

// Dense operators on the joint space.
namespace ops {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
Eigen::MatrixXcd annihilation(std::size_t d);

// Pauli matrix ('X', 'Y' or 'Z') on spin j, identity elsewhere.
Eigen::MatrixXcd spin_op(const FockSystem& sys, std::size_t j, char pauli);
// a_k embedded in the joint space.
Eigen::MatrixXcd mode_annihilation(const FockSystem& sys, std::size_t k);
// a_k on the bath factor only.
Eigen::MatrixXcd bath_annihilation(const FockSystem& sys, std::size_t k);

}  // namespace ops

Eigen::MatrixXcd system_hamiltonian(const FockSystem& sys);    // H_S (x) I
Eigen::MatrixXcd bath_hamiltonian(const FockSystem& sys);      // I (x) H_B
Eigen::MatrixXcd coupling_hamiltonian(const FockSystem& sys);  // H_SB
Eigen::MatrixXcd build_hamiltonian(const FockSystem& sys);

// exp(-i H t) through one Hermitian eigendecomposition, reusable across times.
class Propagator {
public:
    explicit Propagator(const Eigen::MatrixXcd& hamiltonian);

    Eigen::MatrixXcd unitary(double t) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& state, double t) const;
    const Eigen::VectorXd& energies() const { return energies_; }

private:
    Eigen::MatrixXcd vectors_;
    Eigen::VectorXd energies_;
};

// exp(A) for anti-Hermitian A.
Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& a);

}  // namespace sbnoise
