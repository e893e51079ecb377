#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sbnoise/dfs.hpp"
#include "sbnoise/fock_space.hpp"

namespace sbnoise {

struct EvolveOptions {
    bool check_truncation = true;  // re-run at d + 2 and compare
    double truncation_tolerance = 1e-8;
};

struct EvolutionResult {
    Eigen::VectorXcd joint_state;  // vacuum bath only; empty for thermal baths
    Eigen::MatrixXcd spin_density;
    double purity = 1.0;
    // <chi| rho |chi> with chi the initial spin state evolved under H_S alone.
    double free_fidelity = 1.0;
    bool truncation_converged = true;
    double truncation_change = 0.0;
};

// Exact evolution of (spin state) (x) (vacuum or thermal bath). Thermal baths are
// averaged over Fock basis states with their Boltzmann weights.
EvolutionResult evolve(const FockSystem& sys, const RegisterState& spin, double t, const EvolveOptions& opts = {});

// f_k(r_j, t) = (g / w_k) exp(-i k.r_j) (1 - exp(i w_k t)).
std::complex<double> displacement_amplitude(const FockSystem& sys, std::size_t k, std::size_t j, double t);

// Phase of exp(i H_eff(t)) on computational basis state `spin_index`:
//   sum_k (g/w_k)^2 |sum_j z_j exp(-i k.r_j)|^2 (w_k t - sin w_k t).
double effective_phase(const FockSystem& sys, std::size_t spin_index, double t);

struct DecompositionReport {
    // Operator norm of U_exact - exp(-i H_B t) exp(i H_eff) exp(G), restricted to
    // vacuum-bath input columns where truncation does not act.
    double difference = 0.0;
    // Largest ||[phi_j, phi_m]|| over spin pairs, on Fock states below the truncation edge.
    double commutator_norm = 0.0;
    double unitarity_error = 0.0;  // ||U^dag U - I||
};

DecompositionReport verify_dephasing_decomposition(const FockSystem& sys, double t);

// Generator S of the canonical transformation removing H_SB at first order,
//   S = g sum_{j,k} [T_j(w_k) e^{-ik.r_j} a_k^dag + T_j(-w_k) e^{ik.r_j} a_k],
//   T_j(w) = L_j^- / (Delta - w) - L_j^+ / (Delta + w),  L^+ = |+><-| = (Z - iY)/2.
Eigen::MatrixXcd canonical_generator(const FockSystem& sys);

// 1 - |<exact|approx>|^2 for the uniform spin superposition (x) vacuum, with
// approx = exp(S) exp(-i(H_S + H_B) t) exp(-S).
double canonical_infidelity(const FockSystem& sys, double t);

struct CanonicalOptions {
    double base_coupling = 0.005;
    std::vector<double> factors{1.0, 2.0, 4.0, 8.0};
    double halving_tolerance = 0.2;
};

struct CanonicalReport {
    std::vector<double> couplings;
    std::vector<double> infidelities;
    double exponent = 0.0;               // least-squares slope of log eps against log g
    std::vector<double> doubling_ratios;  // eps(g_{i+1}) / eps(g_i)
    bool doubling_consistent = false;     // each ratio within tolerance of (g_{i+1}/g_i)^p
    double generator_residual = 0.0;      // ||H_SB + [H_S + H_B, S]|| at the largest coupling
};

CanonicalReport verify_canonical_transformation(const FockSystem& sys, double t, const CanonicalOptions& opts = {});

struct DfsDecouplingReport {
    double fidelity = 0.0;  // against exp(i H_eff) |psi>
    double purity = 0.0;
    double collective_z_residual = 0.0;
    double phase_spread = 0.0;  // max |exp(-i k.r_j) - exp(-i k.r_0)|
    bool truncation_converged = true;
    double truncation_change = 0.0;
};

constexpr double kLongWavelengthPhaseTolerance = 1e-6;

DfsDecouplingReport verify_dfs_decoupling(const FockSystem& sys, const RegisterState& state, double t,
                                          const EvolveOptions& opts = {});

}  // namespace sbnoise
