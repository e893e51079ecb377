#pragma once

#include <complex>
#include <cstddef>

// Brute-force reference sums over discretized bath modes. These deliberately
// avoid the analytic angular reduction and the adaptive quadrature used by
// the library: radial frequencies are sampled on a uniform midpoint grid and
// the direction average of exp(-i k.R) is summed over explicit polar angles.
namespace sbnoise::testing {

struct ModeBath {
    double alpha = 1.0;
    double s = 1.0;
    double omega_c = 1.0;
    double c = 1.0;
    double temperature = 0.0;
};

// Contraction <phi_j^dag phi_m> for qubits a distance R apart; splitting = 0
// gives the dephasing weight, splitting > 0 the detuned bit-flip weight.
std::complex<double> mode_sum_contraction(const ModeBath& bath, double separation, double time,
                                          double splitting, std::size_t radial_modes,
                                          std::size_t angular_modes, double upper);

// Principal-value ZZ coupling by a trapezoid sum over a grid symmetric about
// the pole, with the excised window |w - splitting| < width removed.
double trapezoid_zz_coupling(const ModeBath& bath, double separation, double splitting,
                             double width, std::size_t steps, double upper);

// coth(x) from its partial-fraction series.
double coth_series(double x, std::size_t terms);

}  // namespace sbnoise::testing
