#pragma once

#include <complex>
#include <cstddef>

#include "sbnoise/quadrature.hpp"

namespace sbnoise {

// Continuum bosonic bath with linear dispersion omega = c k in three dimensions.
// Spectral density J(omega) = alpha * omega^s * exp(-omega / omega_c).
// Units: hbar = k_B = 1, so temperature is measured in frequency units.
struct BathSpec {
    double coupling_strength = 1.0;  // alpha, absorbs g^2 and the mode volume
    double spectral_exponent = 1.0;  // s
    double cutoff_frequency = 1.0;   // omega_c
    double sound_speed = 1.0;        // c
    double temperature = 0.0;        // T

    void validate() const;
    double spectral_density(double omega) const;
};

struct KernelQuery {
    double separation = 0.0;  // R
    double time = 0.0;        // t
    double splitting = 0.0;   // Delta; zero selects the dephasing kernel

    void validate() const;
};

struct KernelOptions {
    quad::Options quadrature{};
    // Integration runs over [0, upper_cutoff * omega_c] (shifted by Delta for bit-flip kernels).
    double upper_cutoff = 40.0;
};

struct KernelValue {
    std::complex<double> value;
    double error_estimate = 0.0;
    // Bit-flip only: the window |omega - Delta| <= 10/t holds more than 99.9% of the integral.
    bool resonance_dominated = false;
    std::size_t intervals = 0;
};

// coth(omega / 2T) = <a^dag a> + <a a^dag>; exactly 1 at T = 0.
double thermal_factor(double omega, double temperature);

// sin(x)/x with sinc(0) = 1.
double sinc(double x);

// Equal-time contraction of the dephasing displacement operators of two qubits
// a distance R apart:
//   int_0^inf J(w) (4/w^2) sinc(wR/c) sin^2(wt/2) coth(w/2T) dw.
KernelValue dephasing_kernel(const BathSpec& bath, const KernelQuery& q, const KernelOptions& opts = {});

// Bit-flip (Delta > 0) counterpart with the detuned weight
//   int_0^inf J(w) 4/(w-Delta)^2 sinc(wR/c) sin^2((w-Delta)t/2) coth(w/2T) dw.
KernelValue bitflip_kernel(const BathSpec& bath, const KernelQuery& q, const KernelOptions& opts = {});

// Bath-mediated ZZ coupling constant between two qubits at distance R:
//   PV int_0^inf J(w) 2w/(w^2 - Delta^2) sinc(wR/c) dw.
// The pole at w = Delta is excised symmetrically with widths {1e-2, 1e-3, 1e-4} Delta
// and the result Richardson-extrapolated to zero width. Delta = 0 evaluates
// int J(w) (2/w) sinc(wR/c) dw, the coefficient of the linear-in-t dephasing term.
double effective_zz_coupling(const BathSpec& bath, double separation, double splitting,
                             const KernelOptions& opts = {});

// The single excision estimate used by the extrapolation, exposed for diagnostics.
double effective_zz_excised(const BathSpec& bath, double separation, double splitting, double width,
                            const KernelOptions& opts = {});

}  // namespace sbnoise
