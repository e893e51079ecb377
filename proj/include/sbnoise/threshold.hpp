#pragma once

#include <cstdint>

namespace sbnoise {

// Failure probability of an n-error event in a concatenated code with threshold p_th.
// Outputs are upper bounds: they use A_n^2 in place of P_n.
struct ThresholdQuery {
    double p1 = 0.0;     // single-error probability
    double p_th = 1e-4;  // threshold rate
    std::uint64_t n = 1; // error weight, e.g. 2^k for k levels of a distance-3 code

    void validate() const;
};

// All results are formed as exp(log ...) so that large n does not underflow
// before the final rounding. log_* variants return the natural logarithm.
double log_independent_pfail(const ThresholdQuery& q);
double log_correlated_pfail(const ThresholdQuery& q);
double log_correlated_pfail_exact(const ThresholdQuery& q);

// p_th (p1 / p_th)^n
double independent_pfail(const ThresholdQuery& q);
// sqrt(2) p_th ((2n/e) p1 / p_th)^n
double correlated_pfail(const ThresholdQuery& q);
// (2n-1)!! p_th (p1 / p_th)^n, the exact pairing count in place of its Stirling form.
double correlated_pfail_exact(const ThresholdQuery& q);

// p1 below which correlated errors stop improving with concatenation: (e / 2n) p_th.
double breakdown_point(double p_th, std::uint64_t n);

// ln((2n-1)!!)
double log_double_factorial_odd(std::uint64_t n);

}  // namespace sbnoise
