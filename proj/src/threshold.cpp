#include "sbnoise/threshold.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sbnoise/errors.hpp"

namespace sbnoise {

namespace {

double log_ratio(const ThresholdQuery& q) {
    return std::log(q.p1) - std::log(q.p_th);
}

}  // namespace

void ThresholdQuery::validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0)) {
        throw DomainError("threshold: p1 must lie in [0, 1], got " + std::to_string(p1));
    }
    if (!(p_th > 0.0 && p_th < 1.0)) {
        throw DomainError("threshold: p_th must lie in (0, 1), got " + std::to_string(p_th));
    }
    if (n < 1) {
        throw DomainError("threshold: error weight n must be >= 1");
    }
}

double log_double_factorial_odd(std::uint64_t n) {
    const double x = static_cast<double>(n);
    return std::lgamma(2.0 * x + 1.0) - x * std::numbers::ln2 - std::lgamma(x + 1.0);
}

double log_independent_pfail(const ThresholdQuery& q) {
    q.validate();
    const double n = static_cast<double>(q.n);
    return std::log(q.p_th) + n * log_ratio(q);
}

double log_correlated_pfail(const ThresholdQuery& q) {
    q.validate();
    const double n = static_cast<double>(q.n);
    return 0.5 * std::numbers::ln2 + std::log(q.p_th) + n * (std::log(2.0 * n) - 1.0 + log_ratio(q));
}

double log_correlated_pfail_exact(const ThresholdQuery& q) {
    q.validate();
    const double n = static_cast<double>(q.n);
    return log_double_factorial_odd(q.n) + std::log(q.p_th) + n * log_ratio(q);
}

double independent_pfail(const ThresholdQuery& q) {
    return std::exp(log_independent_pfail(q));
}

double correlated_pfail(const ThresholdQuery& q) {
    return std::exp(log_correlated_pfail(q));
}

double correlated_pfail_exact(const ThresholdQuery& q) {
    return std::exp(log_correlated_pfail_exact(q));
}

double breakdown_point(double p_th, std::uint64_t n) {
    ThresholdQuery{0.0, p_th, n}.validate();
    return std::numbers::e / (2.0 * static_cast<double>(n)) * p_th;
}

}  // namespace sbnoise
