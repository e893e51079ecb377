#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sbnoise/errors.hpp"

namespace sbnoise::quad {

struct Options {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    // Upper bound on the number of live subintervals, initial panels included.
    std::size_t max_intervals = 1u << 21;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    double l1_norm = 0.0;  // estimate of the integral of |f|
    std::size_t intervals = 0;
};

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

namespace detail {

struct Interval {
    double a;
    double b;
    double value;
    double error;
    double l1;
};

struct ByError {
    bool operator()(const Interval& x, const Interval& y) const noexcept { return x.error < y.error; }
};

// One 21-point Kronrod / 10-point Gauss pair on [a, b]; node and weight tables
// come from Boost.Math.
template <class F>
Interval evaluate(const F& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = f0 * wk[0];
    double g = 0.0;
    double l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(mid + half * x[i]);
        const double fm = f(mid - half * x[i]);
        k += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 1) {
            g += (fp + fm) * wg[i / 2];
        }
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double err = std::max(std::abs(k - g), 50.0 * eps * l1) * half;
    return {a, b, k * half, err, l1 * half};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (10/21) integration over consecutive panels
// [breakpoints[i], breakpoints[i+1]]. The interval with the largest error
// estimate is bisected until the total error is below
// max(abs_tol, rel_tol * L1), L1 being the integral of |f|.
template <class F>
Result integrate(const F& f, std::span<const double> breakpoints, const Options& opts = {}) {
    if (breakpoints.size() < 2) {
        return {};
    }
    if (breakpoints.size() - 1 > opts.max_intervals) {
        std::ostringstream msg;
        msg << "quadrature: " << breakpoints.size() - 1 << " initial panels exceed the budget of "
            << opts.max_intervals << " intervals";
        throw IntegrationError(msg.str(), INFINITY);
    }

    std::priority_queue<detail::Interval, std::vector<detail::Interval>, detail::ByError> queue;
    double total = 0.0;
    double total_error = 0.0;
    double total_l1 = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) {
            continue;
        }
        auto iv = detail::evaluate(f, breakpoints[i], breakpoints[i + 1]);
        total += iv.value;
        total_error += iv.error;
        total_l1 += iv.l1;
        queue.push(iv);
    }

    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * total_l1); };
    std::size_t since_resum = 0;
    while (!queue.empty() && total_error > target()) {
        if (queue.size() >= opts.max_intervals) {
            break;
        }
        auto worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            break;  // interval at machine resolution
        }
        queue.pop();
        auto left = detail::evaluate(f, worst.a, mid);
        auto right = detail::evaluate(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_l1 += left.l1 + right.l1 - worst.l1;
        queue.push(left);
        queue.push(right);
        if (++since_resum == 4096) {
            // Running totals drift; recompute from the live set.
            since_resum = 0;
            auto copy = queue;
            CompensatedSum v, e, n;
            while (!copy.empty()) {
                v.add(copy.top().value);
                e.add(copy.top().error);
                n.add(copy.top().l1);
                copy.pop();
            }
            total = v.value();
            total_error = e.value();
            total_l1 = n.value();
        }
    }

    // Final sum in left-to-right order so the result does not depend on heap layout.
    std::vector<detail::Interval> live;
    live.reserve(queue.size());
    while (!queue.empty()) {
        live.push_back(queue.top());
        queue.pop();
    }
    std::sort(live.begin(), live.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    CompensatedSum v, e, n;
    for (const auto& iv : live) {
        v.add(iv.value);
        e.add(iv.error);
        n.add(iv.l1);
    }
    Result out{v.value(), e.value(), n.value(), live.size()};
    if (!std::isfinite(out.value)) {
        throw IntegrationError("quadrature: non-finite integrand", INFINITY);
    }
    if (out.error > std::max(opts.abs_tol, opts.rel_tol * out.l1_norm)) {
        std::ostringstream msg;
        msg << "quadrature did not converge: estimate " << out.value << ", residual error "
            << out.error << " after " << out.intervals << " intervals";
        throw IntegrationError(msg.str(), out.error);
    }
    return out;
}

}  // namespace sbnoise::quad
