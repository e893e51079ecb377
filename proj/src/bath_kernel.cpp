#include "sbnoise/bath_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "sbnoise/errors.hpp"

namespace sbnoise {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* what) {
    if (!ok) {
        throw DomainError(what);
    }
}

// Breakpoints covering [lo, hi] on a grid of spacing `width` anchored at `anchor`.
std::vector<double> panel_breakpoints(double lo, double hi, double anchor, double width) {
    std::vector<double> pts;
    if (!(hi > lo)) {
        return pts;
    }
    anchor = std::clamp(anchor, lo, hi);
    const auto below = static_cast<std::size_t>(std::ceil((anchor - lo) / width));
    const auto above = static_cast<std::size_t>(std::ceil((hi - anchor) / width));
    pts.reserve(below + above + 2);
    pts.push_back(lo);
    for (std::size_t k = below; k >= 1; --k) {
        const double x = anchor - static_cast<double>(k) * width;
        if (x > lo) {
            pts.push_back(x);
        }
    }
    if (anchor > lo && anchor < hi) {
        pts.push_back(anchor);
    }
    for (std::size_t k = 1; k <= above; ++k) {
        const double x = anchor + static_cast<double>(k) * width;
        if (x < hi) {
            pts.push_back(x);
        }
    }
    pts.push_back(hi);
    return pts;
}

// Oscillation scale of the integrand: one period in t, one in R/c, and the cutoff itself.
double panel_width(const BathSpec& bath, double separation, double time) {
    double w = bath.cutoff_frequency;
    if (time > 0.0) {
        w = std::min(w, kTwoPi / time);
    }
    if (separation > 0.0) {
        w = std::min(w, kTwoPi * bath.sound_speed / separation);
    }
    return w;
}

// Spectral density with alpha = 1 times the thermal factor.
struct ThermalSpectrum {
    double s;
    double omega_c;
    double temperature;

    double operator()(double omega) const {
        const double base = std::pow(omega, s) * std::exp(-omega / omega_c);
        return temperature > 0.0 ? base * thermal_factor(omega, temperature) : base;
    }
};

void check_infrared(const BathSpec& bath) {
    // Near w -> 0 the thermal weight behaves as w^(s-1); s = 0 diverges logarithmically.
    if (bath.temperature > 0.0 && bath.spectral_exponent <= 0.0) {
        throw DomainError("kernel diverges at omega -> 0 for spectral_exponent = 0 and temperature > 0");
    }
}

KernelValue scaled(const quad::Result& r, double alpha) {
    KernelValue out;
    out.value = {alpha * r.value, 0.0};
    out.error_estimate = alpha * r.error;
    out.intervals = r.intervals;
    return out;
}

}  // namespace

void BathSpec::validate() const {
    require(std::isfinite(coupling_strength) && coupling_strength >= 0.0, "bath: coupling_strength must be >= 0");
    require(std::isfinite(spectral_exponent) && spectral_exponent >= 0.0, "bath: spectral_exponent must be >= 0");
    require(std::isfinite(cutoff_frequency) && cutoff_frequency > 0.0, "bath: cutoff_frequency must be > 0");
    require(std::isfinite(sound_speed) && sound_speed > 0.0, "bath: sound_speed must be > 0");
    require(std::isfinite(temperature) && temperature >= 0.0, "bath: temperature must be >= 0");
}

double BathSpec::spectral_density(double omega) const {
    if (omega <= 0.0) {
        return 0.0;
    }
    return coupling_strength * std::pow(omega, spectral_exponent) * std::exp(-omega / cutoff_frequency);
}

void KernelQuery::validate() const {
    require(std::isfinite(separation) && separation >= 0.0, "kernel query: separation must be >= 0");
    require(std::isfinite(time) && time >= 0.0, "kernel query: time must be >= 0");
    require(std::isfinite(splitting) && splitting >= 0.0, "kernel query: splitting must be >= 0");
}

double thermal_factor(double omega, double temperature) {
    if (!(omega > 0.0)) {
        throw DomainError("thermal_factor: omega must be > 0");
    }
    if (temperature < 0.0) {
        throw DomainError("thermal_factor: temperature must be >= 0");
    }
    if (temperature == 0.0) {
        return 1.0;
    }
    return 1.0 / std::tanh(omega / (2.0 * temperature));
}

double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

KernelValue dephasing_kernel(const BathSpec& bath, const KernelQuery& q, const KernelOptions& opts) {
    bath.validate();
    q.validate();
    require(q.splitting == 0.0, "dephasing_kernel: splitting must be 0");
    if (q.time == 0.0 || bath.coupling_strength == 0.0) {
        return {};
    }
    check_infrared(bath);

    const ThermalSpectrum weight{bath.spectral_exponent, bath.cutoff_frequency, bath.temperature};
    const double t = q.time;
    const double k_scale = q.separation / bath.sound_speed;
    // 4 sin^2(wt/2) / w^2 = t^2 sinc^2(wt/2)
    auto integrand = [&](double w) {
        const double s = sinc(0.5 * w * t);
        return weight(w) * t * t * s * s * sinc(w * k_scale);
    };
    const double upper = opts.upper_cutoff * bath.cutoff_frequency;
    const auto pts = panel_breakpoints(0.0, upper, 0.0, panel_width(bath, q.separation, t));
    return scaled(quad::integrate(integrand, pts, opts.quadrature), bath.coupling_strength);
}

KernelValue bitflip_kernel(const BathSpec& bath, const KernelQuery& q, const KernelOptions& opts) {
    bath.validate();
    q.validate();
    require(q.splitting > 0.0, "bitflip_kernel: splitting must be > 0");
    require(q.time > 0.0, "bitflip_kernel: time must be > 0");
    if (bath.coupling_strength == 0.0) {
        return {};
    }
    check_infrared(bath);

    const ThermalSpectrum weight{bath.spectral_exponent, bath.cutoff_frequency, bath.temperature};
    const double t = q.time;
    const double delta = q.splitting;
    const double k_scale = q.separation / bath.sound_speed;
    // 4 sin^2((w-D)t/2) / (w-D)^2 = t^2 sinc^2((w-D)t/2): finite at the resonance.
    auto integrand = [&](double w) {
        const double s = sinc(0.5 * (w - delta) * t);
        return weight(w) * t * t * s * s * sinc(w * k_scale);
    };
    const double upper = opts.upper_cutoff * bath.cutoff_frequency + delta;
    const double width = panel_width(bath, q.separation, t);
    const auto pts = panel_breakpoints(0.0, upper, delta, width);
    auto out = scaled(quad::integrate(integrand, pts, opts.quadrature), bath.coupling_strength);

    const double lo = std::max(0.0, delta - 10.0 / t);
    const double hi = std::min(upper, delta + 10.0 / t);
    const auto window_pts = panel_breakpoints(lo, hi, delta, width);
    const auto window = quad::integrate(integrand, window_pts, opts.quadrature);
    const double total = out.value.real() / bath.coupling_strength;
    out.resonance_dominated = total > 0.0 && window.value > 0.999 * total;
    return out;
}

double effective_zz_excised(const BathSpec& bath, double separation, double splitting, double width,
                            const KernelOptions& opts) {
    bath.validate();
    require(std::isfinite(separation) && separation >= 0.0, "effective_zz_coupling: separation must be >= 0");
    require(splitting > 0.0, "effective_zz_excised: splitting must be > 0");
    require(width > 0.0 && width < splitting, "effective_zz_excised: excision width must lie in (0, splitting)");
    if (bath.coupling_strength == 0.0) {
        return 0.0;
    }

    const double k_scale = separation / bath.sound_speed;
    const double s = bath.spectral_exponent;
    const double wc = bath.cutoff_frequency;
    // The excised window is a panel of its own on which the integrand is zero.
    // Compare against the breakpoints themselves so rounding cannot leak into neighbours.
    const double gap_lo = splitting - width;
    const double gap_hi = splitting + width;
    auto integrand = [&](double w) {
        if (w > gap_lo && w < gap_hi) {
            return 0.0;
        }
        return std::pow(w, s) * std::exp(-w / wc) * 2.0 * w / ((w - splitting) * (w + splitting)) *
               sinc(w * k_scale);
    };

    const double upper = opts.upper_cutoff * wc + splitting;
    const double grid = panel_width(bath, separation, 0.0);
    const double near = std::min(grid, splitting);

    // Geometric refinement toward each excision edge, then a regular grid outward.
    std::vector<double> offsets{width};
    while (offsets.back() * 2.0 < near) {
        offsets.push_back(offsets.back() * 2.0);
    }
    const double reach = offsets.back() * 2.0;

    std::vector<double> pts;
    if (splitting - reach > 0.0) {
        pts = panel_breakpoints(0.0, splitting - reach, splitting - reach, grid);
    } else {
        pts.push_back(0.0);
    }
    for (auto it = offsets.rbegin(); it + 1 != offsets.rend(); ++it) {
        if (splitting - *it > pts.back()) {
            pts.push_back(splitting - *it);
        }
    }
    pts.push_back(gap_lo);
    pts.push_back(gap_hi);
    for (auto it = offsets.begin() + 1; it != offsets.end(); ++it) {
        pts.push_back(splitting + *it);
    }
    const auto far = panel_breakpoints(splitting + reach, upper, splitting + reach, grid);
    pts.insert(pts.end(), far.begin(), far.end());

    quad::Options qopts = opts.quadrature;
    qopts.rel_tol = std::min(qopts.rel_tol, 1e-10);
    qopts.abs_tol = std::min(qopts.abs_tol, 1e-12);
    return bath.coupling_strength * quad::integrate(integrand, pts, qopts).value;
}

double effective_zz_coupling(const BathSpec& bath, double separation, double splitting,
                             const KernelOptions& opts) {
    bath.validate();
    require(std::isfinite(separation) && separation >= 0.0, "effective_zz_coupling: separation must be >= 0");
    require(std::isfinite(splitting) && splitting >= 0.0, "effective_zz_coupling: splitting must be >= 0");
    if (bath.coupling_strength == 0.0) {
        return 0.0;
    }

    if (splitting == 0.0) {
        if (bath.spectral_exponent <= 0.0) {
            throw DomainError("effective_zz_coupling: integral of J(w)/w diverges for spectral_exponent = 0");
        }
        const double k_scale = separation / bath.sound_speed;
        const double s = bath.spectral_exponent;
        const double wc = bath.cutoff_frequency;
        auto integrand = [&](double w) { return std::pow(w, s - 1.0) * std::exp(-w / wc) * 2.0 * sinc(w * k_scale); };
        const auto pts = panel_breakpoints(0.0, opts.upper_cutoff * wc, 0.0, panel_width(bath, separation, 0.0));
        quad::Options qopts = opts.quadrature;
        qopts.rel_tol = std::min(qopts.rel_tol, 1e-10);
        qopts.abs_tol = std::min(qopts.abs_tol, 1e-12);
        return bath.coupling_strength * quad::integrate(integrand, pts, qopts).value;
    }

    // I(eps) = PV + a eps + b eps^3 + ...; widths step by a factor of 10.
    const double i1 = effective_zz_excised(bath, separation, splitting, 1e-2 * splitting, opts);
    const double i2 = effective_zz_excised(bath, separation, splitting, 1e-3 * splitting, opts);
    const double i3 = effective_zz_excised(bath, separation, splitting, 1e-4 * splitting, opts);
    const double r12 = (10.0 * i2 - i1) / 9.0;
    const double r23 = (10.0 * i3 - i2) / 9.0;
    const double pv = (1000.0 * r23 - r12) / 999.0;

    const double scale = std::max({std::abs(i1), std::abs(i2), std::abs(i3)});
    const double tol = 1e-6 * scale + 10.0 * opts.quadrature.abs_tol;
    if (!(std::abs(r23 - r12) <= tol)) {
        std::ostringstream msg;
        msg << "effective_zz_coupling: Richardson extrapolation did not converge (estimates " << r12 << ", "
            << r23 << ")";
        throw ConvergenceError(msg.str(), r12, r23);
    }
    return pv;
}

}  // namespace sbnoise
