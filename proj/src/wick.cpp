#include "sbnoise/wick.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "sbnoise/errors.hpp"
#include "sbnoise/parallel.hpp"
#include "sbnoise/quadrature.hpp"

namespace sbnoise {

namespace {

class ComplexSum {
public:
    void add(std::complex<double> v) {
        re_.add(v.real());
        im_.add(v.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    quad::CompensatedSum re_;
    quad::CompensatedSum im_;
};

// Depth-first enumeration of the perfect matchings of the slots still marked free.
// Slot a is always the lowest free slot, so each matching is visited once.
class MatchingWalker {
public:
    MatchingWalker(const Eigen::MatrixXcd& pair, std::size_t slots) : pair_(pair), free_(slots, true) {}

    void claim(std::size_t a) { free_[a] = false; }

    void walk(std::complex<double> product, std::size_t remaining, ComplexSum& sum, std::uint64_t& count) {
        if (remaining == 0) {
            sum.add(product);
            ++count;
            return;
        }
        std::size_t a = 0;
        while (!free_[a]) ++a;
        free_[a] = false;
        for (std::size_t b = a + 1; b < free_.size(); ++b) {
            if (!free_[b]) continue;
            free_[b] = false;
            walk(product * pair_(a, b), remaining - 2, sum, count);
            free_[b] = true;
        }
        free_[a] = true;
    }

private:
    const Eigen::MatrixXcd& pair_;
    std::vector<bool> free_;
};

}  // namespace

void ErrorPattern::validate(std::size_t register_size, std::size_t max_order) const {
    if (qubits.empty()) {
        throw DomainError("error pattern must act on at least one qubit");
    }
    if (max_order > kMaxPatternOrder) {
        throw CapacityError("pattern order limit cannot exceed " + std::to_string(kMaxPatternOrder));
    }
    if (qubits.size() > max_order) {
        std::ostringstream msg;
        msg << "error pattern of order " << qubits.size() << " exceeds the limit " << max_order << " ("
            << matching_count(std::min(qubits.size(), std::size_t{16})) << " matchings)";
        throw CapacityError(msg.str());
    }
    std::set<std::size_t> seen;
    for (auto q : qubits) {
        if (q >= register_size) {
            throw DomainError("error pattern references qubit " + std::to_string(q) + " but the register has " +
                              std::to_string(register_size));
        }
        if (!seen.insert(q).second) {
            throw DomainError("error pattern repeats qubit " + std::to_string(q));
        }
    }
}

std::uint64_t matching_count(std::size_t n) {
    if (n > 16) {
        throw CapacityError("matching count overflows 64 bits beyond n = 16");
    }
    std::uint64_t r = 1;
    for (std::uint64_t k = 3; k < 2 * n; k += 2) {
        r *= k;
    }
    return r;
}

double stirling_matching_count(std::size_t n) {
    const double x = static_cast<double>(n);
    return std::numbers::sqrt2 * std::exp(x * std::log(2.0 * x / std::numbers::e));
}

MomentValue gaussian_moment_full(const ContractionMatrix& c, const ErrorPattern& pattern, const MomentOptions& opts) {
    pattern.validate(c.size(), opts.max_order);
    const std::size_t n = pattern.order();
    const std::size_t slots = 2 * n;

    // Slot 2i holds phi^dag_{j_i} = -phi_{j_i}, slot 2i+1 holds phi_{j_i}.
    // <x_a x_b> = s_a s_b <phi phi> = -s_a s_b C.
    Eigen::MatrixXcd pair = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(slots), static_cast<Eigen::Index>(slots));
    auto sign = [](std::size_t a) { return a % 2 == 0 ? -1.0 : 1.0; };
    for (std::size_t a = 0; a < slots; ++a) {
        for (std::size_t b = a + 1; b < slots; ++b) {
            const auto qa = pattern.qubits[a / 2];
            const auto qb = pattern.qubits[b / 2];
            const auto entry = opts.reverse_ordering ? c(qb, qa) : c(qa, qb);
            pair(a, b) = -sign(a) * sign(b) * entry;
        }
    }

    // Partition on the partner of slot 0.
    const std::size_t parts = slots - 1;
    std::vector<std::complex<double>> partial(parts);
    std::vector<std::uint64_t> counts(parts, 0);
    parallel_for(parts, opts.threads, [&](std::size_t i) {
        const std::size_t b = i + 1;
        MatchingWalker walker(pair, slots);
        walker.claim(0);
        walker.claim(b);
        ComplexSum sum;
        walker.walk(pair(0, b), slots - 2, sum, counts[i]);
        partial[i] = sum.value();
    });

    ComplexSum total;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < parts; ++i) {
        total.add(partial[i]);
        count += counts[i];
    }
    if (count != matching_count(n)) {
        throw Error("internal: enumerated " + std::to_string(count) + " matchings, expected " +
                    std::to_string(matching_count(n)));
    }
    return {total.value(), count};
}

double gaussian_moment(const ContractionMatrix& c, const ErrorPattern& pattern, const MomentOptions& opts) {
    return gaussian_moment_full(c, pattern, opts).value.real();
}

std::vector<AmplitudeReport> independence_deviation(const ContractionMatrix& c,
                                                    const std::vector<ErrorPattern>& patterns,
                                                    const DeviationOptions& opts) {
    if (!(opts.delta >= 0.0) || !std::isfinite(opts.delta)) {
        throw DomainError("independence tolerance delta must be finite and >= 0");
    }
    std::vector<AmplitudeReport> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) {
        AmplitudeReport r;
        r.pattern = p;
        const auto moment = gaussian_moment_full(c, p, opts.moment);
        r.amplitude_sq = moment.value.real();
        r.matchings = moment.matchings;
        r.independent_product = 1.0;
        for (auto q : p.qubits) {
            const double single = gaussian_moment(c, ErrorPattern{{q}, p.channel}, opts.moment);
            if (!(single > 0.0)) {
                throw DomainError("single-qubit amplitude of qubit " + std::to_string(q) +
                                  " is zero; enhancement ratio undefined (t = " + std::to_string(c.time()) + ")");
            }
            r.independent_product *= single;
        }
        r.enhancement = r.amplitude_sq / r.independent_product;
        r.violates_independence = std::abs(r.enhancement - 1.0) > opts.delta;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace sbnoise
