#include "sbnoise/wick.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sbnoise/errors.hpp"
#include "support/mode_sums.hpp"

namespace sbnoise {
namespace {

ContractionMatrix real_matrix(const Eigen::MatrixXd& m) {
    return ContractionMatrix(m.cast<std::complex<double>>(), 1.0, Channel::DephasingZ, 0.0);
}

Eigen::MatrixXd random_psd(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = g(rng);
    return b * b.transpose() / static_cast<double>(n);
}

// Hafnian by brute force over all permutations: haf(A) = sum_sigma prod A / (2^n n!).
double permutation_hafnian(const Eigen::MatrixXd& a) {
    const auto size = static_cast<std::size_t>(a.rows());
    std::vector<std::size_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0;
    do {
        double prod = 1.0;
        for (std::size_t i = 0; i < size; i += 2) prod *= a(perm[i], perm[i + 1]);
        sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    double norm = 1.0;
    for (std::size_t k = 1; k <= size / 2; ++k) norm *= 2.0 * static_cast<double>(k);
    return sum / norm;
}

Eigen::MatrixXd slot_matrix(const Eigen::MatrixXd& c, const std::vector<std::size_t>& q) {
    const auto size = static_cast<Eigen::Index>(2 * q.size());
    Eigen::MatrixXd a(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = 0; j < size; ++j) a(i, j) = c(q[i / 2], q[j / 2]);
    }
    return a;
}

TEST(MatchingCount, DoubleFactorialValues) {
    const std::uint64_t expected[] = {1, 1, 3, 15, 105, 945, 10395, 135135, 2027025};
    for (std::size_t n = 0; n <= 8; ++n) EXPECT_EQ(matching_count(n), expected[n]) << n;
}

TEST(MatchingCount, StirlingFormWithinFivePercentAtEight) {
    EXPECT_NEAR(static_cast<double>(matching_count(8)) / stirling_matching_count(8), 1.0, 0.05);
}

TEST(GaussianMoment, DiagonalFactorizes) {
    Eigen::MatrixXd c = Eigen::Vector4d(0.3, 1.7, 2.0, 0.9).asDiagonal();
    const auto cm = real_matrix(c);
    EXPECT_DOUBLE_EQ(gaussian_moment(cm, {{0, 2, 3}}), 0.3 * 2.0 * 0.9);
    EXPECT_DOUBLE_EQ(gaussian_moment(cm, {{1}}), 1.7);
    EXPECT_DOUBLE_EQ(gaussian_moment(cm, {{3, 0, 1, 2}}), 0.3 * 1.7 * 2.0 * 0.9);
}

TEST(GaussianMoment, FullyCorrelatedPairingFactor) {
    const double c0 = 0.7;
    const auto c = ContractionMatrix::fully_correlated(4, c0);
    EXPECT_NEAR(gaussian_moment(c, {{0, 1}}), 3.0 * c0 * c0, 1e-15);
    EXPECT_NEAR(gaussian_moment(c, {{0, 1, 2}}), 15.0 * c0 * c0 * c0, 1e-14);
}

TEST(GaussianMoment, MatchesPermutationHafnian) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = random_psd(4, rng);
        std::vector<std::size_t> q{0, 1, 2, 3};
        std::shuffle(q.begin(), q.end(), rng);
        q.resize(3);
        const double oracle = permutation_hafnian(slot_matrix(c, q));
        EXPECT_NEAR(gaussian_moment(real_matrix(c), {q}), oracle, 1e-12 * std::abs(oracle)) << trial;
    }
}

TEST(GaussianMoment, OrderingConventionIsImmaterial) {
    std::mt19937_64 rng(6);
    MomentOptions reversed;
    reversed.reverse_ordering = true;
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = real_matrix(random_psd(5, rng));
        const ErrorPattern p{{4, 0, 2, 1}};
        EXPECT_NEAR(gaussian_moment(c, p), gaussian_moment(c, p, reversed), 1e-13 * gaussian_moment(c, p));
    }
}

TEST(GaussianMoment, PatternPermutationInvariance) {
    std::mt19937_64 rng(7);
    const auto c = real_matrix(random_psd(5, rng));
    const double a = gaussian_moment(c, {{0, 1, 3, 4}});
    const double b = gaussian_moment(c, {{4, 3, 0, 1}});
    EXPECT_NEAR(a, b, 1e-13 * a);
}

TEST(GaussianMoment, ScalingIsExactPowerOfLambda) {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd c = random_psd(6, rng);
    const ErrorPattern p{{0, 1, 2, 3, 4}};
    const double base = gaussian_moment(real_matrix(c), p);
    EXPECT_EQ(gaussian_moment(real_matrix(2.0 * c), p), 32.0 * base);
    EXPECT_NEAR(gaussian_moment(real_matrix(1.7 * c), p), std::pow(1.7, 5) * base, 1e-13 * base * 15.0);
}

TEST(GaussianMoment, ThreadCountReproducible) {
    std::mt19937_64 rng(9);
    const auto c = real_matrix(random_psd(8, rng));
    ErrorPattern p{{0, 1, 2, 3, 4, 5, 6, 7}};
    MomentOptions many;
    many.threads = 4;
    const auto a = gaussian_moment_full(c, p);
    const auto b = gaussian_moment_full(c, p, many);
    EXPECT_EQ(a.matchings, 2027025u);
    EXPECT_NEAR(a.value.real(), b.value.real(), 1e-13 * std::abs(a.value.real()));
}

TEST(GaussianMoment, NonNegativeForPsdInput) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = real_matrix(random_psd(6, rng));
        EXPECT_GE(gaussian_moment(c, {{0, 2, 4, 5}}), 0.0);
    }
}

TEST(ErrorPattern, Validation) {
    const auto c = ContractionMatrix::fully_correlated(10, 1.0);
    EXPECT_THROW(gaussian_moment(c, {{0, 1, 2, 3, 4, 5, 6, 7, 8}}), CapacityError);
    EXPECT_THROW(gaussian_moment(c, {{0, 0}}), DomainError);
    EXPECT_THROW(gaussian_moment(c, {{0, 10}}), DomainError);
    EXPECT_THROW(gaussian_moment(c, {{}}), DomainError);
    MomentOptions small;
    small.max_order = 3;
    EXPECT_THROW(gaussian_moment(c, {{0, 1, 2, 3}}, small), CapacityError);
}

TEST(IndependenceDeviation, DiagonalGivesUnitRatios) {
    Eigen::MatrixXd c = Eigen::Vector4d(0.3, 1.7, 2.0, 0.9).asDiagonal();
    const auto reports = independence_deviation(real_matrix(c), {{{0, 1}}, {{1, 2, 3}}, {{0, 1, 2, 3}}});
    for (const auto& r : reports) {
        EXPECT_DOUBLE_EQ(r.enhancement, 1.0);
        EXPECT_FALSE(r.violates_independence);
    }
}

TEST(IndependenceDeviation, FullyCorrelatedFourthOrder) {
    const auto r = independence_deviation(ContractionMatrix::fully_correlated(4, 0.4), {{{0, 1, 2, 3}}}).front();
    EXPECT_NEAR(r.enhancement, 105.0, 1e-12);
    EXPECT_EQ(r.matchings, 105u);
    EXPECT_TRUE(r.violates_independence);
}

TEST(IndependenceDeviation, ZeroSingleAmplitudeRejected) {
    Eigen::MatrixXd c = Eigen::Vector3d(1.0, 0.0, 1.0).asDiagonal();
    EXPECT_THROW(independence_deviation(real_matrix(c), {{{0, 1}}}), DomainError);
    DeviationOptions bad;
    bad.delta = -1.0;
    EXPECT_THROW(independence_deviation(real_matrix(Eigen::Matrix3d::Identity()), {{{0, 1}}}, bad), DomainError);
}

TEST(IndependenceDeviation, WideBitflipLayoutFromModeSums) {
    // Spacing with Delta a / c = 4 pi, t = 200; the matrix is assembled from mode sums.
    const testing::ModeBath mb{1.0, 1.0, 1.0, 1.0, 0.0};
    const double a = 4.0 * std::numbers::pi;
    const double t = 200.0;
    double kernel[4];
    for (int k = 0; k < 4; ++k) kernel[k] = testing::mode_sum_contraction(mb, k * a, t, 1.0, 100'000, 512, 41.0).real();
    Eigen::MatrixXd c(4, 4);
    for (int j = 0; j < 4; ++j) {
        for (int m = 0; m < 4; ++m) c(j, m) = kernel[std::abs(j - m)];
    }
    std::vector<ErrorPattern> patterns;
    for (unsigned mask = 1; mask < 16; ++mask) {
        ErrorPattern p;
        for (std::size_t q = 0; q < 4; ++q) {
            if (mask & (1U << q)) p.qubits.push_back(q);
        }
        patterns.push_back(p);
    }
    for (const auto& r : independence_deviation(real_matrix(c), patterns)) {
        EXPECT_GE(r.enhancement, 0.9);
        EXPECT_LE(r.enhancement, 1.1);
    }
}

}  // namespace
}  // namespace sbnoise
