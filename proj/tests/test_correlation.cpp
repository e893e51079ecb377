#include "sbnoise/correlation.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sbnoise/errors.hpp"
#include "support/mode_sums.hpp"

namespace sbnoise {
namespace {

using std::numbers::pi;

BathSpec ohmic(double temperature = 0.0) {
    BathSpec b;
    b.temperature = temperature;
    return b;
}

QubitLayout collinear(std::size_t n, double spacing, double splitting = 1.0) {
    QubitLayout l;
    l.splitting = splitting;
    for (std::size_t j = 0; j < n; ++j) l.positions.emplace_back(spacing * static_cast<double>(j), 0.0, 0.0);
    return l;
}

TEST(ContractionMatrix, SingleQubitIsSelfKernel) {
    const auto b = ohmic(0.3);
    const auto c = build_contraction_matrix(b, collinear(1, 0.0), 5.0, Channel::DephasingZ);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c(0, 0), dephasing_kernel(b, {0.0, 5.0, 0.0}).value);
}

TEST(ContractionMatrix, CoincidentQubitsAreFullyCorrelated) {
    QubitLayout l{{Vec3(1, 2, 3), Vec3(1, 2, 3)}, 1.0};
    for (auto ch : {Channel::DephasingZ, Channel::BitflipZ, Channel::BitflipY}) {
        const auto c = build_contraction_matrix(ohmic(0.2), l, 7.0, ch);
        EXPECT_EQ(c(0, 1), c(0, 0));
        EXPECT_EQ(correlation_ratio(c, 0, 1), 1.0);
    }
}

TEST(ContractionMatrix, HalfWavelengthSpacingIsNearlyDiagonal) {
    // Delta d / c = pi; the oracle is a discretized mode sum for each distinct distance.
    const auto b = ohmic();
    const double t = 200.0;
    const auto c = build_contraction_matrix(b, collinear(3, pi), t, Channel::BitflipZ);
    const testing::ModeBath mb{1.0, 1.0, 1.0, 1.0, 0.0};
    const double self = testing::mode_sum_contraction(mb, 0.0, t, 1.0, 100'000, 512, 41.0).real();
    for (int k = 1; k <= 2; ++k) {
        const double oracle = testing::mode_sum_contraction(mb, k * pi, t, 1.0, 100'000, 512, 41.0).real() / self;
        EXPECT_NEAR(std::abs(oracle), 0.0, 0.05) << k;
        EXPECT_NEAR(correlation_ratio(c, 0, k), oracle, 5e-3) << k;
    }
}

TEST(ContractionMatrix, BitflipYSharesTheZKernel) {
    const auto l = collinear(3, 0.8);
    const auto z = build_contraction_matrix(ohmic(0.1), l, 9.0, Channel::BitflipZ);
    const auto y = build_contraction_matrix(ohmic(0.1), l, 9.0, Channel::BitflipY);
    EXPECT_EQ(z.entries(), y.entries());
    EXPECT_EQ(y.channel(), Channel::BitflipY);
}

TEST(ContractionMatrix, PreconditionsEnforced) {
    EXPECT_THROW(build_contraction_matrix(ohmic(), collinear(2, 1.0, 0.0), 1.0, Channel::BitflipZ), DomainError);
    EXPECT_THROW(build_contraction_matrix(ohmic(), collinear(2, 1.0), -1.0, Channel::DephasingZ), DomainError);
    EXPECT_THROW(build_contraction_matrix(ohmic(), QubitLayout{}, 1.0, Channel::DephasingZ), DomainError);
    QubitLayout bad{{Vec3(NAN, 0, 0)}, 1.0};
    EXPECT_THROW(build_contraction_matrix(ohmic(), bad, 1.0, Channel::DephasingZ), DomainError);
}

TEST(ContractionMatrix, KernelFailureNamesThePair) {
    BuildOptions opts;
    opts.kernel.quadrature.max_intervals = 4;
    try {
        build_contraction_matrix(ohmic(), collinear(2, 3.0), 500.0, Channel::DephasingZ, opts);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_NE(std::string(e.what()).find("pair (0,"), std::string::npos) << e.what();
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(ContractionMatrix, ConstructorChecksInvariants) {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 0.5, 0.4, 1.0;
    EXPECT_THROW(ContractionMatrix(m, 1.0, Channel::DephasingZ, 0.0), DomainError);
    m << -1.0, 0.0, 0.0, 1.0;
    EXPECT_THROW(ContractionMatrix(m, 1.0, Channel::DephasingZ, 0.0), DomainError);
    m << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(ContractionMatrix(m, 1.0, Channel::DephasingZ, 0.0), DomainError);
    m << std::complex<double>(1.0, 0.1), 0.0, 0.0, 1.0;
    EXPECT_THROW(ContractionMatrix(m, 1.0, Channel::DephasingZ, 0.0), DomainError);
    m << 1.0, 0.5, 0.5, 1.0;
    EXPECT_NO_THROW(ContractionMatrix(m, 1.0, Channel::DephasingZ, 0.0));
}

TEST(ContractionMatrix, PermutationEquivariance) {
    QubitLayout l{{Vec3(0, 0, 0), Vec3(1.3, 0, 0), Vec3(0, 2.1, 0.4)}, 1.0};
    QubitLayout p{{l.positions[2], l.positions[0], l.positions[1]}, 1.0};
    const auto a = build_contraction_matrix(ohmic(0.2), l, 6.0, Channel::BitflipZ);
    const auto b = build_contraction_matrix(ohmic(0.2), p, 6.0, Channel::BitflipZ);
    const std::size_t perm[] = {2, 0, 1};
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(b(j, m), a(perm[j], perm[m]));
    }
}

TEST(ContractionMatrix, TranslationInvariance) {
    QubitLayout l{{Vec3(0, 0, 0), Vec3(1.3, 0, 0), Vec3(0, 2.1, 0.4)}, 1.0};
    QubitLayout shifted = l;
    for (auto& p : shifted.positions) p += Vec3(10.25, -3.5, 7.0);
    const auto a = build_contraction_matrix(ohmic(0.2), l, 6.0, Channel::DephasingZ);
    const auto b = build_contraction_matrix(ohmic(0.2), shifted, 6.0, Channel::DephasingZ);
    EXPECT_LE((a.entries() - b.entries()).cwiseAbs().maxCoeff(), 1e-12 * a.entries().cwiseAbs().maxCoeff());
}

TEST(ContractionMatrix, ThreadCountDoesNotChangeResult) {
    const auto l = collinear(5, 0.7);
    BuildOptions one;
    BuildOptions many;
    many.threads = 4;
    const auto a = build_contraction_matrix(ohmic(0.2), l, 12.0, Channel::BitflipZ, one);
    const auto b = build_contraction_matrix(ohmic(0.2), l, 12.0, Channel::BitflipZ, many);
    EXPECT_EQ(a.entries(), b.entries());
}

TEST(CorrelationRatio, BasicValues) {
    const auto c = build_contraction_matrix(ohmic(0.3), collinear(3, 1.0), 4.0, Channel::DephasingZ);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(correlation_ratio(c, j, j), 1.0);
    const auto full = ContractionMatrix::fully_correlated(4, 0.37);
    EXPECT_DOUBLE_EQ(correlation_ratio(full, 1, 3), 1.0);
    EXPECT_THROW(correlation_ratio(c, 0, 3), DomainError);
}

TEST(CorrelationRatio, UndefinedAtTimeZero) {
    const auto c = build_contraction_matrix(ohmic(), collinear(2, 1.0), 0.0, Channel::DephasingZ);
    EXPECT_THROW(correlation_ratio(c, 0, 1), DomainError);
}

TEST(CorrelationRatio, BitflipZeroAtHalfWavelength) {
    const auto c = build_contraction_matrix(ohmic(), collinear(2, pi), 400.0, Channel::BitflipZ);
    EXPECT_NEAR(correlation_ratio(c, 0, 1), 0.0, 0.05);
}

TEST(CorrelationRatio, BitflipEnvelopeDecaysInverselyWithTravelTime) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        BathSpec b;
        b.sound_speed = 0.5 + u(rng);
        b.cutoff_frequency = 1.0 + u(rng);
        const double delta = 0.5 + u(rng);
        const double phase = 2.0 * pi + 20.0 * u(rng);  // Delta R / c
        const double r = phase * b.sound_speed / delta;
        const double t = 100.0 * std::max(1.0 / b.cutoff_frequency, r / b.sound_speed);
        const auto c = build_contraction_matrix(b, QubitLayout{{Vec3::Zero(), Vec3(r, 0, 0)}, delta}, t,
                                                Channel::BitflipZ);
        EXPECT_LE(std::abs(correlation_ratio(c, 0, 1)), 1.1 / phase) << "trial " << trial;
    }
}

TEST(ClassifyRegime, DiagonalIsIndependent) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
    const auto cls = classify_regime(ContractionMatrix(m, 1.0, Channel::DephasingZ, 0.0));
    ASSERT_EQ(cls.pairs.size(), 6u);
    for (const auto& p : cls.pairs) EXPECT_EQ(p.regime, Regime::Independent);
    EXPECT_EQ(cls.global, Regime::Independent);
}

TEST(ClassifyRegime, FullyCorrelatedLimit) {
    const auto cls = classify_regime(ContractionMatrix::fully_correlated(4, 2.5));
    for (const auto& p : cls.pairs) EXPECT_EQ(p.regime, Regime::Correlated);
    EXPECT_EQ(cls.global, Regime::Correlated);
}

TEST(ClassifyRegime, TwoDistantClusters) {
    // Intra-cluster distance 0.01, inter-cluster ~ 60 with Delta = c = 1.
    const double t = 400.0;
    QubitLayout l{{Vec3(0, 0, 0), Vec3(0.01, 0, 0), Vec3(60, 0, 0), Vec3(60.01, 0, 0)}, 1.0};
    const auto c = build_contraction_matrix(ohmic(), l, t, Channel::BitflipZ);
    const auto cls = classify_regime(c);

    // Expected labels from mode-sum kernels at the two distances.
    const testing::ModeBath mb{1.0, 1.0, 1.0, 1.0, 0.0};
    const double self = testing::mode_sum_contraction(mb, 0.0, t, 1.0, 100'000, 256, 41.0).real();
    const double near = testing::mode_sum_contraction(mb, 0.01, t, 1.0, 100'000, 256, 41.0).real() / self;
    const double far = testing::mode_sum_contraction(mb, 60.0, t, 1.0, 100'000, 256, 41.0).real() / self;
    ASSERT_GT(near, 0.9);
    ASSERT_LT(std::abs(far), 0.1);
    for (const auto& p : cls.pairs) {
        const bool same_cluster = p.j / 2 == p.m / 2;
        EXPECT_EQ(p.regime, same_cluster ? Regime::Correlated : Regime::Independent) << p.j << "," << p.m;
        EXPECT_NEAR(p.ratio, same_cluster ? near : far, 0.02);
    }
    EXPECT_EQ(cls.global, Regime::Correlated);
}

TEST(ClassifyRegime, ThresholdsValidated) {
    const auto c = ContractionMatrix::fully_correlated(2, 1.0);
    EXPECT_THROW(classify_regime(c, {0.9, 0.1}), DomainError);
    EXPECT_THROW(classify_regime(c, {0.0, 0.5}), DomainError);
    EXPECT_THROW(classify_regime(c, {0.1, 1.0}), DomainError);
}

TEST(Channel, NamesRoundTrip) {
    for (auto ch : {Channel::DephasingZ, Channel::BitflipZ, Channel::BitflipY}) {
        EXPECT_EQ(parse_channel(to_string(ch)), ch);
    }
    EXPECT_THROW(parse_channel("bitflip-x"), DomainError);
}

}  // namespace
}  // namespace sbnoise
