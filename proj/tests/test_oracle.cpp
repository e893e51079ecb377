#include "sbnoise/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sbnoise/errors.hpp"

namespace sbnoise {
namespace {

using cd = std::complex<double>;
using std::numbers::pi;

FockSystem single_mode(double g, double delta = 0.0, std::size_t d = 16) {
    FockSystem s;
    s.positions = {Vec3::Zero()};
    s.splitting = delta;
    s.coupling = g;
    s.wavevectors = {Vec3(1, 0, 0)};
    s.truncation = d;
    return s;
}

double sorted_max_diff(Eigen::VectorXd a, Eigen::VectorXd b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return (a - b).cwiseAbs().maxCoeff();
}

TEST(Hamiltonian, DecoupledSpectrum) {
    auto s = single_mode(0.0, 0.8, 2);
    s.wavevectors = {Vec3(0, 1.7, 0)};
    const Eigen::MatrixXcd h = build_hamiltonian(s);
    Eigen::VectorXd expected(4);
    expected << -0.4, 0.4, 1.7 - 0.4, 1.7 + 0.4;
    EXPECT_LT(sorted_max_diff(Propagator(h).energies(), expected), 1e-13);
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Hamiltonian, DephasingConservesZ) {
    auto s = single_mode(0.4, 0.0, 6);
    const Eigen::MatrixXcd h = build_hamiltonian(s);
    const Eigen::MatrixXcd z = ops::spin_op(s, 0, 'Z');
    EXPECT_LT((h * z - z * h).cwiseAbs().maxCoeff(), 1e-14);
    s.splitting = 1.0;
    const Eigen::MatrixXcd h2 = build_hamiltonian(s);
    EXPECT_GT((h2 * z - z * h2).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Hamiltonian, InPhaseCouplingAnnihilatesSinglet) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(0, 3, 0)};  // k.(r1 - r2) = 0
    s.coupling = 0.7;
    s.wavevectors = {Vec3(2, 0, 0)};
    s.truncation = 5;
    const Eigen::MatrixXcd hsb = coupling_hamiltonian(s);
    const std::size_t db = s.bath_dimension();
    for (std::size_t b = 0; b < db; ++b) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.dimension()));
        v(static_cast<Eigen::Index>(1 * db + b)) = 1.0 / std::sqrt(2.0);   // |01>
        v(static_cast<Eigen::Index>(2 * db + b)) = -1.0 / std::sqrt(2.0);  // |10>
        EXPECT_LT((hsb * v).norm(), 1e-15);
    }
}

TEST(Hamiltonian, AnnihilationOperator) {
    const Eigen::MatrixXcd a = ops::annihilation(4);
    EXPECT_NEAR(std::abs(a(0, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(a(2, 3)), std::sqrt(3.0), 1e-15);
    const Eigen::MatrixXcd n = a.adjoint() * a;
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(n(i, i).real(), i, 1e-14);
}

TEST(Propagator, UnitaryAndEnergyConserving) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(0.4, 0, 0)};
    s.splitting = 1.1;
    s.coupling = 0.2;
    s.wavevectors = {Vec3(1.3, 0, 0), Vec3(-0.8, 0.2, 0)};
    s.truncation = 5;
    const Eigen::MatrixXcd h = build_hamiltonian(s);
    const Propagator p(h);
    const Eigen::MatrixXcd u = p.unitary(3.7);
    EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff(), 1e-12);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(u.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cd(g(rng), g(rng));
    v.normalize();
    const Eigen::VectorXcd w = p.apply(v, 3.7);
    EXPECT_NEAR(w.norm(), 1.0, 1e-12);
    EXPECT_NEAR(std::real(w.dot(h * w)), std::real(v.dot(h * v)), 1e-12);
    EXPECT_LT((w - u * v).norm(), 1e-12);
}

TEST(Evolve, InitialTimeIsIdentity) {
    const auto r = evolve(single_mode(0.3, 0.5, 8), RegisterState::superposition({"0", "1"}, {1.0, cd(0, 1)}), 0.0);
    EXPECT_NEAR(r.purity, 1.0, 1e-13);
    EXPECT_NEAR(r.free_fidelity, 1.0, 1e-13);
}

TEST(Evolve, ZeroCouplingKeepsFreeEvolution) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    s.splitting = 0.9;
    s.wavevectors = {Vec3(1, 0, 0)};
    s.truncation = 4;
    const auto r = evolve(s, RegisterState::superposition({"00", "01", "11"}, {1.0, 0.5, cd(0, 2)}), 6.3);
    EXPECT_NEAR(r.free_fidelity, 1.0, 1e-12);
    EXPECT_NEAR(r.purity, 1.0, 1e-12);
}

TEST(Evolve, SingleModeDephasingMatchesClosedForm) {
    // |rho_01| = 1/2 exp(-2 |f|^2 coth(w / 2T)),  |f|^2 = 4 (g/w)^2 sin^2(w t / 2).
    const double g = 0.3;
    for (double t : {0.7, 2.0, pi}) {
        const double f2 = 4.0 * g * g * std::pow(std::sin(t / 2.0), 2);
        const auto plus = RegisterState::superposition({"0", "1"}, {1.0, 1.0});
        const auto vac = evolve(single_mode(g, 0.0, 16), plus, t);
        EXPECT_TRUE(vac.truncation_converged);
        EXPECT_NEAR(std::abs(vac.spin_density(0, 1)), 0.5 * std::exp(-2.0 * f2), 1e-10) << t;

        auto hot = single_mode(g, 0.0, 24);
        hot.temperature = 0.5;
        const auto th = evolve(hot, plus, t);
        const double coth = 1.0 / std::tanh(1.0 / (2.0 * hot.temperature));
        EXPECT_NEAR(std::abs(th.spin_density(0, 1)), 0.5 * std::exp(-2.0 * f2 * coth), 1e-8) << t;
    }
}

TEST(Evolve, DensityMatrixIsPhysical) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(0.3, 0.2, 0)};
    s.splitting = 0.7;
    s.coupling = 0.25;
    s.wavevectors = {Vec3(1, 0, 0), Vec3(0, -1.4, 0)};
    s.truncation = 6;
    const auto r = evolve(s, RegisterState::superposition({"00", "11"}, {1.0, 1.0}), 2.5);
    EXPECT_NEAR(r.spin_density.trace().real(), 1.0, 1e-12);
    EXPECT_LT((r.spin_density - r.spin_density.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE(r.purity, 1.0 + 1e-12);
    EXPECT_GE(r.purity, 0.25 - 1e-12);
}

TEST(Evolve, UnderTruncationIsFlagged) {
    const auto r = evolve(single_mode(1.0, 0.0, 3), RegisterState::superposition({"0", "1"}, {1.0, 1.0}), pi);
    EXPECT_FALSE(r.truncation_converged);
    EXPECT_GT(r.truncation_change, 1e-8);
}

TEST(Evolve, RejectsMismatchedState) {
    EXPECT_THROW(evolve(single_mode(0.1), RegisterState::basis("00"), 1.0), DomainError);
}

TEST(FockSystem, Validation) {
    auto s = single_mode(0.1, 0.0, 4);
    s.temperature = 1.0;
    EXPECT_THROW(s.validate(), DomainError);
    s.temperature = 0.0;
    s.truncation = 1;
    EXPECT_THROW(s.validate(), DomainError);
    s.truncation = 4;
    s.wavevectors = {Vec3::Zero()};
    EXPECT_THROW(s.validate(), DomainError);
    s.wavevectors = {Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0), Vec3(4, 0, 0)};
    EXPECT_THROW(s.validate(), CapacityError);
    s.wavevectors = {Vec3(1, 0, 0)};
    s.positions.assign(4, Vec3::Zero());
    EXPECT_THROW(s.validate(), CapacityError);
}

TEST(FockSystem, ThermalTail) {
    auto s = single_mode(0.1, 0.0, 10);
    EXPECT_EQ(s.thermal_tail(), 0.0);
    s.temperature = 0.5;
    EXPECT_NEAR(s.thermal_tail(), std::exp(-20.0), 1e-20);
}

TEST(DephasingDecomposition, ExactForOppositeModes) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        FockSystem s;
        s.positions = {Vec3(0, 0, 0), Vec3(u(rng), u(rng), 0)};
        const Vec3 k(0.5 + u(rng), u(rng), 0);
        s.wavevectors = {k, -k};
        s.coupling = 0.03 * u(rng) + 0.01;
        s.truncation = 10;
        const auto r = verify_dephasing_decomposition(s, 1.0 + 3.0 * u(rng));
        EXPECT_LT(r.difference, 1e-8);
        EXPECT_LT(r.commutator_norm, 1e-12);
        EXPECT_LT(r.unitarity_error, 1e-10);
    }
}

TEST(DephasingDecomposition, ZeroTimeAndZeroCoupling) {
    FockSystem s = single_mode(0.0, 0.0, 6);
    EXPECT_LT(verify_dephasing_decomposition(s, 4.0).difference, 1e-13);
    s.coupling = 0.2;
    EXPECT_LT(verify_dephasing_decomposition(s, 0.0).difference, 1e-13);
}

TEST(DephasingDecomposition, EffectivePhaseClosedForm) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(0.5, 0, 0)};
    s.coupling = 0.2;
    s.sound_speed = 2.0;
    s.wavevectors = {Vec3(1.5, 0, 0)};
    const double w = 3.0;
    const double t = 1.3;
    const double base = std::pow(0.2 / w, 2) * (w * t - std::sin(w * t));
    // |z0 + z1 e^{-i 0.75}|^2 = 2 + 2 z0 z1 cos(0.75)
    EXPECT_NEAR(effective_phase(s, 0, t), base * (2.0 + 2.0 * std::cos(0.75)), 1e-14);
    EXPECT_NEAR(effective_phase(s, 1, t), base * (2.0 - 2.0 * std::cos(0.75)), 1e-14);
    const cd f = displacement_amplitude(s, 0, 1, t);
    EXPECT_NEAR(std::norm(f), std::pow(0.2 / w, 2) * 4.0 * std::pow(std::sin(w * t / 2.0), 2), 1e-15);
}

TEST(DephasingDecomposition, RequiresPureDephasing) {
    EXPECT_THROW(verify_dephasing_decomposition(single_mode(0.1, 0.5, 4), 1.0), DomainError);
}

TEST(CanonicalTransformation, ZeroCouplingIsExact) {
    auto s = single_mode(0.0, 1.0, 4);
    s.wavevectors = {Vec3(1.5, 0, 0)};
    EXPECT_LT(canonical_infidelity(s, 5.0), 1e-14);
}

TEST(CanonicalTransformation, GeneratorCancelsCouplingAtFirstOrder) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(0.7, 0, 0)};
    s.splitting = 1.0;
    s.coupling = 0.05;
    s.wavevectors = {Vec3(1.5, 0, 0)};
    s.truncation = 5;
    const Eigen::MatrixXcd g = canonical_generator(s);
    EXPECT_LT((g + g.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::MatrixXcd h0 = system_hamiltonian(s) + bath_hamiltonian(s);
    const Eigen::MatrixXcd residual = coupling_hamiltonian(s) + h0 * g - g * h0;
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CanonicalTransformation, InfidelityScalesAsFourthPower) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(0.7, 0, 0)};
    s.splitting = 1.0;
    s.wavevectors = {Vec3(1.5, 0, 0)};
    s.truncation = 6;
    CanonicalOptions opts;
    opts.base_coupling = 0.002;
    const auto r = verify_canonical_transformation(s, 5.0, opts);
    EXPECT_NEAR(r.exponent, 4.0, 0.2);
    EXPECT_TRUE(r.doubling_consistent);
    EXPECT_LT(r.generator_residual, 1e-12);
}

TEST(CanonicalTransformation, PreconditionsEnforced) {
    auto s = single_mode(0.01, 1.0, 4);
    s.wavevectors = {Vec3(1.05, 0, 0)};
    EXPECT_THROW(canonical_generator(s), DomainError);
    s.splitting = 0.0;
    EXPECT_THROW(canonical_generator(s), DomainError);
    s.splitting = 1.0;
    s.wavevectors = {Vec3(1.5, 0, 0)};
    CanonicalOptions bad;
    bad.factors = {1.0};
    EXPECT_THROW(verify_canonical_transformation(s, 1.0, bad), FitError);
    bad.factors = {2.0, 1.0};
    EXPECT_THROW(verify_canonical_transformation(s, 1.0, bad), FitError);
}

FockSystem long_wavelength_pair(double g) {
    FockSystem s;
    s.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    s.coupling = g;
    s.sound_speed = 1e7;
    s.wavevectors = {Vec3(1e-7, 0, 0)};
    s.truncation = 30;
    return s;
}

TEST(DfsDecoupling, SingletIsProtected) {
    const auto r = verify_dfs_decoupling(long_wavelength_pair(0.5), RegisterState::superposition({"01", "10"},
                                                                                               {1.0, -1.0}),
                                         4.0);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-8);
    EXPECT_NEAR(r.purity, 1.0, 1e-8);
    EXPECT_EQ(r.collective_z_residual, 0.0);
    EXPECT_LE(r.phase_spread, kLongWavelengthPhaseTolerance);
}

TEST(DfsDecoupling, BellStateOutsideSubspaceDecoheres) {
    const auto r =
        verify_dfs_decoupling(long_wavelength_pair(0.5), RegisterState::superposition({"00", "11"}, {1.0, 1.0}), 4.0);
    EXPECT_TRUE(r.truncation_converged);
    EXPECT_LT(r.purity, 1.0 - 1e-3);
    EXPECT_NEAR(r.collective_z_residual, 2.0, 1e-14);
}

TEST(DfsDecoupling, ComputationalBasisStateStaysPure) {
    // A Z eigenstate only picks up a phase and a bath displacement that does not depend on anything else.
    const auto r = verify_dfs_decoupling(long_wavelength_pair(0.5), RegisterState::basis("00"), 4.0);
    EXPECT_NEAR(r.purity, 1.0, 1e-10);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-10);
}

TEST(DfsDecoupling, ZeroCoupling) {
    const auto r = verify_dfs_decoupling(long_wavelength_pair(0.0), RegisterState::basis("10"), 4.0);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-14);
}

TEST(DfsDecoupling, ShortWavelengthRejected) {
    auto s = long_wavelength_pair(0.5);
    s.wavevectors = {Vec3(1.0, 0, 0)};
    s.sound_speed = 1.0;
    EXPECT_THROW(verify_dfs_decoupling(s, RegisterState::basis("01"), 1.0), DomainError);
    s = long_wavelength_pair(0.5);
    s.splitting = 0.2;
    EXPECT_THROW(verify_dfs_decoupling(s, RegisterState::basis("01"), 1.0), DomainError);
}

}  // namespace
}  // namespace sbnoise
