#include "sbnoise/validation/monte_carlo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sbnoise::validation {

MonteCarloMoment squared_product_moment(const Eigen::MatrixXd& covariance, const std::vector<std::size_t>& qubits,
                                        std::size_t samples, std::uint64_t seed) {
    if (covariance.rows() != covariance.cols() || samples < 2) {
        throw std::invalid_argument("monte carlo moment needs a square covariance and at least two samples");
    }
    // Symmetric square root tolerates singular PSD covariances where Cholesky would not.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
    const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd factor = eig.eigenvectors() * roots.asDiagonal();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto dim = covariance.rows();
    Eigen::VectorXd z(dim);
    Eigen::VectorXd x(dim);

    // Welford accumulation of mean and variance.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 1; i <= samples; ++i) {
        for (Eigen::Index k = 0; k < dim; ++k) z(k) = normal(rng);
        x.noalias() = factor * z;
        double value = 1.0;
        for (auto q : qubits) value *= x(static_cast<Eigen::Index>(q)) * x(static_cast<Eigen::Index>(q));
        const double d = value - mean;
        mean += d / static_cast<double>(i);
        m2 += d * (value - mean);
    }
    const double variance = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(variance / static_cast<double>(samples)), samples};
}

}  // namespace sbnoise::validation
