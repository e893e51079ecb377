#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sbnoise::validation {

struct MonteCarloMoment {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

// Sample estimate of E[prod_i x_{q_i}^2] for a real Gaussian vector x with the
// given covariance. Independent of the matching enumeration it is used to check.
MonteCarloMoment squared_product_moment(const Eigen::MatrixXd& covariance, const std::vector<std::size_t>& qubits,
                                        std::size_t samples, std::uint64_t seed);

}  // namespace sbnoise::validation
