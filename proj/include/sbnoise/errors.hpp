#pragma once

#include <stdexcept>
#include <string>

namespace sbnoise {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    // Error estimate left when the refinement budget ran out.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Principal-value extrapolation did not settle.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double previous, double last)
        : Error(what), previous_(previous), last_(last) {}

    double previous_estimate() const noexcept { return previous_; }
    double last_estimate() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

// Problem size exceeds what exhaustive or dense methods support.
class CapacityError : public Error {
public:
    using Error::Error;
};

// A scaling fit could not be formed from the sampled points.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace sbnoise
