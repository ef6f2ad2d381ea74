#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vwapguard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric or structural constraint on an input was violated.
/// `field()` names the offending parameter (e.g. "market.gamma").
class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A closed form was requested for a model outside its domain of validity.
class ModelMismatch : public Error {
public:
    using Error::Error;
};

/// A curve does not live on the grid implied by the parameters/config.
class GridMismatch : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(double final_residual, int iterations)
        : Error("Newton iteration did not converge after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(final_residual) + " shares)"),
          final_residual_(final_residual),
          iterations_(iterations) {}

    double final_residual() const noexcept { return final_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double final_residual_;
    int iterations_;
};

class SingularLinearSystem : public Error {
public:
    using Error::Error;
};

class ImpactDerivativeUnavailable : public Error {
public:
    using Error::Error;
};

/// The break-even function has constant sign on the scanned bracket.
class NoSignChange : public Error {
public:
    NoSignChange(const std::string& what, std::vector<std::pair<double, double>> samples)
        : Error(what), samples_(std::move(samples)) {}

    /// (lambda, h(lambda)) pairs that were evaluated.
    const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

private:
    std::vector<std::pair<double, double>> samples_;
};

}  // namespace vwapguard
