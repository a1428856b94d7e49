#pragma once

#include <stdexcept>
#include <string>

namespace tailwedge {

// Bad input values (CLI maps these to exit code 2).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Tail level at or below the distribution mean; the Legendre transform is
// only defined strictly right of Lambda'(0).
class BelowMeanError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// Operation precondition violated (both tilt weights zero, wrong sign, ...).
class PreconditionError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// Failures discovered mid-computation (CLI maps these to exit code 3).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation at or beyond the explosion time / critical moment.
class MomentExplodedError : public NumericError {
public:
    MomentExplodedError(const std::string& msg, double t_star)
        : NumericError(msg), t_star_(t_star) {}
    double t_star() const noexcept { return t_star_; }

private:
    double t_star_;
};

class NoConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

class QuadratureError : public NumericError {
public:
    using NumericError::NumericError;
};

class StepUnderflowError : public NumericError {
public:
    using NumericError::NumericError;
};

class FitConditionError : public NumericError {
public:
    using NumericError::NumericError;
};

class AlphaUnknownError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace tailwedge
