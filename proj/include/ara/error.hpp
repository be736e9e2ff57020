#pragma once

#include <stdexcept>
#include <string>

namespace ara {

// Invalid user input: bad config keys, out-of-range parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Any failure of the numerics proper. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double residual)
        : NumericalError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class PositivityError : public NumericalError {
public:
    PositivityError(const std::string& what, double bloch_norm)
        : NumericalError(what), bloch_norm_(bloch_norm) {}
    double bloch_norm() const noexcept { return bloch_norm_; }

private:
    double bloch_norm_;
};

class TrajectoryError : public NumericalError {
public:
    TrajectoryError(const std::string& what, long step)
        : NumericalError(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

class EquilibriumError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace ara
