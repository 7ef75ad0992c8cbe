#pragma once

#include <stdexcept>
#include <string>

namespace dualchart {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched array lengths or incompatible grid shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid or missing configuration value. `field()` names it as "section.key".
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error("config error at '" + field + "': " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Non-finite state encountered during integration; carries the step index.
class DivergenceError : public Error {
public:
    DivergenceError(long step, const std::string& what)
        : Error("divergence at step " + std::to_string(step) + ": " + what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

/// Test field too small in magnitude at a point where division is required.
class DegenerateTestFieldError : public Error {
public:
    using Error::Error;
};

/// Hilbert-space truncation too small for the requested operation.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced by a numerical evaluation; carries the flat
/// coordinate index at which it was detected (-1 if not applicable).
class NumericalError : public Error {
public:
    NumericalError(long coordinate, const std::string& what)
        : Error(what + (coordinate >= 0 ? " (coordinate " + std::to_string(coordinate) + ")" : "")),
          coordinate_(coordinate) {}
    long coordinate() const { return coordinate_; }

private:
    long coordinate_;
};

}  // namespace dualchart
