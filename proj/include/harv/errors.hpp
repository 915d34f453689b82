#pragma once

#include <stdexcept>
#include <string>

namespace harv {

/// Numerical blow-up inside the integrator. Carries the time and a short
/// description of the offending state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t, const std::string& what)
        : std::runtime_error("divergence at t=" + std::to_string(t) + ": " + what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

/// An action exceeded its configured bound.
class ConstraintViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A steady-state summary landed too close to the HP/LP decision threshold
/// to label safely.
class AmbiguityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix dimension mismatch in the network code.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace harv
