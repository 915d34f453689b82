#pragma once

#include "harv/errors.hpp"
#include "harv/params.hpp"
#include "harv/state.hpp"

#include <limits>

namespace harv {

/// Torque exerted by the drive magnet on the driven magnet at angle theta
/// and time t. Smooth everywhere for h > 0.
inline double magnetic_torque(const HarvesterParams& p, double theta, double t) {
    const double d = p.b + p.A * std::cos(p.Omega * t);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    const double q = d * d + p.h * p.h;
    const double sq = std::sqrt(q);
    const double inv3 = 1.0 / (q * sq);        // q^{-3/2}
    const double inv5 = inv3 / q;              // q^{-5/2}
    return p.alpha * (st * inv3 - 3.0 * d * (p.h * ct + d * st) * inv5);
}

namespace detail {

inline void check_finite_state(const HarvesterState& s, double t) {
    if (!s.finite()) throw DivergenceError(t, "non-finite state passed to dynamics");
}

/// Angular acceleration common to all control modes, without any
/// additional control torque.
inline double base_theta_ddot(const HarvesterParams& p, const HarvesterState& s, double t) {
    const double tau = magnetic_torque(p, s.theta, t);
    return (tau - p.c * s.theta_dot - p.k * (s.theta - p.theta0) + p.gamma_em * s.i) / p.J;
}

/// Circuit derivative with the load connected (harvesting configuration).
inline double loaded_di_dt(const HarvesterParams& p, const HarvesterState& s) {
    return (-(p.Rg + p.Rload) * s.i - p.gamma_em * s.theta_dot) / p.Lg;
}

} // namespace detail

/// Free-running harvester: mechanical equation plus the loaded circuit.
inline StateDeriv rhs_uncontrolled(const HarvesterParams& p, const HarvesterState& s, double t) {
    detail::check_finite_state(s, t);
    StateDeriv d;
    d.phi = p.Omega;
    d.theta = s.theta_dot;
    d.theta_dot = detail::base_theta_ddot(p, s, t);
    d.i = detail::loaded_di_dt(p, s);
    d.x = 0.0;
    return d;
}

/// Spring-position control: the actuator displacement x adds a torque
/// k/(2 r_spr) * x and the commanded velocity a drives x.
inline StateDeriv rhs_spring(const HarvesterParams& p, const HarvesterState& s, double t,
                             double a, double r_spr, double bound) {
    detail::check_finite_state(s, t);
    if (std::abs(a) > bound)
        throw ConstraintViolation("actuator velocity " + std::to_string(a) +
                                  " exceeds bound " + std::to_string(bound));
    StateDeriv d;
    d.phi = p.Omega;
    d.theta = s.theta_dot;
    d.theta_dot = detail::base_theta_ddot(p, s, t) + (p.k / (2.0 * r_spr)) * s.x / p.J;
    d.i = detail::loaded_di_dt(p, s);
    d.x = a;
    return d;
}

/// Motor-voltage control: relay either connects an external supply of
/// voltage a (replacing the load) or leaves the harvesting circuit intact.
inline StateDeriv rhs_voltage(const HarvesterParams& p, const HarvesterState& s, double t,
                              bool connected, double a, double bound) {
    detail::check_finite_state(s, t);
    StateDeriv d;
    d.phi = p.Omega;
    d.theta = s.theta_dot;
    d.theta_dot = detail::base_theta_ddot(p, s, t);
    if (connected) {
        if (std::abs(a) > bound)
            throw ConstraintViolation("supply voltage " + std::to_string(a) +
                                      " exceeds bound " + std::to_string(bound));
        d.i = (a - p.Rg * s.i - p.gamma_em * s.theta_dot) / p.Lg;
    } else {
        d.i = detail::loaded_di_dt(p, s);
    }
    d.x = 0.0;
    return d;
}

/// Dispatch on a ControlMode value.
inline StateDeriv rhs(const HarvesterParams& p, const HarvesterState& s, double t,
                      const ControlMode& mode, double spring_r = 0.01,
                      double bound = std::numeric_limits<double>::infinity()) {
    if (std::holds_alternative<Uncontrolled>(mode)) return rhs_uncontrolled(p, s, t);
    if (const auto* sp = std::get_if<SpringActuator>(&mode))
        return rhs_spring(p, s, t, sp->a, spring_r, bound);
    const auto& mv = std::get<MotorVoltage>(mode);
    return rhs_voltage(p, s, t, mv.connected, mv.a, bound);
}

/// Instantaneous power dissipated in the load resistor (W).
inline double load_power(const HarvesterState& s, const HarvesterParams& p) {
    return s.i * s.i * p.Rload;
}

/// Callable wrappers for the integrator templates.
struct UncontrolledRhs {
    const HarvesterParams& p;
    StateDeriv operator()(const HarvesterState& s, double t) const { return rhs_uncontrolled(p, s, t); }
};

struct SpringRhs {
    const HarvesterParams& p;
    double a;
    double r_spr;
    double bound;
    StateDeriv operator()(const HarvesterState& s, double t) const {
        return rhs_spring(p, s, t, a, r_spr, bound);
    }
};

struct VoltageRhs {
    const HarvesterParams& p;
    bool connected;
    double a;
    double bound;
    StateDeriv operator()(const HarvesterState& s, double t) const {
        return rhs_voltage(p, s, t, connected, a, bound);
    }
};

} // namespace harv
