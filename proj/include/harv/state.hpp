#pragma once

#include <cmath>
#include <variant>

namespace harv {

/// Instantaneous state of the harvester. `x` is the linear-actuator
/// position and stays 0 except under spring control.
struct HarvesterState {
    double phi = 0.0;        ///< excitation phase, kept in [0, 2π)
    double theta = 0.0;      ///< driven-magnet angle (rad)
    double theta_dot = 0.0;  ///< angular velocity (rad/s)
    double i = 0.0;          ///< induced current (A)
    double x = 0.0;          ///< actuator position (m)

    bool finite() const {
        return std::isfinite(phi) && std::isfinite(theta) && std::isfinite(theta_dot) &&
               std::isfinite(i) && std::isfinite(x);
    }
};

/// Time derivative of HarvesterState.
struct StateDeriv {
    double phi = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
    double i = 0.0;
    double x = 0.0;

    bool finite() const {
        return std::isfinite(phi) && std::isfinite(theta) && std::isfinite(theta_dot) &&
               std::isfinite(i) && std::isfinite(x);
    }
};

/// Control configuration for one dynamics evaluation.
struct Uncontrolled {};
struct SpringActuator {
    double a = 0.0;  ///< actuator velocity command (m/s)
};
struct MotorVoltage {
    bool connected = false;  ///< relay: supply in circuit instead of load
    double a = 0.0;          ///< supply voltage (V)
};
using ControlMode = std::variant<Uncontrolled, SpringActuator, MotorVoltage>;

inline double wrap_phase(double phi) {
    const double two_pi = 2.0 * M_PI;
    phi = std::fmod(phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    return phi;
}

} // namespace harv
