#pragma once

#include "harv/errors.hpp"
#include "harv/state.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace harv {

/// Fixed-step classical RK4. Deterministic by construction: no adaptivity,
/// no hidden state.
struct IntegratorConfig {
    double step_h = 1e-4;   ///< inner step (s); must resolve the 0.089 s mechanical period
    int record_every = 10;  ///< trajectory decimation; 0 records endpoints only
};

struct Trajectory {
    std::vector<double> t;
    std::vector<HarvesterState> s;

    std::size_t size() const { return t.size(); }
    void clear() {
        t.clear();
        s.clear();
    }
};

/// One RK4 update. Wraps phi into [0, 2π) and rejects non-finite results.
template <class Rhs>
HarvesterState rk4_step(Rhs&& rhs, const HarvesterState& s, double t, double h) {
    const StateDeriv k1 = rhs(s, t);
    const double h2 = 0.5 * h;

    HarvesterState m;
    m.phi = s.phi + h2 * k1.phi;
    m.theta = s.theta + h2 * k1.theta;
    m.theta_dot = s.theta_dot + h2 * k1.theta_dot;
    m.i = s.i + h2 * k1.i;
    m.x = s.x + h2 * k1.x;
    const StateDeriv k2 = rhs(m, t + h2);

    m.phi = s.phi + h2 * k2.phi;
    m.theta = s.theta + h2 * k2.theta;
    m.theta_dot = s.theta_dot + h2 * k2.theta_dot;
    m.i = s.i + h2 * k2.i;
    m.x = s.x + h2 * k2.x;
    const StateDeriv k3 = rhs(m, t + h2);

    m.phi = s.phi + h * k3.phi;
    m.theta = s.theta + h * k3.theta;
    m.theta_dot = s.theta_dot + h * k3.theta_dot;
    m.i = s.i + h * k3.i;
    m.x = s.x + h * k3.x;
    const StateDeriv k4 = rhs(m, t + h);

    const double w = h / 6.0;
    HarvesterState out;
    out.phi = wrap_phase(s.phi + w * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi));
    out.theta = s.theta + w * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
    out.theta_dot =
        s.theta_dot + w * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot);
    out.i = s.i + w * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
    out.x = s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);

    if (!out.finite()) throw DivergenceError(t, "RK4 step produced non-finite state");
    return out;
}

/// Integrate over [t0, tf]. The observer fires at every recorded sample,
/// including both endpoints. Returns the final state.
template <class Rhs, class Observer>
HarvesterState integrate(Rhs&& rhs, HarvesterState s, double t0, double tf,
                         const IntegratorConfig& cfg, Trajectory* out, Observer&& observer) {
    if (tf < t0) throw std::invalid_argument("integrate: tf < t0");
    auto record = [&](double t, const HarvesterState& st) {
        if (out) {
            out->t.push_back(t);
            out->s.push_back(st);
        }
        observer(t, st);
    };

    record(t0, s);
    if (tf == t0) return s;

    const std::int64_t n = std::max<std::int64_t>(1, std::llround((tf - t0) / cfg.step_h));
    const double h = (tf - t0) / static_cast<double>(n);
    for (std::int64_t j = 0; j < n; ++j) {
        const double t = t0 + h * static_cast<double>(j);
        s = rk4_step(rhs, s, t, h);
        const bool at_end = (j + 1 == n);
        if (at_end || (cfg.record_every > 0 && (j + 1) % cfg.record_every == 0))
            record(t0 + h * static_cast<double>(j + 1), s);
    }
    return s;
}

template <class Rhs>
HarvesterState integrate(Rhs&& rhs, HarvesterState s, double t0, double tf,
                         const IntegratorConfig& cfg, Trajectory* out = nullptr) {
    return integrate(std::forward<Rhs>(rhs), s, t0, tf, cfg, out,
                     [](double, const HarvesterState&) {});
}

} // namespace harv
