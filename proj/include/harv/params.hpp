#pragma once

#include <cmath>
#include <string>

namespace harv {

/// Physical constants of the magnetically coupled rotational energy
/// harvester. Lengths in meters, angles in radians, SI throughout.
///
/// `alpha` is derived from the magnet constants and is never an input;
/// call finalize() after editing any of mu0/M0/M1/V0/V1.
struct HarvesterParams {
    // driven magnet
    double J = 1.11e-6;      ///< moment of inertia (kg·m²)
    double c = 3.02e-6;      ///< torsional damping (N·m·s/rad)
    double k = 5.48e-3;      ///< torsional stiffness (N·m/rad)
    double theta0 = 0.0;     ///< spring offset bias angle (rad)

    // excitation
    double A = 3e-3;         ///< excitation amplitude (m)
    double Omega = 50.24;    ///< excitation angular frequency (rad/s)
    double b = 0.0;          ///< horizontal bias (m)
    double h = 34e-3;        ///< vertical magnet gap (m)

    // magnet properties
    double mu0 = 4.0e-7 * M_PI;  ///< permeability of free space (H/m)
    double M0 = 1.05e6;          ///< drive magnet magnetization (A/m)
    double M1 = 1.05e6;          ///< driven magnet magnetization (A/m)
    double V0 = 1.6088e-6;       ///< drive magnet volume (m³)
    double V1 = 1.6088e-6;       ///< driven magnet volume (m³)

    // circuit
    double Lg = 1.0;         ///< generator inductance (H)
    double Rg = 0.1;         ///< generator resistance (Ω)
    double Rload = 5.0;      ///< load resistance (Ω)
    double gamma_em = 0.06;  ///< electromechanical coupling (N·m/A)

    /// Derived magnetic constant mu0*M0*V0*M1*V1/(4π) (N·m·m³). Set by
    /// finalize(); never serialized.
    double alpha = 0.0;

    void finalize() { alpha = mu0 * M0 * V0 * M1 * V1 / (4.0 * M_PI); }

    /// Throws std::invalid_argument on sign/positivity violations.
    void validate() const;

    double natural_frequency() const { return std::sqrt(k / J); }
    double forcing_period() const { return 2.0 * M_PI / Omega; }

    /// Table defaults with alpha populated.
    static HarvesterParams defaults() {
        HarvesterParams p;
        p.finalize();
        return p;
    }
};

/// JSON round-trip of every physical field (alpha is recomputed on load).
HarvesterParams params_from_json_text(const std::string& text);
std::string params_to_json_text(const HarvesterParams& p);
HarvesterParams load_params(const std::string& path);
void save_params(const HarvesterParams& p, const std::string& path);

} // namespace harv
