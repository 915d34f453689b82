#pragma once

#include "harv/integrator.hpp"
#include "harv/params.hpp"
#include "harv/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace harv {

/// HP = large-amplitude high-power cycle; LP = one of the two
/// mirror-symmetric small cycles. lp_branch is the sign of the cycle-mean
/// angle for LP (0 when not applicable).
struct AttractorLabel {
    enum class Kind { LP, HP };
    Kind kind = Kind::LP;
    int lp_branch = 0;

    bool is_hp() const { return kind == Kind::HP; }
    bool operator==(const AttractorLabel& o) const { return kind == o.kind; }
};

inline AttractorLabel hp_label() { return {AttractorLabel::Kind::HP, 0}; }
inline AttractorLabel lp_label(int branch = 0) { return {AttractorLabel::Kind::LP, branch}; }
inline const char* to_string(AttractorLabel::Kind k) {
    return k == AttractorLabel::Kind::HP ? "HP" : "LP";
}

/// Cycle statistics measured over the last few forcing periods of a
/// settled trajectory.
struct SteadyStateSummary {
    double theta_ptp = 0.0;         ///< peak-to-peak angle (rad)
    double theta_mean = 0.0;        ///< cycle-mean angle (rad)
    double i_amp = 0.0;             ///< current amplitude (A)
    double response_period = 0.0;   ///< measured period (s); 0 if undetectable
};

struct SettleOptions {
    double t_settle = 0.0;        ///< seconds; <= 0 selects 40 forcing periods
    double window_periods = 5.0;  ///< measurement window at the tail
    IntegratorConfig integ{1e-4, 0};

    double settle_seconds(const HarvesterParams& p) const {
        return t_settle > 0.0 ? t_settle : 40.0 * p.forcing_period();
    }
};

struct SettleResult {
    HarvesterState final_state;
    SteadyStateSummary summary;
};

/// Run the uncontrolled dynamics until transients die out, then measure
/// the steady cycle. s0.phi selects the starting excitation phase.
SettleResult settle(const HarvesterParams& p, const HarvesterState& s0,
                    const SettleOptions& opts = {});

/// Threshold rule on the peak-to-peak angle. Throws AmbiguityError when
/// theta_ptp falls within ±10% of the threshold.
AttractorLabel classify_steady_state(const SteadyStateSummary& sum, double threshold_ptp);

/// Known coexisting-cycle seeds at the default parameters (angle, angular
/// velocity, current at phase 0).
HarvesterState reference_hp_ic();
HarvesterState reference_lp_ic();

/// Midpoint of the HP and LP peak-to-peak amplitudes measured at the given
/// parameters; persisted alongside datasets.
double derive_ptp_threshold(const HarvesterParams& p, const SettleOptions& opts = {});

struct OracleOptions {
    double threshold_ptp = 0.0;  ///< <= 0 means derive from parameters
    SettleOptions settle;
};

/// Ground-truth resting attractor: settle from s and classify. Expensive;
/// used for dataset labeling and final verification.
AttractorLabel resting_attractor_oracle(const HarvesterParams& p, const HarvesterState& s,
                                        const OracleOptions& opts);

/// Energy dissipated in the load over one forcing period on the settled
/// cycle of the requested attractor.
double energy_per_period(const HarvesterParams& p, AttractorLabel::Kind kind,
                         const SettleOptions& opts = {});

/// Uniform sampling box for basin labeling, sized to cover both basins.
struct SampleRanges {
    double phi_min = 0.0, phi_max = 2.0 * M_PI;
    double theta_min = -M_PI, theta_max = M_PI;
    double theta_dot_min = -50.0, theta_dot_max = 50.0;
    double i_min = -0.1, i_max = 0.1;
};

struct BasinSample {
    double phi = 0.0, theta = 0.0, theta_dot = 0.0, i = 0.0;
    int label = 0;  ///< 0 = LP, 1 = HP
};

struct BasinDataset {
    std::vector<BasinSample> samples;
    SampleRanges ranges;
    std::uint64_t seed = 0;
    double t_settle = 0.0;
    double threshold_ptp = 0.0;
    std::uint64_t ambiguous_resamples = 0;
};

/// n oracle-labeled uniform samples. Sample i is drawn from an RNG stream
/// keyed by (seed, i), so the dataset does not depend on the worker count.
/// Ambiguous settles are resampled within the stream and counted.
BasinDataset sample_basin_dataset(const HarvesterParams& p, std::size_t n,
                                  const SampleRanges& ranges, std::uint64_t seed,
                                  const OracleOptions& opts, int workers = 1);

void save_basin_csv(const BasinDataset& ds, const std::string& path);
BasinDataset load_basin_csv(const std::string& path);

} // namespace harv
