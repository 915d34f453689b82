#pragma once

#include "harv/attractor.hpp"
#include "harv/boa.hpp"
#include "harv/ddpg.hpp"
#include "harv/dynamics.hpp"
#include "harv/params.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace harv {

enum class SwitchDirection { LpToHp, HpToLp };
const char* to_string(SwitchDirection d);
SwitchDirection direction_from_string(const std::string& s);

inline AttractorLabel::Kind start_of(SwitchDirection d) {
    return d == SwitchDirection::LpToHp ? AttractorLabel::Kind::LP : AttractorLabel::Kind::HP;
}
inline AttractorLabel::Kind target_of(SwitchDirection d) {
    return d == SwitchDirection::LpToHp ? AttractorLabel::Kind::HP : AttractorLabel::Kind::LP;
}

/// Moving-spring actuator. k_spr is tied to the torsional stiffness so the
/// two linear springs at radius r_spr reproduce k.
struct SpringControllerConfig {
    double F_spring = 0.003;    ///< |actuator velocity| bound (m/s)
    double r_spr = 0.01;        ///< plate radius (m)
    double k_spr = 27.4;        ///< linear spring stiffness (N/m)
    double x0_pretension = 0.05;///< keeps the springs stretched (m)
    double x_tol = 1e-5;        ///< reset tolerance (m)
};

SpringControllerConfig make_spring_config(const HarvesterParams& p, double r_spr = 0.01,
                                          double F_spring = 0.003);

struct VoltageControllerConfig {
    double F_volt = 0.1;  ///< |supply voltage| bound (V)
    bool connected = false;
};

struct RewardResult {
    double reward = 0.0;
    double cost_J = 0.0;
};

/// Work done by the actuator against the spring tension over dt, clipped
/// at zero for retracting motion; reward = -cost_scale*cost + r_end[reached].
RewardResult spring_reward(const HarvesterState& s, double a, bool reached,
                           const SpringControllerConfig& cfg, double dt, double cost_scale,
                           double r_end);

/// Supply output energy over dt, clipped at zero when the supply would be
/// charged by the harvester.
RewardResult voltage_reward(const HarvesterState& s, double a, bool reached, double dt,
                            double cost_scale, double r_end);

/// Constant-speed retraction toward x = 0 after the basin is reached.
double actuator_reset_policy(double x, const SpringControllerConfig& cfg);

enum class BangBangStage { Push, Return, Off };

/// Three-level actuator command: full-speed push toward the target basin,
/// full-speed return to x = 0, or off. `stage_entry` is the state at which
/// the current stage began, so the commanded velocity is constant within a
/// stage. LP starts push away from the occupied well (-sign(theta)); the
/// two LP wells are mirror images and a fixed push sign only escapes one
/// of them.
double quasi_bang_bang_step(const HarvesterState& stage_entry, BangBangStage stage,
                            SwitchDirection direction, const SpringControllerConfig& cfg);

/// Fixed affine encoding of the state for the actor/critic inputs. The
/// phase enters as sin/cos to avoid the wrap discontinuity.
struct StateEncoder {
    bool include_x = false;
    double theta_scale = 0.5;
    double theta_dot_scale = 0.02;
    double i_scale = 10.0;
    double x_scale = 100.0;

    int dim() const { return include_x ? 6 : 5; }
    void encode(const HarvesterState& s, std::vector<double>& out) const;
};

/// Shared timing/reward knobs for the control loop.
struct ControlLoopConfig {
    double dt_control = 0.01;
    double T2 = 4.0;
    double r_end = 1.0;
    double cost_scale = 500.0;
    double step_h = 1e-4;
    int record_every = 10;  ///< inner-step decimation for stored trajectories
};

/// Spring-actuator training environment (Phase 1 + Phase 2 of one episode).
class SpringSwitchEnv final : public RlEnv {
public:
    SpringSwitchEnv(const HarvesterParams& p, const BoaClassifier& clf, SwitchDirection dir,
                    SpringControllerConfig cfg, ControlLoopConfig loop, double T1 = 2.0);

    int obs_dim() const override { return enc_.dim(); }
    int max_steps() const override;
    double action_bound() const override { return cfg_.F_spring; }
    std::vector<double> reset(Rng& rng) override;
    Step step(double action) override;

    const HarvesterState& state() const { return s_; }
    double time() const { return t_; }
    const StateEncoder& encoder() const { return enc_; }

private:
    HarvesterParams p_;
    const BoaClassifier* clf_;
    SwitchDirection dir_;
    SpringControllerConfig cfg_;
    ControlLoopConfig loop_;
    double T1_;
    StateEncoder enc_;
    HarvesterState s_;
    double t_ = 0.0;
};

/// Motor-voltage training environment. The relay stays connected for the
/// whole controlled phase.
class VoltageSwitchEnv final : public RlEnv {
public:
    VoltageSwitchEnv(const HarvesterParams& p, const BoaClassifier& clf, SwitchDirection dir,
                     VoltageControllerConfig cfg, ControlLoopConfig loop, double T1 = 2.0);

    int obs_dim() const override { return enc_.dim(); }
    int max_steps() const override;
    double action_bound() const override { return cfg_.F_volt; }
    std::vector<double> reset(Rng& rng) override;
    Step step(double action) override;

    const HarvesterState& state() const { return s_; }
    double time() const { return t_; }
    const StateEncoder& encoder() const { return enc_; }

private:
    HarvesterParams p_;
    const BoaClassifier* clf_;
    SwitchDirection dir_;
    VoltageControllerConfig cfg_;
    ControlLoopConfig loop_;
    double T1_;
    StateEncoder enc_;
    HarvesterState s_;
    double t_ = 0.0;
};

/// Draw a random state whose resting attractor (by the oracle) matches
/// `kind`, then settle it onto the cycle with a random extra phase.
HarvesterState random_start_on_attractor(const HarvesterParams& p, AttractorLabel::Kind kind,
                                         Rng& rng, const OracleOptions& oracle,
                                         const SampleRanges& ranges = {});

/// Saved policy: actor weights plus everything needed to replay it.
struct PolicyCheckpoint {
    Mlp actor;
    CriticNet critic;
    std::string controller;  ///< "spring" | "voltage"
    SwitchDirection direction = SwitchDirection::LpToHp;
    double bound = 0.0;
    StateEncoder encoder;
    DdpgConfig config;
};

void save_policy(const PolicyCheckpoint& ckpt, const std::string& path);
PolicyCheckpoint load_policy(const std::string& path);

/// What drives the actuation during the controlled phase of an episode.
struct SwitchScenario {
    enum class Kind { SpringRl, SpringBangBang, VoltageRl };
    Kind kind = Kind::SpringBangBang;
    double bound = 0.003;
    const PolicyCheckpoint* policy = nullptr;  ///< required for the RL kinds
};

/// One full switching attempt with trajectory/cost record.
struct EpisodeRecord {
    std::vector<double> t;
    std::vector<HarvesterState> s;
    std::vector<double> action;
    std::vector<double> reward;
    std::vector<double> cost;
    std::vector<std::string> stage;
};

struct EpisodeResult {
    bool success = false;
    bool reached_basin = false;            ///< classifier fired during control
    bool classifier_false_positive = false;
    double energy_J = 0.0;
    double control_time_s = 0.0;
    AttractorLabel final_label;
    EpisodeRecord traj;
};

struct RunSwitchOptions {
    ControlLoopConfig loop;
    OracleOptions oracle;
    double bang_bang_push_cap = 8.0;  ///< seconds before a push gives up
    bool record = false;
    double T1 = 2.0;
};

/// Settle on the start attractor, run the controller until the classifier
/// reports the target basin (plus actuator reset for the spring), then
/// verify with the integration oracle.
EpisodeResult run_switch(const HarvesterParams& p, const SwitchScenario& scenario,
                         AttractorLabel::Kind start, AttractorLabel::Kind target,
                         std::uint64_t seed, const BoaClassifier& clf,
                         const RunSwitchOptions& opts);

/// Train one DDPG policy for the given controller/direction.
struct TrainPolicyRequest {
    std::string controller = "voltage";  ///< "spring" | "voltage"
    SwitchDirection direction = SwitchDirection::LpToHp;
    double bound = 0.1;
    DdpgConfig ddpg;
    TrainOptions train;
    std::uint64_t seed = 0;
};

struct TrainPolicyResult {
    PolicyCheckpoint checkpoint;
    std::vector<EpisodeLogRow> log;
    double best_eval_success = -1.0;
    int episodes_run = 0;
};

TrainPolicyResult train_switch_policy(const HarvesterParams& p, const BoaClassifier& clf,
                                      const TrainPolicyRequest& req);

void save_training_log(const std::vector<EpisodeLogRow>& log, const std::string& path);

/// Episode trajectory CSV: t, phi, theta, theta_dot, i, x, action, reward
/// plus stage and cost_J columns.
void save_episode_csv(const EpisodeResult& ep, const std::string& path);

} // namespace harv
