#include "harv/control.hpp"

#include "harv/errors.hpp"
#include "harv/integrator.hpp"
#include "harv/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace harv {

const char* to_string(SwitchDirection d) {
    return d == SwitchDirection::LpToHp ? "lp2hp" : "hp2lp";
}

SwitchDirection direction_from_string(const std::string& s) {
    if (s == "lp2hp") return SwitchDirection::LpToHp;
    if (s == "hp2lp") return SwitchDirection::HpToLp;
    throw std::invalid_argument("unknown direction: " + s + " (expected lp2hp or hp2lp)");
}

SpringControllerConfig make_spring_config(const HarvesterParams& p, double r_spr, double F_spring) {
    SpringControllerConfig cfg;
    cfg.r_spr = r_spr;
    cfg.F_spring = F_spring;
    cfg.k_spr = p.k / (2.0 * r_spr * r_spr);
    return cfg;
}

RewardResult spring_reward(const HarvesterState& s, double a, bool reached,
                           const SpringControllerConfig& cfg, double dt, double cost_scale,
                           double r_end) {
    if (std::abs(a) > cfg.F_spring * (1.0 + 1e-12))
        throw ConstraintViolation("spring_reward: |a| exceeds F_spring");
    const double stretched = s.x - cfg.r_spr * s.theta + cfg.x0_pretension;
    if (stretched <= 0.0)
        throw ConstraintViolation("spring_reward: spring slack (x0_pretension too small)");
    RewardResult r;
    r.cost_J = cfg.k_spr * stretched * std::max(a, 0.0) * dt;
    r.reward = -cost_scale * r.cost_J + (reached ? r_end : 0.0);
    return r;
}

RewardResult voltage_reward(const HarvesterState& s, double a, bool reached, double dt,
                            double cost_scale, double r_end) {
    RewardResult r;
    r.cost_J = std::max(a * s.i, 0.0) * dt;
    r.reward = -cost_scale * r.cost_J + (reached ? r_end : 0.0);
    return r;
}

double actuator_reset_policy(double x, const SpringControllerConfig& cfg) {
    if (std::abs(x) <= cfg.x_tol) return 0.0;
    return x > 0.0 ? -cfg.F_spring : cfg.F_spring;
}

double quasi_bang_bang_step(const HarvesterState& stage_entry, BangBangStage stage,
                            SwitchDirection direction, const SpringControllerConfig& cfg) {
    double push = cfg.F_spring;
    if (direction == SwitchDirection::LpToHp) {
        // Destabilize the occupied LP well by tilting toward the other side.
        if (stage_entry.theta > 0.0) push = -cfg.F_spring;
    } else {
        push = -cfg.F_spring;
    }
    switch (stage) {
        case BangBangStage::Push: return push;
        case BangBangStage::Return: return -push;
        case BangBangStage::Off: return 0.0;
    }
    return 0.0;
}

void StateEncoder::encode(const HarvesterState& s, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(dim()));
    out[0] = std::sin(s.phi);
    out[1] = std::cos(s.phi);
    out[2] = s.theta * theta_scale;
    out[3] = s.theta_dot * theta_dot_scale;
    out[4] = s.i * i_scale;
    if (include_x) out[5] = s.x * x_scale;
}

namespace {

bool classifier_says(const BoaClassifier& clf, const HarvesterState& s, AttractorLabel::Kind kind) {
    return predict_resting_attractor(clf, s).second.kind == kind;
}

/// Random IC settled onto the requested attractor, classifier-checked.
/// Used by the training environments; evaluation uses the oracle variant.
HarvesterState classifier_checked_start(const HarvesterParams& p, const BoaClassifier& clf,
                                        AttractorLabel::Kind kind, double T1, Rng& rng,
                                        const IntegratorConfig& integ) {
    const SampleRanges ranges;
    for (int attempt = 0; attempt < 400; ++attempt) {
        HarvesterState ic;
        ic.phi = rng.uniform(ranges.phi_min, ranges.phi_max);
        ic.theta = rng.uniform(ranges.theta_min, ranges.theta_max);
        ic.theta_dot = rng.uniform(ranges.theta_dot_min, ranges.theta_dot_max);
        ic.i = rng.uniform(ranges.i_min, ranges.i_max);
        if (!classifier_says(clf, ic, kind)) continue;
        const double t1p = T1 + rng.uniform(0.0, p.forcing_period());
        IntegratorConfig fast = integ;
        fast.record_every = 0;
        const HarvesterState settled =
            integrate(UncontrolledRhs{p}, ic, ic.phi / p.Omega, ic.phi / p.Omega + t1p, fast);
        if (classifier_says(clf, settled, kind)) return settled;
    }
    throw std::runtime_error("could not draw a start state on the requested attractor");
}

} // namespace

SpringSwitchEnv::SpringSwitchEnv(const HarvesterParams& p, const BoaClassifier& clf,
                                 SwitchDirection dir, SpringControllerConfig cfg,
                                 ControlLoopConfig loop, double T1)
    : p_(p), clf_(&clf), dir_(dir), cfg_(cfg), loop_(loop), T1_(T1) {
    enc_.include_x = true;
}

int SpringSwitchEnv::max_steps() const {
    return static_cast<int>(std::llround(loop_.T2 / loop_.dt_control));
}

std::vector<double> SpringSwitchEnv::reset(Rng& rng) {
    IntegratorConfig integ{loop_.step_h, 0};
    s_ = classifier_checked_start(p_, *clf_, start_of(dir_), T1_, rng, integ);
    s_.x = 0.0;
    t_ = s_.phi / p_.Omega;
    std::vector<double> obs;
    enc_.encode(s_, obs);
    return obs;
}

RlEnv::Step SpringSwitchEnv::step(double action) {
    const int n = static_cast<int>(std::llround(loop_.dt_control / loop_.step_h));
    const double h = loop_.dt_control / n;
    SpringRhs rhs{p_, action, cfg_.r_spr, cfg_.F_spring};
    double cost = 0.0;
    for (int j = 0; j < n; ++j) {
        cost += spring_reward(s_, action, false, cfg_, h, 1.0, 0.0).cost_J;
        s_ = rk4_step(rhs, s_, t_ + j * h, h);
    }
    t_ += loop_.dt_control;

    Step out;
    out.done = classifier_says(*clf_, s_, target_of(dir_));
    out.cost_J = cost;
    out.reward = -loop_.cost_scale * cost + (out.done ? loop_.r_end : 0.0);
    enc_.encode(s_, out.obs);
    return out;
}

VoltageSwitchEnv::VoltageSwitchEnv(const HarvesterParams& p, const BoaClassifier& clf,
                                   SwitchDirection dir, VoltageControllerConfig cfg,
                                   ControlLoopConfig loop, double T1)
    : p_(p), clf_(&clf), dir_(dir), cfg_(cfg), loop_(loop), T1_(T1) {
    enc_.include_x = false;
}

int VoltageSwitchEnv::max_steps() const {
    return static_cast<int>(std::llround(loop_.T2 / loop_.dt_control));
}

std::vector<double> VoltageSwitchEnv::reset(Rng& rng) {
    IntegratorConfig integ{loop_.step_h, 0};
    s_ = classifier_checked_start(p_, *clf_, start_of(dir_), T1_, rng, integ);
    t_ = s_.phi / p_.Omega;
    std::vector<double> obs;
    enc_.encode(s_, obs);
    return obs;
}

RlEnv::Step VoltageSwitchEnv::step(double action) {
    const int n = static_cast<int>(std::llround(loop_.dt_control / loop_.step_h));
    const double h = loop_.dt_control / n;
    VoltageRhs rhs{p_, /*connected=*/true, action, cfg_.F_volt};
    double cost = 0.0;
    for (int j = 0; j < n; ++j) {
        cost += voltage_reward(s_, action, false, h, 1.0, 0.0).cost_J;
        s_ = rk4_step(rhs, s_, t_ + j * h, h);
    }
    t_ += loop_.dt_control;

    Step out;
    out.done = classifier_says(*clf_, s_, target_of(dir_));
    out.cost_J = cost;
    out.reward = -loop_.cost_scale * cost + (out.done ? loop_.r_end : 0.0);
    enc_.encode(s_, out.obs);
    return out;
}

HarvesterState random_start_on_attractor(const HarvesterParams& p, AttractorLabel::Kind kind,
                                         Rng& rng, const OracleOptions& oracle,
                                         const SampleRanges& ranges) {
    OracleOptions o = oracle;
    if (o.threshold_ptp <= 0.0) o.threshold_ptp = derive_ptp_threshold(p, o.settle);
    for (int attempt = 0; attempt < 400; ++attempt) {
        HarvesterState ic;
        ic.phi = rng.uniform(ranges.phi_min, ranges.phi_max);
        ic.theta = rng.uniform(ranges.theta_min, ranges.theta_max);
        ic.theta_dot = rng.uniform(ranges.theta_dot_min, ranges.theta_dot_max);
        ic.i = rng.uniform(ranges.i_min, ranges.i_max);
        SettleResult settled;
        try {
            settled = settle(p, ic, o.settle);
        } catch (const DivergenceError&) {
            continue;
        }
        AttractorLabel label;
        try {
            label = classify_steady_state(settled.summary, o.threshold_ptp);
        } catch (const AmbiguityError&) {
            continue;
        }
        if (label.kind != kind) continue;
        // Random extra phase so episodes start anywhere on the cycle.
        const double jitter = rng.uniform(0.0, p.forcing_period());
        IntegratorConfig integ = o.settle.integ;
        integ.record_every = 0;
        const double t0 = settled.final_state.phi / p.Omega;
        return integrate(UncontrolledRhs{p}, settled.final_state, t0, t0 + jitter, integ);
    }
    throw std::runtime_error("random_start_on_attractor: no qualifying initial condition found");
}

void save_policy(const PolicyCheckpoint& ckpt, const std::string& path) {
    nlohmann::json j;
    j["actor"] = mlp_to_json(ckpt.actor);
    j["critic"] = {{"state_head", mlp_to_json(ckpt.critic.state_head)},
                   {"joint", mlp_to_json(ckpt.critic.joint)},
                   {"action_bound", ckpt.critic.action_bound}};
    j["config"] = {{"controller", ckpt.controller},
                   {"direction", to_string(ckpt.direction)},
                   {"bound", ckpt.bound},
                   {"encoder",
                    {{"include_x", ckpt.encoder.include_x},
                     {"theta_scale", ckpt.encoder.theta_scale},
                     {"theta_dot_scale", ckpt.encoder.theta_dot_scale},
                     {"i_scale", ckpt.encoder.i_scale},
                     {"x_scale", ckpt.encoder.x_scale}}},
                   {"ddpg",
                    {{"gamma_disc", ckpt.config.gamma_disc},
                     {"tau_soft", ckpt.config.tau_soft},
                     {"lr_actor", ckpt.config.lr_actor},
                     {"lr_critic", ckpt.config.lr_critic},
                     {"buffer_capacity", ckpt.config.buffer_capacity},
                     {"minibatch_n", ckpt.config.minibatch_n},
                     {"T1", ckpt.config.T1},
                     {"T2", ckpt.config.T2},
                     {"dt_control", ckpt.config.dt_control},
                     {"action_bound_F", ckpt.config.action_bound_F},
                     {"r_end", ckpt.config.r_end},
                     {"cost_scale", ckpt.config.cost_scale},
                     {"ou_theta", ckpt.config.ou_theta},
                     {"ou_sigma0", ckpt.config.ou_sigma0},
                     {"ou_sigma_final", ckpt.config.ou_sigma_final}}}};
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

PolicyCheckpoint load_policy(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open policy checkpoint: " + path);
    const nlohmann::json j = nlohmann::json::parse(f);
    PolicyCheckpoint c;
    c.actor = mlp_from_json(j.at("actor"));
    if (j.contains("critic")) {
        c.critic.state_head = mlp_from_json(j.at("critic").at("state_head"));
        c.critic.joint = mlp_from_json(j.at("critic").at("joint"));
        c.critic.action_bound = j.at("critic").value("action_bound", 1.0);
    }
    const auto& cfg = j.at("config");
    c.controller = cfg.at("controller").get<std::string>();
    c.direction = direction_from_string(cfg.at("direction").get<std::string>());
    c.bound = cfg.at("bound").get<double>();
    const auto& enc = cfg.at("encoder");
    c.encoder.include_x = enc.at("include_x").get<bool>();
    c.encoder.theta_scale = enc.at("theta_scale").get<double>();
    c.encoder.theta_dot_scale = enc.at("theta_dot_scale").get<double>();
    c.encoder.i_scale = enc.at("i_scale").get<double>();
    c.encoder.x_scale = enc.at("x_scale").get<double>();
    const auto& d = cfg.at("ddpg");
    c.config.gamma_disc = d.at("gamma_disc").get<double>();
    c.config.tau_soft = d.at("tau_soft").get<double>();
    c.config.lr_actor = d.at("lr_actor").get<double>();
    c.config.lr_critic = d.at("lr_critic").get<double>();
    c.config.buffer_capacity = d.at("buffer_capacity").get<std::size_t>();
    c.config.minibatch_n = d.at("minibatch_n").get<int>();
    c.config.T1 = d.at("T1").get<double>();
    c.config.T2 = d.at("T2").get<double>();
    c.config.dt_control = d.at("dt_control").get<double>();
    c.config.action_bound_F = d.at("action_bound_F").get<double>();
    c.config.r_end = d.at("r_end").get<double>();
    c.config.cost_scale = d.at("cost_scale").get<double>();
    c.config.ou_theta = d.at("ou_theta").get<double>();
    c.config.ou_sigma0 = d.at("ou_sigma0").get<double>();
    c.config.ou_sigma_final = d.at("ou_sigma_final").get<double>();
    return c;
}

namespace {

/// Bookkeeping for one episode record: decimated state samples plus the
/// action/reward/cost accrued over the interval ending at each sample.
class EpisodeTape {
public:
    EpisodeTape(EpisodeRecord* rec, int record_every) : rec_(rec), every_(record_every) {}

    void sample(double t, const HarvesterState& s, double action, double reward, double cost,
                const char* stage) {
        if (!rec_) return;
        rec_->t.push_back(t);
        rec_->s.push_back(s);
        rec_->action.push_back(action);
        rec_->reward.push_back(reward);
        rec_->cost.push_back(cost);
        rec_->stage.push_back(stage);
    }

    bool active() const { return rec_ != nullptr; }
    int every() const { return every_; }

private:
    EpisodeRecord* rec_;
    int every_;
};

/// Advance one control interval under the given rhs functor, accumulating
/// the clipped actuation cost at the inner resolution and recording
/// decimated samples.
template <class Rhs, class CostFn>
double control_interval(Rhs&& rhs, CostFn&& cost_of, HarvesterState& s, double& t, double dt,
                        double step_h, EpisodeTape& tape, double action, const char* stage,
                        double reward_scale) {
    const int n = static_cast<int>(std::llround(dt / step_h));
    const double h = dt / n;
    const double t0 = t;
    double cost = 0.0;
    double cost_since_sample = 0.0;
    for (int j = 0; j < n; ++j) {
        const double dc = cost_of(s, h);
        cost += dc;
        cost_since_sample += dc;
        s = rk4_step(rhs, s, t0 + j * h, h);
        const bool last = (j + 1 == n);
        if (tape.active() && (last || (tape.every() > 0 && (j + 1) % tape.every() == 0))) {
            tape.sample(t0 + (j + 1) * h, s, action, -reward_scale * cost_since_sample,
                        cost_since_sample, stage);
            cost_since_sample = 0.0;
        }
    }
    t = t0 + dt;
    return cost;
}

} // namespace

EpisodeResult run_switch(const HarvesterParams& p, const SwitchScenario& scenario,
                         AttractorLabel::Kind start, AttractorLabel::Kind target,
                         std::uint64_t seed, const BoaClassifier& clf,
                         const RunSwitchOptions& opts) {
    EpisodeResult result;
    if (start == target) {  // degenerate request short-circuits
        result.success = true;
        result.reached_basin = true;
        result.final_label =
            start == AttractorLabel::Kind::HP ? hp_label() : lp_label();
        return result;
    }

    OracleOptions oracle = opts.oracle;
    if (oracle.threshold_ptp <= 0.0) oracle.threshold_ptp = derive_ptp_threshold(p, oracle.settle);

    const SwitchDirection dir =
        start == AttractorLabel::Kind::LP ? SwitchDirection::LpToHp : SwitchDirection::HpToLp;
    const bool is_spring = scenario.kind != SwitchScenario::Kind::VoltageRl;
    const bool is_rl = scenario.kind != SwitchScenario::Kind::SpringBangBang;
    if (is_rl && scenario.policy == nullptr)
        throw std::invalid_argument("run_switch: RL scenario without a policy checkpoint");

    Rng rng(seed);
    HarvesterState s = random_start_on_attractor(p, start, rng, oracle);
    s.x = 0.0;
    double t = s.phi / p.Omega;

    EpisodeTape tape(opts.record ? &result.traj : nullptr, opts.loop.record_every);

    // A couple of pre-control periods for context in exported plots.
    if (opts.record) {
        IntegratorConfig integ{opts.loop.step_h, opts.loop.record_every};
        s = integrate(UncontrolledRhs{p}, s, t, t + 2.0 * p.forcing_period(), integ, nullptr,
                      [&](double tt, const HarvesterState& st) {
                          tape.sample(tt, st, 0.0, 0.0, 0.0, "settle");
                      });
        t += 2.0 * p.forcing_period();
    }

    SpringControllerConfig spring_cfg = make_spring_config(p);
    spring_cfg.F_spring = is_spring ? scenario.bound : spring_cfg.F_spring;
    const double F = scenario.bound;

    std::vector<double> obs, actor_out, actor_scratch;
    auto rl_action = [&](const HarvesterState& st) {
        scenario.policy->encoder.encode(st, obs);
        forward_inplace(scenario.policy->actor, obs, actor_out, actor_scratch);
        return F * actor_out[0];
    };

    const double dt = opts.loop.dt_control;
    const int max_control_steps = static_cast<int>(std::llround(
        (scenario.kind == SwitchScenario::Kind::SpringBangBang ? opts.bang_bang_push_cap
                                                               : opts.loop.T2) /
        dt));

    // Controlled phase: step until the classifier reports the target basin.
    const HarvesterState push_entry = s;
    for (int step = 0; step < max_control_steps; ++step) {
        double a = 0.0;
        const char* stage = "control";
        if (scenario.kind == SwitchScenario::Kind::SpringBangBang) {
            a = quasi_bang_bang_step(push_entry, BangBangStage::Push, dir, spring_cfg);
            stage = "push";
        } else {
            a = std::clamp(rl_action(s), -F, F);
        }

        double cost = 0.0;
        if (is_spring) {
            cost = control_interval(
                SpringRhs{p, a, spring_cfg.r_spr, spring_cfg.F_spring},
                [&](const HarvesterState& st, double h) {
                    return spring_reward(st, a, false, spring_cfg, h, 1.0, 0.0).cost_J;
                },
                s, t, dt, opts.loop.step_h, tape, a, stage, opts.loop.cost_scale);
        } else {
            cost = control_interval(
                VoltageRhs{p, true, a, F},
                [&](const HarvesterState& st, double h) {
                    return voltage_reward(st, a, false, h, 1.0, 0.0).cost_J;
                },
                s, t, dt, opts.loop.step_h, tape, a, stage, opts.loop.cost_scale);
        }
        result.energy_J += cost;
        result.control_time_s += dt;
        if (classifier_says(clf, s, target)) {
            result.reached_basin = true;
            if (opts.record && !result.traj.reward.empty())
                result.traj.reward.back() += opts.loop.r_end;
            break;
        }
    }

    // Spring controllers must also return the actuator to x = 0.
    if (is_spring) {
        const double reset_cap = std::abs(s.x) / spring_cfg.F_spring + 1.0;
        const int max_reset_steps = static_cast<int>(std::llround(reset_cap / dt)) + 1;
        for (int step = 0; step < max_reset_steps && std::abs(s.x) > spring_cfg.x_tol; ++step) {
            const double a = actuator_reset_policy(s.x, spring_cfg);
            const char* stage =
                scenario.kind == SwitchScenario::Kind::SpringBangBang ? "return" : "reset";
            const double cost = control_interval(
                SpringRhs{p, a, spring_cfg.r_spr, spring_cfg.F_spring},
                [&](const HarvesterState& st, double h) {
                    return spring_reward(st, a, false, spring_cfg, h, 1.0, 0.0).cost_J;
                },
                s, t, dt, opts.loop.step_h, tape, a, stage, opts.loop.cost_scale);
            result.energy_J += cost;
            result.control_time_s += dt;
        }
    }

    // Controller off: settle and verify with the integration oracle.
    HarvesterState verify_ic = s;
    verify_ic.x = 0.0;
    SettleResult settled;
    if (opts.record) {
        const double t_settle = oracle.settle.settle_seconds(p);
        IntegratorConfig integ{opts.loop.step_h, opts.loop.record_every};
        integrate(UncontrolledRhs{p}, verify_ic, t, t + t_settle, integ, nullptr,
                  [&](double tt, const HarvesterState& st) {
                      if (tt > t) tape.sample(tt, st, 0.0, 0.0, 0.0, "verify");
                  });
    }
    try {
        settled = settle(p, verify_ic, oracle.settle);
        result.final_label = classify_steady_state(settled.summary, oracle.threshold_ptp);
        result.success = result.final_label.kind == target;
    } catch (const AmbiguityError&) {
        result.success = false;
    }
    result.classifier_false_positive = result.reached_basin && !result.success;
    return result;
}

TrainPolicyResult train_switch_policy(const HarvesterParams& p, const BoaClassifier& clf,
                                      const TrainPolicyRequest& req) {
    ControlLoopConfig loop;
    loop.dt_control = req.ddpg.dt_control;
    loop.T2 = req.ddpg.T2;
    loop.r_end = req.ddpg.r_end;
    loop.cost_scale = req.ddpg.cost_scale;

    std::unique_ptr<RlEnv> env;
    StateEncoder encoder;
    if (req.controller == "spring") {
        SpringControllerConfig cfg = make_spring_config(p);
        cfg.F_spring = req.bound;
        auto e = std::make_unique<SpringSwitchEnv>(p, clf, req.direction, cfg, loop, req.ddpg.T1);
        encoder = e->encoder();
        env = std::move(e);
    } else if (req.controller == "voltage") {
        VoltageControllerConfig cfg;
        cfg.F_volt = req.bound;
        auto e = std::make_unique<VoltageSwitchEnv>(p, clf, req.direction, cfg, loop, req.ddpg.T1);
        encoder = e->encoder();
        env = std::move(e);
    } else {
        throw std::invalid_argument("train_switch_policy: unknown controller " + req.controller);
    }

    DdpgConfig cfg = req.ddpg;
    cfg.action_bound_F = req.bound;
    TrainResult tr = train(*env, cfg, req.train, req.seed);

    TrainPolicyResult out;
    out.checkpoint.actor = std::move(tr.actor);
    out.checkpoint.critic = std::move(tr.critic);
    out.checkpoint.controller = req.controller;
    out.checkpoint.direction = req.direction;
    out.checkpoint.bound = req.bound;
    out.checkpoint.encoder = encoder;
    out.checkpoint.config = cfg;
    out.log = std::move(tr.log);
    out.best_eval_success = tr.best_eval_success;
    out.episodes_run = tr.episodes_run;
    return out;
}

void save_training_log(const std::vector<EpisodeLogRow>& log, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "episode,return,success,energy_J,control_time_s,steps\n";
    for (const auto& r : log)
        f << r.episode << ',' << format_double(r.episode_return) << ',' << (r.success ? 1 : 0)
          << ',' << format_double(r.energy_J) << ',' << format_double(r.control_time_s) << ','
          << r.steps << '\n';
}

void save_episode_csv(const EpisodeResult& ep, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "t,phi,theta,theta_dot,i,x,action,reward,stage,cost_J\n";
    const auto& r = ep.traj;
    for (std::size_t j = 0; j < r.t.size(); ++j) {
        const auto& s = r.s[j];
        f << format_double(r.t[j]) << ',' << format_double(s.phi) << ',' << format_double(s.theta)
          << ',' << format_double(s.theta_dot) << ',' << format_double(s.i) << ','
          << format_double(s.x) << ',' << format_double(r.action[j]) << ','
          << format_double(r.reward[j]) << ',' << r.stage[j] << ',' << format_double(r.cost[j])
          << '\n';
    }
}

} // namespace harv
