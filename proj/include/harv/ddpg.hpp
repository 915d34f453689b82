#pragma once

#include "harv/mlp.hpp"
#include "harv/replay.hpp"
#include "harv/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace harv {

/// Learner configuration. The first eight fields ship with the reference
/// defaults and should not be changed casually.
struct DdpgConfig {
    double gamma_disc = 0.9;
    double tau_soft = 0.1;
    double lr_actor = 1e-4;
    double lr_critic = 1e-3;
    std::size_t buffer_capacity = 1000000;
    int minibatch_n = 64;
    double T1 = 2.0;  ///< uncontrolled settling span (s)
    double T2 = 4.0;  ///< controlled span cap (s)

    double dt_control = 0.01;      ///< control step (s)
    double action_bound_F = 0.1;   ///< units of the controller
    double r_end = 1.0;            ///< terminal reward
    double cost_scale = 500.0;     ///< reward units per joule of actuation

    double ou_theta = 0.15;
    double ou_sigma0 = 0.2;        ///< initial noise scale, fraction of F
    double ou_sigma_final = 0.05;  ///< annealed floor, fraction of F
};

/// Q network: the state feeds the input layer, the action joins at the
/// second hidden layer. Both hidden layers are 128-wide relu; output is a
/// scalar. Raw actions are divided by action_bound before entering the
/// network, so the action input spans [-1, 1] like the encoded state.
struct CriticNet {
    Mlp state_head;  ///< state_dim -> 128, relu
    Mlp joint;       ///< (128 + 1) -> 128 -> 1, relu then linear
    double action_bound = 1.0;
};

struct CriticAdam {
    AdamState head;
    AdamState joint;
    static CriticAdam like(const CriticNet& c, double lr) {
        return {AdamState::like(c.state_head, lr), AdamState::like(c.joint, lr)};
    }
};

struct CriticCache {
    ForwardCache head;
    ForwardCache joint;
    Matrix concat;
};

/// Actor: state_dim -> 128 -> 128 -> 1 with relu, relu, tanh. The output
/// layer starts at zero so a fresh policy commands zero actuation.
Mlp make_actor(int state_dim, Rng& rng);
CriticNet make_critic(int state_dim, double action_bound, Rng& rng);

/// Batched Q values for encoded states S (n×d) and normalized actions
/// A (n×1).
const Matrix& critic_forward(const CriticNet& c, const Matrix& S, const Matrix& A,
                             CriticCache& cache);

struct CriticGrads {
    Grads head;
    Grads joint;
    static CriticGrads like(const CriticNet& c) { return {Grads::like(c.state_head), Grads::like(c.joint)}; }
    void zero() {
        head.zero();
        joint.zero();
    }
};

/// Backward pass of the critic; returns dQ/dA (n×1) and accumulates
/// parameter gradients.
Matrix critic_backprop(const CriticNet& c, const CriticCache& cache, const Matrix& dQ,
                       CriticGrads& grads);

void critic_adam_step(CriticNet& c, const CriticGrads& g, CriticAdam& opt);
void critic_soft_update(CriticNet& target, const CriticNet& learned, double tau);

/// Deterministic policy output in action units: F * pi(s), optionally with
/// exploration noise added and clamped back to [-F, F].
double select_action(const Mlp& actor, std::span<const double> obs, double F, bool explore,
                     OuNoise& noise, Rng& rng, std::vector<double>& scratch_out,
                     std::vector<double>& scratch_hidden);

/// y_i = r_i + gamma * Q'(s', F pi'(s')); terminal transitions use y = r.
std::vector<double> critic_targets(const std::vector<const Transition*>& batch,
                                   const Mlp& target_actor, const CriticNet& target_critic,
                                   double gamma_disc);

/// One Adam step on the minibatch MSE; returns the pre-step loss.
double update_critic(CriticNet& critic, const std::vector<const Transition*>& batch,
                     const std::vector<double>& targets, CriticAdam& opt);

/// Ascent step of mean Q along the policy; returns the actor gradient
/// l2 norm. Exposed pieces: dQ/du through the frozen critic, then
/// actor_ascent on the tanh output.
double update_actor(Mlp& actor, const CriticNet& critic, const std::vector<const Transition*>& batch,
                    AdamState& opt);

/// Applies one Adam step moving the actor output uphill along dq_du
/// (n×1, gradient of the objective w.r.t. the tanh output).
double actor_ascent(Mlp& actor, const Matrix& S, const Matrix& dq_du, AdamState& opt);

/// Environment surface the trainer drives. reset runs Phase 1 (settle on
/// the start attractor with phase jitter) and returns the encoded state;
/// step advances one control interval.
class RlEnv {
public:
    virtual ~RlEnv() = default;

    struct Step {
        std::vector<double> obs;
        double reward = 0.0;
        double cost_J = 0.0;
        bool done = false;  ///< target basin reached (classifier)
    };

    virtual int obs_dim() const = 0;
    virtual int max_steps() const = 0;
    virtual double action_bound() const = 0;
    virtual std::vector<double> reset(Rng& rng) = 0;
    virtual Step step(double action) = 0;
};

struct EpisodeLogRow {
    int episode = 0;
    double episode_return = 0.0;
    bool success = false;
    double energy_J = 0.0;
    double control_time_s = 0.0;
    int steps = 0;
};

struct TrainOptions {
    int episodes = 2000;
    int eval_every = 25;       ///< 0 disables greedy evaluation
    int eval_episodes = 20;
    double stop_success = 0.9; ///< early stop once greedy success reaches this
    bool keep_best = true;     ///< return the best-evaluating actor
    std::function<void(const EpisodeLogRow&)> on_episode;
    std::function<void(int, double)> on_eval;
};

struct TrainResult {
    Mlp actor;
    CriticNet critic;
    std::vector<EpisodeLogRow> log;
    double best_eval_success = -1.0;
    int episodes_run = 0;
};

/// The full training loop: per-step minibatch updates of critic then
/// actor, then soft target updates, with OU exploration annealed over the
/// first half of the budget.
TrainResult train(RlEnv& env, const DdpgConfig& cfg, const TrainOptions& opts, std::uint64_t seed);

/// Greedy rollout success rate over n episodes (no exploration noise).
double evaluate_policy(RlEnv& env, const Mlp& actor, int n_episodes, std::uint64_t seed);

} // namespace harv
