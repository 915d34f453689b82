#include "harv/ddpg.hpp"

#include "harv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace harv {

namespace {

void zero_output_layer(Mlp& net) {
    auto& last = net.layers.back();
    std::fill(last.W.a.begin(), last.W.a.end(), 0.0);
    std::fill(last.b.begin(), last.b.end(), 0.0);
}

} // namespace

Mlp make_actor(int state_dim, Rng& rng) {
    Mlp actor = make_mlp({state_dim, 128, 128, 1}, {Act::Relu, Act::Relu, Act::Tanh}, rng);
    zero_output_layer(actor);
    return actor;
}

CriticNet make_critic(int state_dim, double action_bound, Rng& rng) {
    CriticNet c;
    c.state_head = make_mlp({state_dim, 128}, {Act::Relu}, rng);
    c.joint = make_mlp({129, 128, 1}, {Act::Relu, Act::Linear}, rng);
    zero_output_layer(c.joint);
    c.action_bound = action_bound;
    return c;
}

const Matrix& critic_forward(const CriticNet& c, const Matrix& S, const Matrix& A,
                             CriticCache& cache) {
    if (A.cols != 1 || A.rows != S.rows) throw DimensionError("critic_forward: action shape");
    const Matrix& h = forward_batch(c.state_head, S, cache.head);
    const int n = S.rows, hw = h.cols;
    if (cache.concat.rows != n || cache.concat.cols != hw + 1) cache.concat.resize(n, hw + 1);
    for (int m = 0; m < n; ++m) {
        double* row = cache.concat.row(m);
        const double* hm = h.row(m);
        for (int j = 0; j < hw; ++j) row[j] = hm[j];
        row[hw] = A.at(m, 0);
    }
    return forward_batch(c.joint, cache.concat, cache.joint);
}

Matrix critic_backprop(const CriticNet& c, const CriticCache& cache, const Matrix& dQ,
                       CriticGrads& grads) {
    Matrix d_concat = backprop_batch(c.joint, cache.joint, dQ, grads.joint);
    const int n = d_concat.rows, hw = d_concat.cols - 1;
    Matrix dH(n, hw), dA(n, 1);
    for (int m = 0; m < n; ++m) {
        const double* row = d_concat.row(m);
        double* hrow = dH.row(m);
        for (int j = 0; j < hw; ++j) hrow[j] = row[j];
        dA.at(m, 0) = row[hw];
    }
    backprop_batch(c.state_head, cache.head, dH, grads.head);
    return dA;
}

void critic_adam_step(CriticNet& c, const CriticGrads& g, CriticAdam& opt) {
    adam_step(c.state_head, g.head, opt.head);
    adam_step(c.joint, g.joint, opt.joint);
}

void critic_soft_update(CriticNet& target, const CriticNet& learned, double tau) {
    soft_update(target.state_head, learned.state_head, tau);
    soft_update(target.joint, learned.joint, tau);
}

double select_action(const Mlp& actor, std::span<const double> obs, double F, bool explore,
                     OuNoise& noise, Rng& rng, std::vector<double>& scratch_out,
                     std::vector<double>& scratch_hidden) {
    forward_inplace(actor, obs, scratch_out, scratch_hidden);
    double a = F * scratch_out[0];
    if (explore) a = std::clamp(a + F * noise.step(rng), -F, F);
    return a;
}

namespace {

void fill_state_matrix(const std::vector<const Transition*>& batch, bool next, Matrix& S) {
    const int n = static_cast<int>(batch.size());
    const int d = static_cast<int>((next ? batch[0]->s_next : batch[0]->s).size());
    if (S.rows != n || S.cols != d) S.resize(n, d);
    for (int m = 0; m < n; ++m) {
        const auto& src = next ? batch[static_cast<std::size_t>(m)]->s_next
                               : batch[static_cast<std::size_t>(m)]->s;
        std::copy(src.begin(), src.end(), S.row(m));
    }
}

} // namespace

std::vector<double> critic_targets(const std::vector<const Transition*>& batch,
                                   const Mlp& target_actor, const CriticNet& target_critic,
                                   double gamma_disc) {
    if (batch.empty()) throw std::invalid_argument("critic_targets: empty batch");
    const int n = static_cast<int>(batch.size());
    Matrix S_next;
    fill_state_matrix(batch, /*next=*/true, S_next);
    ForwardCache actor_cache;
    const Matrix& U_next = forward_batch(target_actor, S_next, actor_cache);
    CriticCache cc;
    const Matrix& Q_next = critic_forward(target_critic, S_next, U_next, cc);

    std::vector<double> y(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const Transition& tr = *batch[static_cast<std::size_t>(m)];
        y[static_cast<std::size_t>(m)] = tr.done ? tr.r : tr.r + gamma_disc * Q_next.at(m, 0);
    }
    return y;
}

double update_critic(CriticNet& critic, const std::vector<const Transition*>& batch,
                     const std::vector<double>& targets, CriticAdam& opt) {
    const int n = static_cast<int>(batch.size());
    if (targets.size() != static_cast<std::size_t>(n))
        throw DimensionError("update_critic: target count mismatch");

    thread_local Matrix S, A, dQ, Y;
    thread_local CriticCache cache;
    fill_state_matrix(batch, /*next=*/false, S);
    if (A.rows != n || A.cols != 1) A.resize(n, 1);
    const double inv_f = 1.0 / critic.action_bound;
    for (int m = 0; m < n; ++m) A.at(m, 0) = batch[static_cast<std::size_t>(m)]->a * inv_f;
    const Matrix& Q = critic_forward(critic, S, A, cache);

    if (Y.rows != n || Y.cols != 1) Y.resize(n, 1);
    for (int m = 0; m < n; ++m) Y.at(m, 0) = targets[static_cast<std::size_t>(m)];
    const double loss = mse_loss(Q, Y, &dQ);

    thread_local CriticGrads grads;
    if (grads.joint.dW.empty() ||
        grads.head.dW[0].cols != critic.state_head.layers[0].W.cols)
        grads = CriticGrads::like(critic);
    grads.zero();
    critic_backprop(critic, cache, dQ, grads);
    critic_adam_step(critic, grads, opt);
    return loss;
}

double actor_ascent(Mlp& actor, const Matrix& S, const Matrix& dq_du, AdamState& opt) {
    ForwardCache cache;
    forward_batch(actor, S, cache);
    // Minimize -J: flip the sign of the objective gradient.
    Matrix dY = dq_du;
    for (auto& v : dY.a) v = -v;
    Grads grads = Grads::like(actor);
    backprop_batch(actor, cache, dY, grads);
    double norm2 = 0.0;
    for (const auto& m : grads.dW)
        for (double v : m.a) norm2 += v * v;
    for (const auto& vec : grads.db)
        for (double v : vec) norm2 += v * v;
    adam_step(actor, grads, opt);
    return std::sqrt(norm2);
}

double update_actor(Mlp& actor, const CriticNet& critic, const std::vector<const Transition*>& batch,
                    AdamState& opt) {
    const int n = static_cast<int>(batch.size());
    thread_local Matrix S;
    fill_state_matrix(batch, /*next=*/false, S);

    ForwardCache actor_cache;
    const Matrix& U = forward_batch(actor, S, actor_cache);

    thread_local CriticCache cc;
    critic_forward(critic, S, U, cc);
    thread_local Matrix dQ;
    if (dQ.rows != n || dQ.cols != 1) dQ.resize(n, 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int m = 0; m < n; ++m) dQ.at(m, 0) = inv_n;  // d(mean Q)/dQ_m

    thread_local CriticGrads scratch;
    if (scratch.joint.dW.empty() ||
        scratch.head.dW[0].cols != critic.state_head.layers[0].W.cols)
        scratch = CriticGrads::like(critic);
    scratch.zero();  // critic stays frozen; gradients are discarded
    const Matrix dU = critic_backprop(critic, cc, dQ, scratch);

    return actor_ascent(actor, S, dU, opt);
}

TrainResult train(RlEnv& env, const DdpgConfig& cfg, const TrainOptions& opts, std::uint64_t seed) {
    Rng rng(seed);
    const int obs_dim = env.obs_dim();
    const double F = env.action_bound();

    TrainResult result;
    result.actor = make_actor(obs_dim, rng);
    result.critic = make_critic(obs_dim, F, rng);
    Mlp target_actor = result.actor;
    CriticNet target_critic = result.critic;

    AdamState actor_opt = AdamState::like(result.actor, cfg.lr_actor);
    CriticAdam critic_opt = CriticAdam::like(result.critic, cfg.lr_critic);
    ReplayBuffer buffer(cfg.buffer_capacity);
    OuNoise noise{cfg.ou_theta, cfg.ou_sigma0, 0.0};

    Mlp best_actor = result.actor;
    std::vector<double> act_out, act_hidden;

    for (int ep = 1; ep <= opts.episodes; ++ep) {
        noise.reset();
        // Linear anneal of the exploration scale over the first half.
        const double half = std::max(1.0, 0.5 * static_cast<double>(opts.episodes));
        const double frac = std::min(1.0, static_cast<double>(ep - 1) / half);
        noise.sigma = cfg.ou_sigma0 + frac * (cfg.ou_sigma_final - cfg.ou_sigma0);

        EpisodeLogRow row;
        row.episode = ep;
        std::vector<double> obs;
        try {
            obs = env.reset(rng);
        } catch (const DivergenceError&) {
            result.log.push_back(row);
            continue;
        }

        for (int step = 0; step < env.max_steps(); ++step) {
            const double a =
                select_action(result.actor, obs, F, /*explore=*/true, noise, rng, act_out, act_hidden);
            RlEnv::Step sr;
            try {
                sr = env.step(a);
            } catch (const DivergenceError&) {
                break;  // abort episode, keep training
            }
            buffer.push({obs, a, sr.reward, sr.obs, sr.done});
            row.episode_return += sr.reward;
            row.energy_J += sr.cost_J;
            row.steps += 1;
            obs = sr.obs;

            if (buffer.size() >= static_cast<std::size_t>(cfg.minibatch_n)) {
                const auto batch = buffer.sample(static_cast<std::size_t>(cfg.minibatch_n), rng);
                const auto targets = critic_targets(batch, target_actor, target_critic, cfg.gamma_disc);
                update_critic(result.critic, batch, targets, critic_opt);
                update_actor(result.actor, result.critic, batch, actor_opt);
                critic_soft_update(target_critic, result.critic, cfg.tau_soft);
                soft_update(target_actor, result.actor, cfg.tau_soft);
            }
            if (sr.done) {
                row.success = true;
                break;
            }
        }
        row.control_time_s = row.steps * cfg.dt_control;
        result.log.push_back(row);
        result.episodes_run = ep;
        if (opts.on_episode) opts.on_episode(row);

        if (opts.eval_every > 0 && ep % opts.eval_every == 0) {
            const double rate = evaluate_policy(env, result.actor, opts.eval_episodes,
                                                seed + 0x9e3779b9ULL * static_cast<std::uint64_t>(ep));
            if (opts.on_eval) opts.on_eval(ep, rate);
            if (rate > result.best_eval_success) {
                result.best_eval_success = rate;
                best_actor = result.actor;
            }
            if (rate >= opts.stop_success) break;
        }
    }

    if (opts.keep_best && result.best_eval_success >= 0.0) result.actor = best_actor;
    return result;
}

double evaluate_policy(RlEnv& env, const Mlp& actor, int n_episodes, std::uint64_t seed) {
    if (n_episodes <= 0) return 0.0;
    OuNoise unused;
    std::vector<double> out, hidden;
    int successes = 0;
    for (int ep = 0; ep < n_episodes; ++ep) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(ep));
        std::vector<double> obs;
        try {
            obs = env.reset(rng);
        } catch (const DivergenceError&) {
            continue;
        }
        for (int step = 0; step < env.max_steps(); ++step) {
            const double a = select_action(actor, obs, env.action_bound(), /*explore=*/false,
                                           unused, rng, out, hidden);
            RlEnv::Step sr;
            try {
                sr = env.step(a);
            } catch (const DivergenceError&) {
                break;
            }
            obs = sr.obs;
            if (sr.done) {
                ++successes;
                break;
            }
        }
    }
    return static_cast<double>(successes) / static_cast<double>(n_episodes);
}

} // namespace harv
