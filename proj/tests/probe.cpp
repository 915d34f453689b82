// Scratch probe used during development; not part of the test suite.
#include "harv/attractor.hpp"
#include "harv/boa.hpp"
#include "harv/control.hpp"
#include "harv/dynamics.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>

using namespace harv;

static BoaClassifier dev_classifier(const HarvesterParams& p, std::size_t n) {
    const std::string dir = "devcache";
    const std::string clf_path = dir + "/clf_" + std::to_string(n) + ".json";
    std::ifstream probe(clf_path);
    if (probe.good()) {
        std::printf("loading cached classifier %s\n", clf_path.c_str());
        return load_classifier(clf_path);
    }
    OracleOptions oracle;
    oracle.threshold_ptp = derive_ptp_threshold(p);
    auto t0 = std::chrono::steady_clock::now();
    BasinDataset ds = sample_basin_dataset(p, n, {}, 42, oracle, 1);
    auto t1 = std::chrono::steady_clock::now();
    BoaTrainOptions topt;
    topt.epochs = 40;
    topt.seed = 7;
    auto [clf, metrics] = train_classifier(ds, topt);
    auto t2 = std::chrono::steady_clock::now();
    std::printf("dataset %.0f s, train %.0f s, best val acc %.4f\n",
                std::chrono::duration<double>(t1 - t0).count(),
                std::chrono::duration<double>(t2 - t1).count(), metrics.best_val_accuracy);
    save_classifier(clf, clf_path);
    return clf;
}

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "rl";
    HarvesterParams p = HarvesterParams::defaults();

    BoaClassifier clf = dev_classifier(p, 20000);

    if (mode == "bang") {
        // Does quasi-bang-bang switching work, and from both LP branches?
        OracleOptions oracle;
        oracle.threshold_ptp = derive_ptp_threshold(p);
        RunSwitchOptions opts;
        opts.oracle = oracle;
        SwitchScenario sc;
        sc.kind = SwitchScenario::Kind::SpringBangBang;
        sc.bound = 0.003;
        for (int dir = 0; dir < 2; ++dir) {
            const auto start = dir == 0 ? AttractorLabel::Kind::LP : AttractorLabel::Kind::HP;
            const auto target = dir == 0 ? AttractorLabel::Kind::HP : AttractorLabel::Kind::LP;
            int succ = 0, reached = 0, trials = 10;
            double e_sum = 0, t_sum = 0;
            for (int k = 0; k < trials; ++k) {
                auto ep = run_switch(p, sc, start, target, 100 + k, clf, opts);
                succ += ep.success;
                reached += ep.reached_basin;
                if (ep.success) {
                    e_sum += ep.energy_J;
                    t_sum += ep.control_time_s;
                }
                std::printf("  %s trial %d: reached=%d success=%d E=%.3e J time=%.2f s\n",
                            dir == 0 ? "lp2hp" : "hp2lp", k, ep.reached_basin, ep.success,
                            ep.energy_J, ep.control_time_s);
            }
            std::printf("%s: success %d/%d, mean E %.3e J, mean time %.2f s\n",
                        dir == 0 ? "lp2hp" : "hp2lp", succ, trials, e_sum / std::max(1, succ),
                        t_sum / std::max(1, succ));
        }
        return 0;
    }

    // RL probe: train a voltage policy briefly and watch the log.
    TrainPolicyRequest req;
    req.controller = argc > 2 ? argv[2] : "voltage";
    req.direction = argc > 3 && std::string(argv[3]) == "hp2lp" ? SwitchDirection::HpToLp
                                                                : SwitchDirection::LpToHp;
    req.bound = argc > 4 ? std::stod(argv[4]) : 0.2;
    req.seed = 11;
    req.train.episodes = argc > 5 ? std::stoi(argv[5]) : 120;
    req.train.eval_every = 30;
    req.train.eval_episodes = 10;
    req.train.stop_success = 0.95;
    auto t0 = std::chrono::steady_clock::now();
    int shown = 0;
    req.train.on_episode = [&](const EpisodeLogRow& r) {
        if (++shown % 10 == 0 || r.success)
            std::printf("ep %3d: return %+8.4f success=%d steps=%3d E=%.3e\n", r.episode,
                        r.episode_return, r.success, r.steps, r.energy_J);
    };
    req.train.on_eval = [&](int ep, double rate) {
        auto t1 = std::chrono::steady_clock::now();
        std::printf("== eval at ep %d: greedy success %.2f (%.0f s elapsed)\n", ep, rate,
                    std::chrono::duration<double>(t1 - t0).count());
    };
    auto res = train_switch_policy(p, clf, req);
    std::printf("done: episodes_run=%d best_eval=%.2f\n", res.episodes_run, res.best_eval_success);
    return 0;
}
