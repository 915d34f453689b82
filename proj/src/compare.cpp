#include "harv/compare.hpp"

#include "harv/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace harv {

double break_even_periods(double E_switch, double E_period) {
    if (!(E_period > 0.0)) throw std::invalid_argument("break_even_periods: E_period must be > 0");
    return E_switch / E_period;
}

double periods_to_boa(double control_time_s, double Omega) {
    return control_time_s * Omega / (2.0 * M_PI);
}

std::vector<ScenarioSpec> load_scenarios(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scenarios file: " + path);
    const nlohmann::json j = nlohmann::json::parse(f);
    std::vector<ScenarioSpec> out;
    for (const auto& js : j.at("scenarios")) {
        ScenarioSpec s;
        s.name = js.at("name").get<std::string>();
        s.controller = js.at("controller").get<std::string>();
        s.method = js.at("method").get<std::string>();
        s.bound = js.at("bound").get<double>();
        s.policy_lp2hp = js.value("policy_lp2hp", "");
        s.policy_hp2lp = js.value("policy_hp2lp", "");
        out.push_back(std::move(s));
    }
    return out;
}

void save_scenarios(const std::vector<ScenarioSpec>& scenarios, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : scenarios) {
        nlohmann::json js{{"name", s.name},
                          {"controller", s.controller},
                          {"method", s.method},
                          {"bound", s.bound}};
        if (!s.policy_lp2hp.empty()) js["policy_lp2hp"] = s.policy_lp2hp;
        if (!s.policy_hp2lp.empty()) js["policy_hp2lp"] = s.policy_hp2lp;
        arr.push_back(std::move(js));
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << nlohmann::json{{"scenarios", arr}}.dump(2) << '\n';
}

ComparisonResult run_comparison(const HarvesterParams& p, const std::vector<ScenarioSpec>& scenarios,
                                std::uint64_t seed, const BoaClassifier& clf,
                                const ComparisonOptions& opts) {
    ComparisonResult result;
    result.E_HP = energy_per_period(p, AttractorLabel::Kind::HP, opts.run.oracle.settle);
    result.E_LP = energy_per_period(p, AttractorLabel::Kind::LP, opts.run.oracle.settle);

    RunSwitchOptions run = opts.run;
    if (run.oracle.threshold_ptp <= 0.0)
        run.oracle.threshold_ptp = derive_ptp_threshold(p, run.oracle.settle);

    // Load checkpoints up front so a missing file names its scenario.
    struct Prepared {
        ScenarioSpec spec;
        PolicyCheckpoint lp2hp, hp2lp;
        SwitchScenario::Kind kind;
    };
    std::vector<Prepared> prepared;
    for (const auto& spec : scenarios) {
        Prepared pr;
        pr.spec = spec;
        if (spec.method == "rl") {
            pr.kind = spec.controller == "spring" ? SwitchScenario::Kind::SpringRl
                                                  : SwitchScenario::Kind::VoltageRl;
            try {
                pr.lp2hp = load_policy(spec.policy_lp2hp);
                pr.hp2lp = load_policy(spec.policy_hp2lp);
            } catch (const std::exception& e) {
                throw std::runtime_error("scenario '" + spec.name +
                                         "': missing or unreadable policy checkpoint (" + e.what() +
                                         ")");
            }
        } else if (spec.method == "bangbang") {
            if (spec.controller != "spring")
                throw std::invalid_argument("scenario '" + spec.name +
                                            "': bang-bang is only defined for the spring controller");
            pr.kind = SwitchScenario::Kind::SpringBangBang;
        } else {
            throw std::invalid_argument("scenario '" + spec.name + "': unknown method " +
                                        spec.method);
        }
        prepared.push_back(std::move(pr));
    }

    const SwitchDirection dirs[2] = {SwitchDirection::LpToHp, SwitchDirection::HpToLp};
    const std::size_t cells = prepared.size() * 2;
    std::vector<std::vector<TrialRow>> cell_rows(cells);

    for (std::size_t c = 0; c < cells; ++c)
        cell_rows[c].resize(static_cast<std::size_t>(opts.trials));

    // Flat trial index -> (scenario, direction, trial); deterministic per
    // index regardless of worker count.
    const std::size_t total = cells * static_cast<std::size_t>(opts.trials);
    parallel_for(total, opts.workers, [&](std::size_t flat) {
        const std::size_t c = flat / static_cast<std::size_t>(opts.trials);
        const int trial = static_cast<int>(flat % static_cast<std::size_t>(opts.trials));
        const Prepared& pr = prepared[c / 2];
        const SwitchDirection dir = dirs[c % 2];

        SwitchScenario scenario;
        scenario.kind = pr.kind;
        scenario.bound = pr.spec.bound;
        if (pr.kind != SwitchScenario::Kind::SpringBangBang)
            scenario.policy = dir == SwitchDirection::LpToHp ? &pr.lp2hp : &pr.hp2lp;

        const std::uint64_t trial_seed =
            Rng::stream(seed, 1000003ULL * c + static_cast<std::uint64_t>(trial)).next_u64();

        TrialRow row;
        row.seed = trial_seed;
        row.direction = dir;
        row.controller = pr.spec.name;
        row.bound = pr.spec.bound;
        const EpisodeResult ep =
            run_switch(p, scenario, start_of(dir), target_of(dir), trial_seed, clf, run);
        row.success = ep.success;
        row.energy_J = ep.energy_J;
        row.control_time_s = ep.control_time_s;
        cell_rows[c][static_cast<std::size_t>(trial)] = row;
    });

    for (std::size_t c = 0; c < cells; ++c) {
        const Prepared& pr = prepared[c / 2];
        ComparisonRow row;
        row.controller = pr.spec.name;
        row.direction = dirs[c % 2];
        row.bound = pr.spec.bound;
        row.trials = opts.trials;
        double e_sum = 0.0, t_sum = 0.0;
        int successes = 0;
        for (const auto& tr : cell_rows[c]) {
            result.trial_rows.push_back(tr);
            if (tr.success) {
                ++successes;
                e_sum += tr.energy_J;
                t_sum += tr.control_time_s;
            }
        }
        row.success_rate = static_cast<double>(successes) / static_cast<double>(opts.trials);
        if (successes > 0) {
            row.mean_energy_J = e_sum / successes;
            row.break_even_periods_HP = break_even_periods(row.mean_energy_J, result.E_HP);
            row.break_even_periods_LP = break_even_periods(row.mean_energy_J, result.E_LP);
            row.mean_periods_to_boa = periods_to_boa(t_sum / successes, p.Omega);
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

void save_comparison_csv(const ComparisonResult& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "controller,direction,bound,trials,success_rate,mean_energy_J,"
         "break_even_periods_HP,break_even_periods_LP,mean_periods_to_boa\n";
    for (const auto& row : r.rows)
        f << row.controller << ',' << to_string(row.direction) << ',' << format_double(row.bound)
          << ',' << row.trials << ',' << format_double(row.success_rate) << ','
          << format_double(row.mean_energy_J) << ',' << format_double(row.break_even_periods_HP)
          << ',' << format_double(row.break_even_periods_LP) << ','
          << format_double(row.mean_periods_to_boa) << '\n';
}

void save_trials_csv(const ComparisonResult& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "seed,direction,controller,bound,success,energy_J,control_time_s\n";
    for (const auto& t : r.trial_rows)
        f << t.seed << ',' << to_string(t.direction) << ',' << t.controller << ','
          << format_double(t.bound) << ',' << (t.success ? 1 : 0) << ','
          << format_double(t.energy_J) << ',' << format_double(t.control_time_s) << '\n';
}

double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> rank(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t q = i; q <= j; ++q) rank[order[q]] = avg;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        ma += ra[j];
        mb += rb[j];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += (ra[j] - ma) * (rb[j] - mb);
        va += (ra[j] - ma) * (ra[j] - ma);
        vb += (rb[j] - mb) * (rb[j] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return num / std::sqrt(va * vb);
}

} // namespace harv
