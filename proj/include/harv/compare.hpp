#pragma once

#include "harv/boa.hpp"
#include "harv/control.hpp"
#include "harv/params.hpp"

#include <string>
#include <vector>

namespace harv {

/// Forcing periods of harvesting needed to pay back one switch.
double break_even_periods(double E_switch, double E_period);

/// Control duration expressed in forcing periods.
double periods_to_boa(double control_time_s, double Omega);

/// One controller configuration to benchmark (both directions are run).
struct ScenarioSpec {
    std::string name;        ///< e.g. "spring-RL", "voltage-RL-0.2"
    std::string controller;  ///< "spring" | "voltage"
    std::string method;      ///< "rl" | "bangbang"
    double bound = 0.0;
    std::string policy_lp2hp;  ///< checkpoint path (rl only)
    std::string policy_hp2lp;
};

std::vector<ScenarioSpec> load_scenarios(const std::string& path);
void save_scenarios(const std::vector<ScenarioSpec>& scenarios, const std::string& path);

struct TrialRow {
    std::uint64_t seed = 0;
    SwitchDirection direction = SwitchDirection::LpToHp;
    std::string controller;  ///< scenario name
    double bound = 0.0;
    bool success = false;
    double energy_J = 0.0;
    double control_time_s = 0.0;
};

struct ComparisonRow {
    std::string controller;  ///< scenario name
    SwitchDirection direction = SwitchDirection::LpToHp;
    double bound = 0.0;
    int trials = 0;
    double success_rate = 0.0;
    double mean_energy_J = 0.0;          ///< over successful switches
    double break_even_periods_HP = 0.0;  ///< mean energy / E_HP
    double break_even_periods_LP = 0.0;  ///< mean energy / E_LP
    double mean_periods_to_boa = 0.0;    ///< control duration in periods
};

struct ComparisonResult {
    std::vector<ComparisonRow> rows;
    std::vector<TrialRow> trial_rows;
    double E_HP = 0.0;
    double E_LP = 0.0;
};

struct ComparisonOptions {
    int trials = 50;
    RunSwitchOptions run;
    int workers = 1;
};

/// Batch evaluation over every (scenario, direction) pair. Trials are
/// seeded individually (printed in the long-format CSV) and means are
/// taken over the successful switches.
ComparisonResult run_comparison(const HarvesterParams& p, const std::vector<ScenarioSpec>& scenarios,
                                std::uint64_t seed, const BoaClassifier& clf,
                                const ComparisonOptions& opts);

void save_comparison_csv(const ComparisonResult& r, const std::string& path);
void save_trials_csv(const ComparisonResult& r, const std::string& path);

/// Spearman rank correlation (average ranks on ties).
double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

} // namespace harv
