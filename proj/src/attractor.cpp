#include "harv/attractor.hpp"

#include "harv/dynamics.hpp"
#include "harv/errors.hpp"
#include "harv/rng.hpp"
#include "harv/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace harv {

namespace {

SteadyStateSummary summarize_window(const std::vector<double>& t, const std::vector<double>& theta,
                                    const std::vector<double>& current) {
    SteadyStateSummary out;
    const std::size_t n = t.size();
    if (n < 2) return out;

    double tmin = theta[0], tmax = theta[0], imin = current[0], imax = current[0], acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        tmin = std::min(tmin, theta[j]);
        tmax = std::max(tmax, theta[j]);
        imin = std::min(imin, current[j]);
        imax = std::max(imax, current[j]);
        acc += theta[j];
    }
    out.theta_ptp = tmax - tmin;
    out.theta_mean = acc / static_cast<double>(n);
    out.i_amp = 0.5 * (imax - imin);

    // Period from upward crossings of the mid level, interpolated.
    const double mid = 0.5 * (tmax + tmin);
    std::vector<double> crossings;
    for (std::size_t j = 1; j < n; ++j) {
        if (theta[j - 1] < mid && theta[j] >= mid) {
            const double frac = (mid - theta[j - 1]) / (theta[j] - theta[j - 1]);
            crossings.push_back(t[j - 1] + frac * (t[j] - t[j - 1]));
        }
    }
    if (crossings.size() >= 2)
        out.response_period = (crossings.back() - crossings.front()) /
                              static_cast<double>(crossings.size() - 1);
    return out;
}

} // namespace

SettleResult settle(const HarvesterParams& p, const HarvesterState& s0, const SettleOptions& opts) {
    const double t_settle = opts.settle_seconds(p);
    if (t_settle < 20.0 * p.forcing_period())
        throw std::invalid_argument("settle: t_settle below 20 forcing periods");

    const double window = opts.window_periods * p.forcing_period();
    const double t0 = s0.phi / p.Omega;
    HarvesterState s = s0;

    IntegratorConfig pre = opts.integ;
    pre.record_every = 0;
    s = integrate(UncontrolledRhs{p}, s, t0, t0 + t_settle - window, pre);

    std::vector<double> ts, th, cur;
    const std::size_t expect = static_cast<std::size_t>(window / opts.integ.step_h) + 2;
    ts.reserve(expect);
    th.reserve(expect);
    cur.reserve(expect);
    IntegratorConfig fine = opts.integ;
    fine.record_every = 1;
    SettleResult res;
    res.final_state = integrate(UncontrolledRhs{p}, s, t0 + t_settle - window, t0 + t_settle, fine,
                                nullptr, [&](double t, const HarvesterState& st) {
                                    ts.push_back(t);
                                    th.push_back(st.theta);
                                    cur.push_back(st.i);
                                });
    res.summary = summarize_window(ts, th, cur);
    return res;
}

AttractorLabel classify_steady_state(const SteadyStateSummary& sum, double threshold_ptp) {
    if (threshold_ptp <= 0.0) throw std::invalid_argument("classify: threshold must be positive");
    if (std::abs(sum.theta_ptp - threshold_ptp) <= 0.1 * threshold_ptp)
        throw AmbiguityError("theta_ptp " + std::to_string(sum.theta_ptp) +
                             " within 10% of threshold " + std::to_string(threshold_ptp));
    if (sum.theta_ptp >= threshold_ptp) return hp_label();
    return lp_label(sum.theta_mean >= 0.0 ? +1 : -1);
}

HarvesterState reference_hp_ic() { return {0.0, -1.15, -38.0, 0.07, 0.0}; }
HarvesterState reference_lp_ic() { return {0.0, 1.0, -1.4, 0.008, 0.0}; }

double derive_ptp_threshold(const HarvesterParams& p, const SettleOptions& opts) {
    const double hp_ptp = settle(p, reference_hp_ic(), opts).summary.theta_ptp;
    const double lp_ptp = settle(p, reference_lp_ic(), opts).summary.theta_ptp;
    if (hp_ptp <= lp_ptp)
        throw AmbiguityError("reference cycles do not separate: hp_ptp <= lp_ptp");
    return 0.5 * (hp_ptp + lp_ptp);
}

AttractorLabel resting_attractor_oracle(const HarvesterParams& p, const HarvesterState& s,
                                        const OracleOptions& opts) {
    const double thr =
        opts.threshold_ptp > 0.0 ? opts.threshold_ptp : derive_ptp_threshold(p, opts.settle);
    HarvesterState ic = s;
    ic.x = 0.0;  // oracle judges the free system
    return classify_steady_state(settle(p, ic, opts.settle).summary, thr);
}

double energy_per_period(const HarvesterParams& p, AttractorLabel::Kind kind,
                         const SettleOptions& opts) {
    const HarvesterState ic =
        kind == AttractorLabel::Kind::HP ? reference_hp_ic() : reference_lp_ic();
    const HarvesterState on_cycle = settle(p, ic, opts).final_state;

    // Trapezoid of i^2 R over one forcing period at the inner step size.
    const double t0 = on_cycle.phi / p.Omega;
    const double tf = t0 + p.forcing_period();
    double energy = 0.0;
    double prev_t = t0;
    double prev_p = load_power(on_cycle, p);
    bool first = true;
    IntegratorConfig fine = opts.integ;
    fine.record_every = 1;
    integrate(UncontrolledRhs{p}, on_cycle, t0, tf, fine, nullptr,
              [&](double t, const HarvesterState& st) {
                  const double pw = load_power(st, p);
                  if (!first) energy += 0.5 * (pw + prev_p) * (t - prev_t);
                  first = false;
                  prev_t = t;
                  prev_p = pw;
              });
    return energy;
}

BasinDataset sample_basin_dataset(const HarvesterParams& p, std::size_t n,
                                  const SampleRanges& ranges, std::uint64_t seed,
                                  const OracleOptions& opts, int workers) {
    OracleOptions o = opts;
    if (o.threshold_ptp <= 0.0) o.threshold_ptp = derive_ptp_threshold(p, opts.settle);

    BasinDataset ds;
    ds.samples.resize(n);
    ds.ranges = ranges;
    ds.seed = seed;
    ds.t_settle = o.settle.settle_seconds(p);
    ds.threshold_ptp = o.threshold_ptp;

    std::atomic<std::uint64_t> ambiguous{0};
    parallel_for(n, workers, [&](std::size_t idx) {
        Rng rng = Rng::stream(seed, idx);
        for (;;) {
            BasinSample smp;
            smp.phi = rng.uniform(ranges.phi_min, ranges.phi_max);
            smp.theta = rng.uniform(ranges.theta_min, ranges.theta_max);
            smp.theta_dot = rng.uniform(ranges.theta_dot_min, ranges.theta_dot_max);
            smp.i = rng.uniform(ranges.i_min, ranges.i_max);
            try {
                const AttractorLabel lbl = resting_attractor_oracle(
                    p, {smp.phi, smp.theta, smp.theta_dot, smp.i, 0.0}, o);
                smp.label = lbl.is_hp() ? 1 : 0;
            } catch (const AmbiguityError&) {
                ambiguous.fetch_add(1);
                continue;
            }
            ds.samples[idx] = smp;
            return;
        }
    });
    ds.ambiguous_resamples = ambiguous.load();
    return ds;
}

void save_basin_csv(const BasinDataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "phi,theta,theta_dot,i,label\n";
    for (const auto& s : ds.samples)
        f << format_double(s.phi) << ',' << format_double(s.theta) << ','
          << format_double(s.theta_dot) << ',' << format_double(s.i) << ',' << s.label << '\n';

    nlohmann::json meta;
    meta["n"] = ds.samples.size();
    meta["seed"] = ds.seed;
    meta["t_settle"] = ds.t_settle;
    meta["threshold_ptp"] = ds.threshold_ptp;
    meta["ambiguous_resamples"] = ds.ambiguous_resamples;
    meta["ranges"] = {{"phi", {ds.ranges.phi_min, ds.ranges.phi_max}},
                      {"theta", {ds.ranges.theta_min, ds.ranges.theta_max}},
                      {"theta_dot", {ds.ranges.theta_dot_min, ds.ranges.theta_dot_max}},
                      {"i", {ds.ranges.i_min, ds.ranges.i_max}}};
    std::ofstream mf(path + ".meta.json");
    mf << meta.dump(2) << '\n';
}

BasinDataset load_basin_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    BasinDataset ds;
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        BasinSample s;
        std::istringstream ss(line);
        char comma;
        ss >> s.phi >> comma >> s.theta >> comma >> s.theta_dot >> comma >> s.i >> comma >> s.label;
        if (!ss) throw std::runtime_error("malformed basin CSV row: " + line);
        ds.samples.push_back(s);
    }

    std::ifstream mf(path + ".meta.json");
    if (mf) {
        nlohmann::json meta = nlohmann::json::parse(mf);
        ds.seed = meta.value("seed", 0ULL);
        ds.t_settle = meta.value("t_settle", 0.0);
        ds.threshold_ptp = meta.value("threshold_ptp", 0.0);
        ds.ambiguous_resamples = meta.value("ambiguous_resamples", 0ULL);
        if (meta.contains("ranges")) {
            const auto& r = meta["ranges"];
            ds.ranges.phi_min = r["phi"][0];
            ds.ranges.phi_max = r["phi"][1];
            ds.ranges.theta_min = r["theta"][0];
            ds.ranges.theta_max = r["theta"][1];
            ds.ranges.theta_dot_min = r["theta_dot"][0];
            ds.ranges.theta_dot_max = r["theta_dot"][1];
            ds.ranges.i_min = r["i"][0];
            ds.ranges.i_max = r["i"][1];
        }
    }
    return ds;
}

} // namespace harv
