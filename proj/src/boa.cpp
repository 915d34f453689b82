#include "harv/boa.hpp"

#include "harv/errors.hpp"
#include "harv/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>

namespace harv {

FeatureScaler FeatureScaler::from_ranges(const SampleRanges& r) {
    FeatureScaler f;
    auto add = [&](double lo, double hi) {
        f.offset.push_back(0.5 * (lo + hi));
        f.scale.push_back(2.0 / (hi - lo));
    };
    add(r.phi_min, r.phi_max);
    add(r.theta_min, r.theta_max);
    add(r.theta_dot_min, r.theta_dot_max);
    add(r.i_min, r.i_max);
    return f;
}

void FeatureScaler::apply(const double* x, double* z) const {
    for (std::size_t j = 0; j < offset.size(); ++j) z[j] = (x[j] - offset[j]) * scale[j];
}

double BoaClassifier::probability_hp(const HarvesterState& s) const {
    const double raw[4] = {s.phi, s.theta, s.theta_dot, s.i};
    double z[4];
    norm.apply(raw, z);
    thread_local std::vector<double> out, scratch;
    forward_inplace(net, std::span<const double>(z, 4), out, scratch);
    return out[0];
}

std::pair<double, AttractorLabel> predict_resting_attractor(const BoaClassifier& c,
                                                            const HarvesterState& s) {
    const double p = c.probability_hp(s);
    return {p, p >= c.threshold ? hp_label() : lp_label()};
}

namespace {

void fill_features(const FeatureScaler& norm, const BasinSample& s, double* z) {
    const double raw[4] = {s.phi, s.theta, s.theta_dot, s.i};
    norm.apply(raw, z);
}

double batch_accuracy(const Mlp& net, const FeatureScaler& norm, double threshold,
                      const std::vector<BasinSample>& samples, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    Matrix X(static_cast<int>(idx.size()), 4);
    for (std::size_t m = 0; m < idx.size(); ++m)
        fill_features(norm, samples[idx[m]], X.row(static_cast<int>(m)));
    ForwardCache cache;
    const Matrix& probs = forward_batch(net, X, cache);
    std::size_t hits = 0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
        const int pred = probs.at(static_cast<int>(m), 0) >= threshold ? 1 : 0;
        hits += (pred == samples[idx[m]].label);
    }
    return static_cast<double>(hits) / static_cast<double>(idx.size());
}

} // namespace

std::pair<BoaClassifier, BoaTrainMetrics> train_classifier(const BasinDataset& ds,
                                                           const BoaTrainOptions& opts) {
    const auto& samples = ds.samples;
    if (samples.size() < 2) throw std::invalid_argument("train_classifier: dataset too small");
    const bool has_hp = std::any_of(samples.begin(), samples.end(),
                                    [](const BasinSample& s) { return s.label == 1; });
    const bool has_lp = std::any_of(samples.begin(), samples.end(),
                                    [](const BasinSample& s) { return s.label == 0; });
    if (!has_hp || !has_lp)
        throw std::invalid_argument("train_classifier: dataset contains a single class");

    Rng rng(opts.seed);
    BoaClassifier clf;
    clf.norm = FeatureScaler::from_ranges(ds.ranges);
    clf.net = make_mlp({4, 128, 64, 64, 1}, {Act::Relu, Act::Relu, Act::Relu, Act::Sigmoid}, rng);

    // Seeded shuffle, then an 80/20 split.
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t j = order.size(); j > 1; --j)
        std::swap(order[j - 1], order[rng.below(j)]);
    const std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(opts.val_fraction *
                                                          static_cast<double>(order.size())));
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<long>(n_val));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<long>(n_val), order.end());
    if (train_idx.empty()) throw std::invalid_argument("train_classifier: no training rows");

    AdamState opt = AdamState::like(clf.net, opts.lr);
    Grads grads = Grads::like(clf.net);
    ForwardCache cache;
    Matrix X, dZ;
    std::vector<int> labels;

    BoaTrainMetrics metrics;
    Mlp best_net = clf.net;

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t j = train_idx.size(); j > 1; --j)
            std::swap(train_idx[j - 1], train_idx[rng.below(j)]);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < train_idx.size();
             start += static_cast<std::size_t>(opts.batch_size)) {
            const std::size_t stop =
                std::min(train_idx.size(), start + static_cast<std::size_t>(opts.batch_size));
            const int nb = static_cast<int>(stop - start);
            X.resize(nb, 4);
            labels.resize(static_cast<std::size_t>(nb));
            for (int m = 0; m < nb; ++m) {
                const BasinSample& s = samples[train_idx[start + static_cast<std::size_t>(m)]];
                fill_features(clf.norm, s, X.row(m));
                labels[static_cast<std::size_t>(m)] = s.label;
            }
            const Matrix& probs = forward_batch(clf.net, X, cache);
            loss_sum += bce_loss(probs, labels, &dZ);
            ++batches;
            grads.zero();
            backprop_batch(clf.net, cache, dZ, grads, /*dy_wrt_preactivation=*/true);
            adam_step(clf.net, grads, opt);
        }
        metrics.train_loss.push_back(loss_sum / static_cast<double>(std::max<std::size_t>(1, batches)));

        const double acc = batch_accuracy(clf.net, clf.norm, clf.threshold, samples, val_idx);
        metrics.val_accuracy.push_back(acc);
        if (acc > metrics.best_val_accuracy) {
            metrics.best_val_accuracy = acc;
            metrics.best_epoch = epoch;
            best_net = clf.net;
        }
    }
    clf.net = std::move(best_net);
    return {std::move(clf), std::move(metrics)};
}

double classifier_accuracy(const BoaClassifier& c, const std::vector<BasinSample>& samples) {
    if (samples.empty()) return 0.0;
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    return batch_accuracy(c.net, c.norm, c.threshold, samples, idx);
}

void save_classifier(const BoaClassifier& c, const std::string& path) {
    nlohmann::json j;
    j["net"] = mlp_to_json(c.net);
    j["normalization"] = {{"offset", c.norm.offset}, {"scale", c.norm.scale}};
    j["threshold"] = c.threshold;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

BoaClassifier load_classifier(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open classifier file: " + path);
    const nlohmann::json j = nlohmann::json::parse(f);
    BoaClassifier c;
    c.net = mlp_from_json(j.at("net"));
    c.norm.offset = j.at("normalization").at("offset").get<std::vector<double>>();
    c.norm.scale = j.at("normalization").at("scale").get<std::vector<double>>();
    c.threshold = j.value("threshold", 0.5);
    return c;
}

} // namespace harv
