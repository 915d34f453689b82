#pragma once

#include "harv/attractor.hpp"
#include "harv/mlp.hpp"
#include "harv/state.hpp"

#include <string>
#include <utility>
#include <vector>

namespace harv {

/// Per-feature affine map z = (x - offset) * scale, derived from the
/// sampling ranges so every input lands near [-1, 1].
struct FeatureScaler {
    std::vector<double> offset, scale;

    static FeatureScaler from_ranges(const SampleRanges& r);
    void apply(const double* x, double* z) const;
};

/// Learned resting-attractor predictor: 4 -> 128 -> 64 -> 64 -> 1 with
/// relu/relu/relu/sigmoid, reading the normalized instantaneous state.
struct BoaClassifier {
    Mlp net;
    FeatureScaler norm;
    double threshold = 0.5;

    /// Probability that the free system settles on the HP attractor.
    double probability_hp(const HarvesterState& s) const;
};

/// Probability plus thresholded label (HP iff p >= threshold).
std::pair<double, AttractorLabel> predict_resting_attractor(const BoaClassifier& c,
                                                            const HarvesterState& s);

struct BoaTrainOptions {
    int epochs = 50;
    int batch_size = 256;
    double lr = 1e-3;
    double val_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct BoaTrainMetrics {
    std::vector<double> train_loss;    ///< per epoch
    std::vector<double> val_accuracy;  ///< per epoch
    int best_epoch = -1;
    double best_val_accuracy = 0.0;
};

/// Binary cross-entropy training with Adam; returns the weights from the
/// best validation epoch. Throws on a single-class dataset.
std::pair<BoaClassifier, BoaTrainMetrics> train_classifier(const BasinDataset& ds,
                                                           const BoaTrainOptions& opts);

/// Fraction of samples whose predicted label matches the stored label.
double classifier_accuracy(const BoaClassifier& c, const std::vector<BasinSample>& samples);

void save_classifier(const BoaClassifier& c, const std::string& path);
BoaClassifier load_classifier(const std::string& path);

} // namespace harv
