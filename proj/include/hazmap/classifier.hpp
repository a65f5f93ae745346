#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hazmap/space.hpp"

namespace hazmap {

struct ClassifierConfig {
    std::size_t k_nn = 5;
    bool distance_weighted = true;
};

struct HazardPrediction {
    bool label = false;
    double score = 0.0;
};

inline constexpr double kLossClip = 1e-6;

/// Binary cross-entropy of `score` against `label`, score clipped to
/// [kLossClip, 1 - kLossClip].
double binary_cross_entropy(bool label, double score);

/// k-nearest-neighbour hazard classifier on coordinates normalised to the
/// search space. Stands in for a learned behaviour surrogate; anything with
/// the same train/predict/loss surface can replace it.
class HazardClassifier {
public:
    HazardClassifier() = default;

    HazardPrediction predict(std::span<const double> p) const;
    std::vector<HazardPrediction> predict_many(const PointSet& points) const;

    /// Loss of the prediction for `r`. When `r` is part of the training set
    /// (same sample_index) it is left out of its own neighbourhood.
    double sample_loss(const SampleRecord& r) const;
    /// sample_loss for every record in one batched neighbour query.
    std::vector<double> sample_losses(std::span<const SampleRecord> records) const;

    const ClassifierConfig& config() const { return config_; }
    std::size_t training_size() const { return labels_.size(); }

private:
    friend HazardClassifier train_classifier(std::span<const SampleRecord>, const SearchSpace&,
                                             const ClassifierConfig&);

    PointSet normalized(const PointSet& points) const;
    std::vector<HazardPrediction> predict_normalized(const PointSet& q,
                                                     std::span<const std::size_t> exclude) const;

    ClassifierConfig config_;
    std::vector<double> lower_;
    std::vector<double> span_;
    PointSet train_;
    std::vector<unsigned char> labels_;
    std::vector<std::size_t> sample_index_;
};

HazardClassifier train_classifier(std::span<const SampleRecord> records, const SearchSpace& space,
                                  const ClassifierConfig& config = {});

}  // namespace hazmap
