#include "hazmap/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hazmap/kernels.hpp"

namespace hazmap {

double binary_cross_entropy(bool label, double score)
{
    const double s = std::clamp(score, kLossClip, 1.0 - kLossClip);
    return label ? -std::log(s) : -std::log(1.0 - s);
}

HazardClassifier train_classifier(std::span<const SampleRecord> records, const SearchSpace& space,
                                  const ClassifierConfig& config)
{
    if (records.empty()) throw Error("train_classifier: empty training set");
    if (config.k_nn < 1) throw Error("train_classifier: k_nn must be >= 1");
    HazardClassifier m;
    m.config_ = config;
    m.lower_ = space.lower;
    m.span_.resize(space.dim());
    for (std::size_t d = 0; d < space.dim(); ++d) m.span_[d] = space.span(d);
    m.train_ = PointSet(space.dim());
    m.train_.data.reserve(records.size() * space.dim());
    std::vector<double> u(space.dim());
    for (const auto& r : records) {
        check_dim(space.dim(), r.point.size(), "train_classifier");
        for (std::size_t d = 0; d < space.dim(); ++d) u[d] = (r.point[d] - m.lower_[d]) / m.span_[d];
        m.train_.push_back(u);
        m.labels_.push_back(r.hazardous ? 1 : 0);
        m.sample_index_.push_back(r.sample_index);
    }
    return m;
}

PointSet HazardClassifier::normalized(const PointSet& points) const
{
    check_dim(lower_.size(), points.dim, "HazardClassifier");
    PointSet out(points.dim);
    out.data.resize(points.data.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto src = points.row(i);
        auto dst = out.row(i);
        for (std::size_t d = 0; d < points.dim; ++d) dst[d] = (src[d] - lower_[d]) / span_[d];
    }
    return out;
}

std::vector<HazardPrediction> HazardClassifier::predict_normalized(
    const PointSet& q, std::span<const std::size_t> exclude) const
{
    if (labels_.empty()) throw Error("HazardClassifier: not trained");
    const std::size_t k = config_.k_nn;
    std::vector<kernels::Neighbor> nb;
    kernels::nearest_neighbors(train_, q, k, exclude, nb);

    std::vector<HazardPrediction> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const kernels::Neighbor* row = nb.data() + i * k;
        double wsum = 0.0, hsum = 0.0;
        std::size_t exact = 0, exact_haz = 0;
        for (std::size_t j = 0; j < k && row[j].index != kernels::kNoExclusion; ++j) {
            if (row[j].dist2 == 0.0) {
                ++exact;
                exact_haz += labels_[row[j].index];
                continue;
            }
            const double w = config_.distance_weighted ? 1.0 / std::sqrt(row[j].dist2) : 1.0;
            wsum += w;
            hsum += w * labels_[row[j].index];
        }
        double score = 0.0;
        if (exact > 0 && config_.distance_weighted) {
            score = static_cast<double>(exact_haz) / static_cast<double>(exact);
        } else if (exact > 0) {
            score = (hsum + static_cast<double>(exact_haz)) / (wsum + static_cast<double>(exact));
        } else if (wsum > 0.0) {
            score = hsum / wsum;
        }
        out[i] = {score > 0.5, score};
    }
    return out;
}

HazardPrediction HazardClassifier::predict(std::span<const double> p) const
{
    PointSet one(p.size());
    one.push_back(p);
    return predict_normalized(normalized(one), {}).front();
}

std::vector<HazardPrediction> HazardClassifier::predict_many(const PointSet& points) const
{
    return predict_normalized(normalized(points), {});
}

std::vector<double> HazardClassifier::sample_losses(std::span<const SampleRecord> records) const
{
    std::unordered_map<std::size_t, std::size_t> row_of;
    row_of.reserve(sample_index_.size());
    for (std::size_t i = 0; i < sample_index_.size(); ++i) row_of.emplace(sample_index_[i], i);

    PointSet pts(lower_.size());
    pts.data.reserve(records.size() * lower_.size());
    std::vector<std::size_t> exclude(records.size(), kernels::kNoExclusion);
    for (std::size_t i = 0; i < records.size(); ++i) {
        pts.push_back(records[i].point);
        if (auto it = row_of.find(records[i].sample_index); it != row_of.end()) exclude[i] = it->second;
    }
    const auto pred = predict_normalized(normalized(pts), exclude);
    std::vector<double> loss(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        loss[i] = binary_cross_entropy(records[i].hazardous, pred[i].score);
    }
    return loss;
}

double HazardClassifier::sample_loss(const SampleRecord& r) const
{
    return sample_losses(std::span<const SampleRecord>(&r, 1)).front();
}

}  // namespace hazmap
