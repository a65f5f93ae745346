#include "hazmap/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hazmap/kernels.hpp"
#include "hazmap/stopping.hpp"

namespace hazmap {

namespace {

void check_gt(const HazardBox& gt)
{
    if (!(box_volume(gt) > 0.0)) throw Error("ground-truth domain has zero volume");
}

}  // namespace

double overlap_volume(const HazardBox& gt, std::span<const HazardBox> identified)
{
    double volume = 0.0;
    for (const auto& id : identified) {
        check_dim(gt.dim(), id.dim(), "overlap_volume");
        double v = 1.0;
        for (std::size_t d = 0; d < gt.dim(); ++d) {
            const double begin = std::max(gt.lower[d], id.lower[d]);
            const double end = std::min(gt.upper[d], id.upper[d]);
            v *= std::max(0.0, end - begin);
        }
        volume += v;
    }
    return volume;
}

double centroid_distance(const HazardBox& a, const HazardBox& b)
{
    check_dim(a.dim(), b.dim(), "centroid_distance");
    double s = 0.0;
    for (std::size_t d = 0; d < a.dim(); ++d) {
        const double diff = 0.5 * ((a.lower[d] + a.upper[d]) - (b.lower[d] + b.upper[d]));
        s += diff * diff;
    }
    return std::sqrt(s);
}

double adi_component(const HazardBox& gt, const HazardBox& identified)
{
    check_gt(gt);
    return std::max(0.0, 1.0 - centroid_distance(gt, identified) / gt.half_diagonal());
}

std::vector<GtBreakdown> breakdown(std::span<const HazardBox> gt, std::span<const HazardBox> identified)
{
    std::vector<GtBreakdown> out;
    out.reserve(gt.size());
    for (const auto& g : gt) {
        check_gt(g);
        GtBreakdown b;
        b.gt_volume = box_volume(g);
        double adi_sum = 0.0;
        for (std::size_t j = 0; j < identified.size(); ++j) {
            const double v = overlap_volume(g, std::span<const HazardBox>(&identified[j], 1));
            if (!(v > 0.0)) continue;
            b.matched.push_back(j);
            b.overlap += v;
            b.identified_volume += box_volume(identified[j]);
            adi_sum += adi_component(g, identified[j]);
        }
        if (!b.matched.empty()) {
            b.api = 0.5 * (b.overlap / b.gt_volume + b.overlap / b.identified_volume);
            b.adi = adi_sum / static_cast<double>(b.matched.size());
        }
        out.push_back(std::move(b));
    }
    return out;
}

double api(std::span<const HazardBox> gt, std::span<const HazardBox> identified)
{
    if (gt.empty()) throw Error("api: no ground-truth domains");
    double s = 0.0;
    for (const auto& b : breakdown(gt, identified)) s += b.api;
    return s / static_cast<double>(gt.size());
}

double adi(std::span<const HazardBox> gt, std::span<const HazardBox> identified)
{
    if (gt.empty()) throw Error("adi: no ground-truth domains");
    double s = 0.0;
    for (const auto& b : breakdown(gt, identified)) s += b.adi;
    return s / static_cast<double>(gt.size());
}

double f2_against_truth(std::span<const unsigned char> predicted, const GroundTruth& truth)
{
    return f2_score(predicted, truth.hazardous);
}

double f2_grid_boxes(std::span<const HazardBox> boxes, const GroundTruth& truth)
{
    std::vector<unsigned char> flags(truth.size());
    kernels::boxes_membership(truth.grid, boxes, flags);
    return f2_against_truth(flags, truth);
}

double f2_grid_classifier(const HazardClassifier& model, const GroundTruth& truth)
{
    PointSet pts(truth.grid.dim());
    pts.data.resize(truth.size() * truth.grid.dim());
    for (std::size_t i = 0; i < truth.size(); ++i) truth.grid.point(i, pts.row(i));
    const auto pred = model.predict_many(pts);
    std::vector<unsigned char> flags(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) flags[i] = pred[i].label ? 1 : 0;
    return f2_against_truth(flags, truth);
}

double hazard_ratio_estimate(const HazardClassifier& model, const SearchSpace& space, std::size_t resolution)
{
    if (resolution < 1) throw Error("hazard_ratio_estimate: resolution must be >= 1");
    kernels::Grid grid{space.lower, space.upper, std::vector<std::size_t>(space.dim(), resolution)};
    PointSet pts(grid.dim());
    pts.data.resize(grid.size() * grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) grid.point(i, pts.row(i));
    const auto pred = model.predict_many(pts);
    std::size_t haz = 0;
    for (const auto& p : pred) haz += p.label ? 1 : 0;
    return static_cast<double>(haz) / static_cast<double>(pred.size());
}

}  // namespace hazmap
