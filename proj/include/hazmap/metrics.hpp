#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hazmap/classifier.hpp"
#include "hazmap/objectives.hpp"
#include "hazmap/space.hpp"

namespace hazmap {

/// Sum over identified boxes of their intersection volume with `gt`. The
/// identified boxes are expected to be pairwise non-overlapping.
double overlap_volume(const HazardBox& gt, std::span<const HazardBox> identified);

/// Symmetric coverage score: mean over GT boxes of
/// (overlap / V_gt + overlap / sum of volumes of identified boxes touching it) / 2.
double api(std::span<const HazardBox> gt, std::span<const HazardBox> identified);

double centroid_distance(const HazardBox& a, const HazardBox& b);

/// max(0, 1 - D_center / D_max) with D_max the GT half-diagonal.
double adi_component(const HazardBox& gt, const HazardBox& identified);

/// Per GT box the mean adi_component over identified boxes overlapping it
/// with positive volume, then the mean over GT boxes. Unmatched GT boxes score 0.
double adi(std::span<const HazardBox> gt, std::span<const HazardBox> identified);

struct GtBreakdown {
    double gt_volume = 0.0;
    double overlap = 0.0;
    double identified_volume = 0.0;
    std::vector<std::size_t> matched;
    double api = 0.0;
    double adi = 0.0;
};

std::vector<GtBreakdown> breakdown(std::span<const HazardBox> gt, std::span<const HazardBox> identified);

double f2_against_truth(std::span<const unsigned char> predicted, const GroundTruth& truth);
/// Predicted hazardous = inside any of the boxes.
double f2_grid_boxes(std::span<const HazardBox> boxes, const GroundTruth& truth);
/// Predicted hazardous = classifier label.
double f2_grid_classifier(const HazardClassifier& model, const GroundTruth& truth);

/// Fraction of a uniform grid predicted hazardous by the classifier.
double hazard_ratio_estimate(const HazardClassifier& model, const SearchSpace& space, std::size_t resolution);

struct MetricReport {
    double f2_grid = 0.0;
    double api = 0.0;
    double adi = 0.0;
    double hazard_ratio = 0.0;
    /// True when no GT box is overlapped by any identified box.
    bool no_detection = false;
    std::vector<GtBreakdown> per_gt;
};

}  // namespace hazmap
