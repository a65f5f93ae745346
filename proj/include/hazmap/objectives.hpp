#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hazmap/kernels.hpp"
#include "hazmap/space.hpp"

namespace hazmap {

/// Sum of `dim` isotropic Gaussian bumps centred at -bias * e_i.
struct GaussianSpec {
    std::size_t dim = 2;
    double bias = 10.0;
    double sigma = 3.0;
    double half_range = 20.0;
    double threshold = 0.8;

    void validate() const;
};

double eval_gaussian(const GaussianSpec& spec, std::span<const double> p);
SearchSpace gaussian_space(const GaussianSpec& spec);
std::vector<Point> gaussian_mode_centers(const GaussianSpec& spec);
/// Radius of each hazard ball, ignoring cross-mode terms: sqrt(-2 sigma^2 ln f_b).
double gaussian_hazard_radius(const GaussianSpec& spec);
/// Axis-aligned bounding boxes of the hazard balls, clipped to the space.
std::vector<HazardBox> gaussian_truth_boxes(const GaussianSpec& spec);
/// Total ball volume over the space volume.
double gaussian_analytic_hazard_fraction(const GaussianSpec& spec);

/// Kinematic cut-in proxy. The ego drives in its lane at v_ego; the cutting
/// vehicle starts in the adjacent lane `s1` metres ahead (bumper to bumper)
/// at constant speed `v1` and at `t_start` moves laterally into the ego lane
/// along a quintic profile lasting `t_lc` seconds. The ego brakes once the
/// intrusion exceeds `intrusion_trigger`, after `reaction_delay`.
struct CutInSpec {
    double v_ego = 30.0;
    double t_start = 3.0;
    double s1_min = 30.0, s1_max = 110.0;
    double v1_min = 20.0, v1_max = 30.0;
    double tlc_min = 2.0, tlc_max = 3.0;

    double reaction_delay = 1.2;
    double max_decel = 6.0;
    double lane_width = 3.5;
    double vehicle_length = 4.8;
    double vehicle_width = 1.8;
    double intrusion_trigger = 0.3;
    double gap_ref = 20.0;
    double dt = 0.02;
    double horizon = 12.0;
    double threshold = 0.8;

    void validate() const;
};

struct CutInOutcome {
    double risk = 0.0;
    /// Smallest bumper-to-bumper clearance while the cutting vehicle intrudes
    /// into the ego lane; +inf when it never does.
    double min_gap = 0.0;
    bool collided = false;
    double brake_onset = -1.0;
};

/// p = (S1 [m], V1 [m/s], T_lc [s]).
CutInOutcome simulate_cut_in_detailed(const CutInSpec& spec, std::span<const double> p);
double simulate_cut_in(const CutInSpec& spec, std::span<const double> p);
SearchSpace cut_in_space(const CutInSpec& spec);

/// A black-box risk function over a bounded space.
struct Objective {
    std::string name;
    SearchSpace space;
    std::function<double(std::span<const double>)> evaluate;
    /// Known ground-truth hazard boxes; empty when only a grid oracle exists.
    std::vector<HazardBox> truth_boxes;
    std::vector<Point> mode_centers;
    /// Scenario objectives drive the classifier-loss term and the stopping rule.
    bool scenario = false;
};

/// Known names: gaussian-2d, gaussian-4d, cutin-3d.
Objective make_objective(std::string_view name);
Objective make_gaussian_objective(const GaussianSpec& spec, std::string name);
Objective make_cut_in_objective(const CutInSpec& spec);

struct GroundTruth {
    kernels::Grid grid;
    std::vector<double> risk;
    std::vector<unsigned char> hazardous;
    double hazardous_fraction = 0.0;
    double threshold = 0.0;

    std::size_t size() const { return risk.size(); }
    Point point(std::size_t i) const;
};

inline constexpr std::size_t kDefaultGridCap = 50'000'000;

/// Exhaustive evaluation on a uniform grid. Throws when the node count
/// exceeds `cap`.
GroundTruth grid_oracle(const Objective& objective, std::span<const std::size_t> resolution,
                        std::size_t cap = kDefaultGridCap);
GroundTruth grid_oracle(const Objective& objective, std::size_t resolution,
                        std::size_t cap = kDefaultGridCap);

/// Bounding boxes of the face-connected components of hazardous grid nodes.
std::vector<HazardBox> truth_boxes_from_grid(const GroundTruth& truth);

/// CSV: one row per node (coords..., risk, hazardous).
void write_ground_truth_csv(const GroundTruth& truth, std::ostream& out);
/// JSON sidecar: resolution, hazardous fraction, threshold, bounds.
std::string ground_truth_sidecar_json(const GroundTruth& truth, std::string_view objective);

}  // namespace hazmap
