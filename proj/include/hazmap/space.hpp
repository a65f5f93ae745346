#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hazmap {

/// Raised on contract violations (bad dimensions, empty inputs, invalid config).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Point = std::vector<double>;

/// Axis-aligned box with closed bounds on both sides. Zero-width axes are
/// allowed so a single point is representable.
struct HazardBox {
    std::vector<double> lower;
    std::vector<double> upper;
    std::size_t member_count = 0;

    HazardBox() = default;
    HazardBox(std::vector<double> lo, std::vector<double> hi, std::size_t members = 0);

    std::size_t dim() const { return lower.size(); }
    double width(std::size_t d) const { return upper[d] - lower[d]; }
    Point center() const;
    /// Distance from the center to any vertex.
    double half_diagonal() const;

    bool operator==(const HazardBox&) const = default;
};

bool contains(const HazardBox& box, std::span<const double> p);
double box_volume(const HazardBox& box);
/// Smallest box containing both inputs. member_count is summed.
HazardBox bounding_hull(const HazardBox& a, const HazardBox& b);
/// Length of the intersection of the two boxes on axis d (0 when disjoint).
double overlap_length(const HazardBox& a, const HazardBox& b, std::size_t d);
double intersection_volume(const HazardBox& a, const HazardBox& b);
/// True when the intersection has strictly positive length on every axis.
bool overlaps_interior(const HazardBox& a, const HazardBox& b);
/// Box spanning the given points (per-axis min/max).
HazardBox points_hull(std::span<const Point> points);

struct SearchSpace {
    std::vector<double> lower;
    std::vector<double> upper;
    double hazard_threshold = 0.8;
    double risk_low = 0.0;
    double risk_high = 1.0;

    SearchSpace() = default;
    SearchSpace(std::vector<double> lo, std::vector<double> hi, double threshold,
                double f_low = 0.0, double f_high = 1.0);

    std::size_t dim() const { return lower.size(); }
    double span(std::size_t d) const { return upper[d] - lower[d]; }
    double volume() const;
    HazardBox box() const { return HazardBox(lower, upper); }

    bool contains(std::span<const double> p) const;
    /// Maps p into the unit cube of this space.
    Point normalize(std::span<const double> p) const;
    Point denormalize(std::span<const double> u) const;

    bool is_hazardous(double risk) const { return risk > hazard_threshold; }
    double clamp_risk(double risk) const;

    /// Throws Error unless lower < upper on every axis and f_low <= f_b <= f_up.
    void validate() const;
};

struct SampleRecord {
    Point point;
    double risk = 0.0;
    bool hazardous = false;
    double density = 1.0;
    double loss = 0.0;
    std::size_t sample_index = 0;
};

/// Clamps the raw objective value into the metric bounds and labels it.
/// `clamped` (optional) reports whether the raw value was out of range.
SampleRecord make_record(const SearchSpace& space, Point point, double raw_risk,
                         std::size_t index, bool* clamped = nullptr);

/// Row-major point storage used by the numeric kernels.
struct PointSet {
    std::size_t dim = 0;
    std::vector<double> data;

    PointSet() = default;
    explicit PointSet(std::size_t d) : dim(d) {}

    std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
    void push_back(std::span<const double> p);
};

void check_dim(std::size_t expected, std::size_t got, const char* what);

}  // namespace hazmap
