#include "hazmap/space.hpp"

#include <algorithm>
#include <cmath>

namespace hazmap {

void check_dim(std::size_t expected, std::size_t got, const char* what)
{
    if (expected != got) {
        throw Error(std::string(what) + ": dimension mismatch (expected " +
                    std::to_string(expected) + ", got " + std::to_string(got) + ")");
    }
}

HazardBox::HazardBox(std::vector<double> lo, std::vector<double> hi, std::size_t members)
    : lower(std::move(lo)), upper(std::move(hi)), member_count(members)
{
    check_dim(lower.size(), upper.size(), "HazardBox");
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!(lower[d] <= upper[d])) {
            throw Error("HazardBox: lower bound exceeds upper bound on axis " + std::to_string(d));
        }
    }
}

Point HazardBox::center() const
{
    Point c(dim());
    for (std::size_t d = 0; d < dim(); ++d) c[d] = 0.5 * (lower[d] + upper[d]);
    return c;
}

double HazardBox::half_diagonal() const
{
    double s = 0.0;
    for (std::size_t d = 0; d < dim(); ++d) {
        const double h = 0.5 * width(d);
        s += h * h;
    }
    return std::sqrt(s);
}

bool contains(const HazardBox& box, std::span<const double> p)
{
    check_dim(box.dim(), p.size(), "contains");
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (p[d] < box.lower[d] || p[d] > box.upper[d]) return false;
    }
    return true;
}

double box_volume(const HazardBox& box)
{
    double v = 1.0;
    for (std::size_t d = 0; d < box.dim(); ++d) v *= box.width(d);
    return v;
}

HazardBox bounding_hull(const HazardBox& a, const HazardBox& b)
{
    check_dim(a.dim(), b.dim(), "bounding_hull");
    HazardBox h = a;
    for (std::size_t d = 0; d < a.dim(); ++d) {
        h.lower[d] = std::min(a.lower[d], b.lower[d]);
        h.upper[d] = std::max(a.upper[d], b.upper[d]);
    }
    h.member_count = a.member_count + b.member_count;
    return h;
}

double overlap_length(const HazardBox& a, const HazardBox& b, std::size_t d)
{
    const double begin = std::max(a.lower[d], b.lower[d]);
    const double end = std::min(a.upper[d], b.upper[d]);
    return std::max(0.0, end - begin);
}

double intersection_volume(const HazardBox& a, const HazardBox& b)
{
    check_dim(a.dim(), b.dim(), "intersection_volume");
    double v = 1.0;
    for (std::size_t d = 0; d < a.dim(); ++d) v *= overlap_length(a, b, d);
    return v;
}

bool overlaps_interior(const HazardBox& a, const HazardBox& b)
{
    check_dim(a.dim(), b.dim(), "overlaps_interior");
    for (std::size_t d = 0; d < a.dim(); ++d) {
        if (!(overlap_length(a, b, d) > 0.0)) return false;
    }
    return true;
}

HazardBox points_hull(std::span<const Point> points)
{
    if (points.empty()) throw Error("points_hull: no points");
    HazardBox box(points.front(), points.front(), 1);
    for (std::size_t i = 1; i < points.size(); ++i) {
        check_dim(box.dim(), points[i].size(), "points_hull");
        for (std::size_t d = 0; d < box.dim(); ++d) {
            box.lower[d] = std::min(box.lower[d], points[i][d]);
            box.upper[d] = std::max(box.upper[d], points[i][d]);
        }
    }
    box.member_count = points.size();
    return box;
}

SearchSpace::SearchSpace(std::vector<double> lo, std::vector<double> hi, double threshold,
                         double f_low, double f_high)
    : lower(std::move(lo)), upper(std::move(hi)), hazard_threshold(threshold),
      risk_low(f_low), risk_high(f_high)
{
    validate();
}

void SearchSpace::validate() const
{
    if (lower.empty()) throw Error("SearchSpace: dimension must be positive");
    check_dim(lower.size(), upper.size(), "SearchSpace");
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!(lower[d] < upper[d])) {
            throw Error("SearchSpace: empty range on axis " + std::to_string(d));
        }
    }
    if (!(risk_low <= hazard_threshold && hazard_threshold <= risk_high)) {
        throw Error("SearchSpace: hazard threshold outside metric bounds");
    }
}

double SearchSpace::volume() const
{
    double v = 1.0;
    for (std::size_t d = 0; d < dim(); ++d) v *= span(d);
    return v;
}

bool SearchSpace::contains(std::span<const double> p) const
{
    check_dim(dim(), p.size(), "SearchSpace::contains");
    for (std::size_t d = 0; d < dim(); ++d) {
        if (p[d] < lower[d] || p[d] > upper[d]) return false;
    }
    return true;
}

Point SearchSpace::normalize(std::span<const double> p) const
{
    check_dim(dim(), p.size(), "SearchSpace::normalize");
    Point u(dim());
    for (std::size_t d = 0; d < dim(); ++d) u[d] = (p[d] - lower[d]) / span(d);
    return u;
}

Point SearchSpace::denormalize(std::span<const double> u) const
{
    check_dim(dim(), u.size(), "SearchSpace::denormalize");
    Point p(dim());
    for (std::size_t d = 0; d < dim(); ++d) p[d] = lower[d] + u[d] * span(d);
    return p;
}

double SearchSpace::clamp_risk(double risk) const
{
    return std::clamp(risk, risk_low, risk_high);
}

SampleRecord make_record(const SearchSpace& space, Point point, double raw_risk,
                         std::size_t index, bool* clamped)
{
    check_dim(space.dim(), point.size(), "make_record");
    if (!std::isfinite(raw_risk)) throw Error("make_record: objective returned a non-finite value");
    SampleRecord r;
    r.point = std::move(point);
    r.risk = space.clamp_risk(raw_risk);
    r.hazardous = space.is_hazardous(r.risk);
    r.sample_index = index;
    if (clamped) *clamped = (r.risk != raw_risk);
    return r;
}

void PointSet::push_back(std::span<const double> p)
{
    check_dim(dim, p.size(), "PointSet::push_back");
    data.insert(data.end(), p.begin(), p.end());
}

}  // namespace hazmap
