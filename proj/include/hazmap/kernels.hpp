#pragma once

// Data-parallel inner loops. Every kernel has a `_serial` reference that the
// tests compare against; the unsuffixed version runs under OpenMP when it is
// enabled and falls back to the serial loop otherwise. Each output element is
// computed by one thread with a fixed summation order, so both versions give
// bitwise-identical results.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hazmap/space.hpp"

namespace hazmap::kernels {

/// out[q] = sum_j exp(-0.5 * sum_d ((q_d - s_jd) * inv_bw_d)^2)
void gaussian_kernel_sum_serial(const PointSet& samples, std::span<const double> inv_bw,
                                const PointSet& queries, std::span<double> out);
void gaussian_kernel_sum(const PointSet& samples, std::span<const double> inv_bw,
                         const PointSet& queries, std::span<double> out);

struct Neighbor {
    double dist2 = 0.0;
    std::size_t index = 0;
};

inline constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

/// k nearest training rows for every query, ordered by (distance, index).
/// `exclude[q]` names a training row to skip for query q (kNoExclusion for none);
/// an empty span disables exclusion. Output is queries.size() * k entries; when
/// fewer than k rows are eligible the tail has index kNoExclusion.
void nearest_neighbors_serial(const PointSet& train, const PointSet& queries, std::size_t k,
                              std::span<const std::size_t> exclude, std::vector<Neighbor>& out);
void nearest_neighbors(const PointSet& train, const PointSet& queries, std::size_t k,
                       std::span<const std::size_t> exclude, std::vector<Neighbor>& out);

/// Uniform tensor grid over a box; the last axis varies fastest.
struct Grid {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::size_t> resolution;

    std::size_t dim() const { return lower.size(); }
    std::size_t size() const;
    /// Resolution 1 on an axis places the single node at the axis midpoint.
    void point(std::size_t flat_index, std::span<double> out) const;
    std::vector<std::size_t> multi_index(std::size_t flat_index) const;
};

using ScalarField = std::function<double(std::span<const double>)>;

void evaluate_grid_serial(const Grid& grid, const ScalarField& f, std::span<double> out);
void evaluate_grid(const Grid& grid, const ScalarField& f, std::span<double> out);

/// flags[i] = 1 when grid node i lies inside any of the boxes.
void boxes_membership_serial(const Grid& grid, std::span<const HazardBox> boxes,
                             std::span<unsigned char> flags);
void boxes_membership(const Grid& grid, std::span<const HazardBox> boxes,
                      std::span<unsigned char> flags);

bool openmp_enabled();
int max_threads();

}  // namespace hazmap::kernels
