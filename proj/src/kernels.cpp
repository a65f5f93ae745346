#include "hazmap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#ifdef HAZMAP_HAVE_OPENMP
#include <omp.h>
#endif

namespace hazmap::kernels {

namespace {

// Insertion into a sorted buffer of at most k entries.
inline void knn_at(const PointSet& train, std::span<const double> q, std::size_t k,
                   std::size_t skip, Neighbor* best)
{
    const std::size_t dim = train.dim;
    const std::size_t n = train.size();
    std::size_t filled = 0;
    const double* t = train.data.data();
    for (std::size_t j = 0; j < n; ++j, t += dim) {
        if (j == skip) continue;
        double d2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double z = q[d] - t[d];
            d2 += z * z;
        }
        if (filled == k && !(d2 < best[k - 1].dist2)) continue;
        std::size_t pos = filled < k ? filled++ : k - 1;
        // rows arrive in increasing index order, so equal distances keep the earlier row first
        while (pos > 0 && best[pos - 1].dist2 > d2) {
            best[pos] = best[pos - 1];
            --pos;
        }
        best[pos] = {d2, j};
    }
    for (std::size_t i = filled; i < k; ++i) best[i] = {0.0, kNoExclusion};
}

void check_knn_args(const PointSet& train, const PointSet& queries, std::size_t k,
                    std::span<const std::size_t> exclude)
{
    check_dim(train.dim, queries.dim, "nearest_neighbors");
    if (k == 0) throw Error("nearest_neighbors: k must be positive");
    if (!exclude.empty() && exclude.size() != queries.size()) {
        throw Error("nearest_neighbors: exclusion list size mismatch");
    }
}

}  // namespace

void nearest_neighbors_serial(const PointSet& train, const PointSet& queries, std::size_t k,
                              std::span<const std::size_t> exclude, std::vector<Neighbor>& out)
{
    check_knn_args(train, queries, k, exclude);
    out.assign(queries.size() * k, Neighbor{});
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const std::size_t skip = exclude.empty() ? kNoExclusion : exclude[i];
        knn_at(train, queries.row(i), k, skip, out.data() + i * k);
    }
}

void nearest_neighbors(const PointSet& train, const PointSet& queries, std::size_t k,
                       std::span<const std::size_t> exclude, std::vector<Neighbor>& out)
{
    check_knn_args(train, queries, k, exclude);
    out.assign(queries.size() * k, Neighbor{});
    const auto nq = static_cast<std::ptrdiff_t>(queries.size());
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < nq; ++i) {
        const auto qi = static_cast<std::size_t>(i);
        const std::size_t skip = exclude.empty() ? kNoExclusion : exclude[qi];
        knn_at(train, queries.row(qi), k, skip, out.data() + qi * k);
    }
}

std::size_t Grid::size() const
{
    if (resolution.empty()) return 0;
    std::size_t n = 1;
    for (auto r : resolution) n *= r;
    return n;
}

std::vector<std::size_t> Grid::multi_index(std::size_t flat_index) const
{
    std::vector<std::size_t> idx(dim());
    for (std::size_t d = dim(); d-- > 0;) {
        idx[d] = flat_index % resolution[d];
        flat_index /= resolution[d];
    }
    return idx;
}

void Grid::point(std::size_t flat_index, std::span<double> out) const
{
    for (std::size_t d = dim(); d-- > 0;) {
        const std::size_t i = flat_index % resolution[d];
        flat_index /= resolution[d];
        if (resolution[d] == 1) {
            out[d] = 0.5 * (lower[d] + upper[d]);
        } else {
            const double step = (upper[d] - lower[d]) / static_cast<double>(resolution[d] - 1);
            out[d] = i + 1 == resolution[d] ? upper[d] : lower[d] + step * static_cast<double>(i);
        }
    }
}

void evaluate_grid_serial(const Grid& grid, const ScalarField& f, std::span<double> out)
{
    if (out.size() != grid.size()) throw Error("evaluate_grid: output size mismatch");
    std::vector<double> p(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.point(i, p);
        out[i] = f(p);
    }
}

void evaluate_grid(const Grid& grid, const ScalarField& f, std::span<double> out)
{
    if (out.size() != grid.size()) throw Error("evaluate_grid: output size mismatch");
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    // a throw escaping an omp region calls terminate
    std::exception_ptr failure;
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp parallel
#endif
    {
        std::vector<double> p(grid.dim());
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp for schedule(static)
#endif
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                grid.point(static_cast<std::size_t>(i), p);
                out[i] = f(p);
            } catch (...) {
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp critical(hazmap_grid_failure)
#endif
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
}

void boxes_membership_serial(const Grid& grid, std::span<const HazardBox> boxes,
                             std::span<unsigned char> flags)
{
    if (flags.size() != grid.size()) throw Error("boxes_membership: output size mismatch");
    std::vector<double> p(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.point(i, p);
        unsigned char in = 0;
        for (const auto& b : boxes) {
            if (contains(b, p)) { in = 1; break; }
        }
        flags[i] = in;
    }
}

void boxes_membership(const Grid& grid, std::span<const HazardBox> boxes,
                      std::span<unsigned char> flags)
{
    if (flags.size() != grid.size()) throw Error("boxes_membership: output size mismatch");
    for (const auto& b : boxes) check_dim(grid.dim(), b.dim(), "boxes_membership");
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp parallel
#endif
    {
        std::vector<double> p(grid.dim());
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp for schedule(static)
#endif
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            grid.point(static_cast<std::size_t>(i), p);
            unsigned char in = 0;
            for (const auto& b : boxes) {
                if (contains(b, p)) { in = 1; break; }
            }
            flags[i] = in;
        }
    }
}

bool openmp_enabled()
{
#ifdef HAZMAP_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads()
{
#ifdef HAZMAP_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace hazmap::kernels
