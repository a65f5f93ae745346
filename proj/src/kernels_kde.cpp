#include <algorithm>
#include <cmath>

#include "hazmap/kernels.hpp"

// Built with -ffast-math so the exp loop vectorises; kept apart from the
// neighbour search, whose distance comparisons must stay exact.

namespace hazmap::kernels {

namespace {

inline double kernel_sum_at(const PointSet& samples, std::span<const double> inv_bw,
                            std::span<const double> q)
{
    constexpr std::size_t kChunk = 256;
    const std::size_t dim = samples.dim;
    const std::size_t n = samples.size();
    double e[kChunk];
    double acc = 0.0;
    for (std::size_t base = 0; base < n; base += kChunk) {
        const std::size_t m = std::min(kChunk, n - base);
        const double* s = samples.data.data() + base * dim;
        for (std::size_t j = 0; j < m; ++j) e[j] = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double qd = q[d];
            const double w = inv_bw[d];
            for (std::size_t j = 0; j < m; ++j) {
                const double z = (qd - s[j * dim + d]) * w;
                e[j] += z * z;
            }
        }
        for (std::size_t j = 0; j < m; ++j) e[j] = std::exp(-0.5 * e[j]);
        for (std::size_t j = 0; j < m; ++j) acc += e[j];
    }
    return acc;
}

void check_kde_args(const PointSet& samples, std::span<const double> inv_bw,
                    const PointSet& queries, std::span<double> out)
{
    check_dim(samples.dim, inv_bw.size(), "gaussian_kernel_sum");
    check_dim(samples.dim, queries.dim, "gaussian_kernel_sum");
    if (out.size() != queries.size()) throw Error("gaussian_kernel_sum: output size mismatch");
}

}  // namespace

void gaussian_kernel_sum_serial(const PointSet& samples, std::span<const double> inv_bw,
                                const PointSet& queries, std::span<double> out)
{
    check_kde_args(samples, inv_bw, queries, out);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        out[i] = kernel_sum_at(samples, inv_bw, queries.row(i));
    }
}

void gaussian_kernel_sum(const PointSet& samples, std::span<const double> inv_bw,
                         const PointSet& queries, std::span<double> out)
{
    check_kde_args(samples, inv_bw, queries, out);
    const auto nq = static_cast<std::ptrdiff_t>(queries.size());
#ifdef HAZMAP_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < nq; ++i) {
        out[i] = kernel_sum_at(samples, inv_bw, queries.row(static_cast<std::size_t>(i)));
    }
}

}  // namespace hazmap::kernels
