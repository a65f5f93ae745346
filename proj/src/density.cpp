#include "hazmap/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hazmap/kernels.hpp"

namespace hazmap {

DensityModel fit_density(std::span<const SampleRecord> samples, const SearchSpace& space)
{
    if (samples.size() < 2) throw Error("fit_density: need at least 2 samples");
    const std::size_t dim = space.dim();
    const auto n = static_cast<double>(samples.size());

    DensityModel m;
    m.lower_ = space.lower;
    m.span_.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) m.span_[d] = space.span(d);

    m.samples_ = PointSet(dim);
    m.samples_.data.reserve(samples.size() * dim);
    std::vector<double> u(dim);
    for (const auto& r : samples) {
        check_dim(dim, r.point.size(), "fit_density");
        for (std::size_t d = 0; d < dim; ++d) u[d] = (r.point[d] - m.lower_[d]) / m.span_[d];
        m.samples_.push_back(u);
    }

    const double factor = std::pow(n, -1.0 / (static_cast<double>(dim) + 4.0));
    m.bandwidth_.resize(dim);
    m.inv_bandwidth_.resize(dim);
    double log_norm = -std::log(n);
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.samples_.size(); ++i) mean += m.samples_.row(i)[d];
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < m.samples_.size(); ++i) {
            const double z = m.samples_.row(i)[d] - mean;
            var += z * z;
        }
        var /= (n - 1.0);
        const double h = std::max(std::sqrt(var) * factor, kMinBandwidth);
        m.bandwidth_[d] = h;
        m.inv_bandwidth_[d] = 1.0 / h;
        log_norm -= std::log(h * std::sqrt(2.0 * std::numbers::pi));
    }
    m.scale_ = std::exp(log_norm);
    return m;
}

PointSet DensityModel::normalized(const PointSet& points) const
{
    check_dim(lower_.size(), points.dim, "DensityModel");
    PointSet out(points.dim);
    out.data.resize(points.data.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto src = points.row(i);
        auto dst = out.row(i);
        for (std::size_t d = 0; d < points.dim; ++d) dst[d] = (src[d] - lower_[d]) / span_[d];
    }
    return out;
}

std::vector<double> DensityModel::densities_at(const PointSet& points) const
{
    if (samples_.size() == 0) throw Error("DensityModel: not fitted");
    const PointSet q = normalized(points);
    std::vector<double> out(q.size());
    kernels::gaussian_kernel_sum(samples_, inv_bandwidth_, q, out);
    for (double& v : out) v = std::max(v * scale_, std::numeric_limits<double>::min());
    return out;
}

double DensityModel::density_at(std::span<const double> p) const
{
    PointSet one(p.size());
    one.push_back(p);
    return densities_at(one).front();
}

void assign_densities(std::span<SampleRecord> records, const SearchSpace& space)
{
    const DensityModel model = fit_density(records, space);
    PointSet pts(space.dim());
    pts.data.reserve(records.size() * space.dim());
    for (const auto& r : records) pts.push_back(r.point);
    const auto rho = model.densities_at(pts);
    for (std::size_t i = 0; i < records.size(); ++i) records[i].density = rho[i];
}

std::vector<double> density_weights(std::span<const double> densities)
{
    if (densities.empty()) throw Error("density_weights: empty node");
    std::vector<double> w(densities.size());
    double total = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        if (!(densities[i] > 0.0)) throw Error("density_weights: densities must be positive");
        w[i] = 1.0 / densities[i];
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> density_weights(std::span<const SampleRecord> records)
{
    std::vector<double> rho(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) rho[i] = records[i].density;
    return density_weights(rho);
}

}  // namespace hazmap
