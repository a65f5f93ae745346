#pragma once

#include <span>
#include <vector>

#include "hazmap/space.hpp"

namespace hazmap {

inline constexpr double kMinBandwidth = 1e-3;

/// Gaussian product-kernel density estimate over coordinates normalised to
/// the unit cube of the search space. Densities are per unit normalised volume.
class DensityModel {
public:
    DensityModel() = default;

    double density_at(std::span<const double> p) const;
    /// Densities at many points through the parallel kernel.
    std::vector<double> densities_at(const PointSet& points) const;

    const std::vector<double>& bandwidth() const { return bandwidth_; }
    std::size_t sample_count() const { return samples_.size(); }

private:
    friend DensityModel fit_density(std::span<const SampleRecord>, const SearchSpace&);

    PointSet normalized(const PointSet& points) const;

    std::vector<double> lower_;
    std::vector<double> span_;
    std::vector<double> bandwidth_;
    std::vector<double> inv_bandwidth_;
    PointSet samples_;
    double scale_ = 0.0;
};

/// Scott's rule per axis on normalised coordinates, floored at kMinBandwidth.
DensityModel fit_density(std::span<const SampleRecord> samples, const SearchSpace& space);

/// Writes the model density into every record (one batched kernel call).
void assign_densities(std::span<SampleRecord> records, const SearchSpace& space);

/// w_i = (1 / rho_i) / sum_j (1 / rho_j)
std::vector<double> density_weights(std::span<const double> densities);
std::vector<double> density_weights(std::span<const SampleRecord> records);

}  // namespace hazmap
