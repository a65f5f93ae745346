#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "hazmap/partition_tree.hpp"
#include "hazmap/space.hpp"

namespace hazmap {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class UcbMode { improved, original };

UcbMode parse_ucb_mode(std::string_view s);
std::string_view to_string(UcbMode m);

struct UcbConfig {
    double c_p = 0.5;
    /// Sample count at which boundary dropout switches off.
    double dropout_k = 360.0;
    UcbMode mode = UcbMode::improved;
    std::size_t batch = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// max risk > f_b and min risk < f_b over the members.
bool is_boundary(std::span<const std::size_t> members, std::span<const SampleRecord> records, double f_b);

/// Mean of the square-rooted sine terms for the closest risks above and below
/// the threshold. Both arguments are distances to f_b scaled onto [0, pi/2].
double boundary_value_from(double min_above, double max_below, double f_b, double f_low, double f_up);
/// Throws when the members do not straddle f_b.
double boundary_value(std::span<const std::size_t> members, std::span<const SampleRecord> records,
                      double f_b, double f_low, double f_up);

/// 1 - n / k below k, 0 from k on.
double dropout_prob(std::size_t n_sampled, double k);

/// (x - x_low) / (max(all) - x_low); 0 when max(all) == x_low.
double normalize(double x, std::span<const double> all, double x_low);

/// 1 / (1 - log10 x) on (0, 1], 0 at x = 0.
double convex_g(double x);

/// ln(parent / child) of the mean densities.
double density_term(double parent_density, double child_density);

/// Sets `boundary` and `v_boundary` on every node.
void annotate_boundaries(PartitionTree& tree, std::span<const SampleRecord> records,
                         const SearchSpace& space);

struct ChildScore {
    int node = -1;
    bool boundary = false;
    bool dropped = false;
    double exploit_input = 0.0;
    double exploit_term = 0.0;
    double loss_term = 1.0;
    double density_term = 0.0;
    double score = 0.0;
};

struct ScoringContext {
    const UcbConfig* config = nullptr;
    std::size_t n_sampled = 0;
    double f_low = 0.0;
    /// When false the loss factor is fixed to 1 (no classifier attached).
    bool use_loss = false;
};

/// Scores both children of an internal node. Normalisation runs over the two
/// siblings; one dropout variate is drawn per boundary child in improved mode.
std::array<ChildScore, 2> score_children(const PartitionTree& tree, int parent,
                                         const ScoringContext& ctx, Rng& rng);

struct SelectionStep {
    int parent = -1;
    std::array<ChildScore, 2> children;
    int chosen = -1;
};

/// Root-to-leaf descent taking the higher-scoring child; ties go to the lower id.
int select_leaf(const PartitionTree& tree, const ScoringContext& ctx, Rng& rng,
                std::vector<SelectionStep>* trace = nullptr);

/// `count` points uniform in the box.
std::vector<Point> sample_in_leaf(const HazardBox& region, std::size_t count, Rng& rng);

}  // namespace hazmap
