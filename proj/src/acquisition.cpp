#include "hazmap/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hazmap {

UcbMode parse_ucb_mode(std::string_view s)
{
    if (s == "improved") return UcbMode::improved;
    if (s == "original") return UcbMode::original;
    throw Error("unknown UCB mode '" + std::string(s) + "'");
}

std::string_view to_string(UcbMode m)
{
    return m == UcbMode::improved ? "improved" : "original";
}

void UcbConfig::validate() const
{
    if (!(c_p >= 0.0)) throw Error("UcbConfig: c_p must be >= 0");
    if (!(dropout_k >= 1.0)) throw Error("UcbConfig: dropout k must be >= 1");
    if (batch < 1) throw Error("UcbConfig: batch size must be >= 1");
}

bool is_boundary(std::span<const std::size_t> members, std::span<const SampleRecord> records, double f_b)
{
    bool above = false, below = false;
    for (std::size_t m : members) {
        above = above || records[m].risk > f_b;
        below = below || records[m].risk < f_b;
    }
    return above && below;
}

double boundary_value_from(double min_above, double max_below, double f_b, double f_low, double f_up)
{
    const double half_pi = 0.5 * std::numbers::pi;
    const double a = f_up > f_b ? (min_above - f_b) / (f_up - f_b) : 0.0;
    const double b = f_b > f_low ? (f_b - max_below) / (f_b - f_low) : 0.0;
    const double ta = std::sqrt(std::sin(std::clamp(a, 0.0, 1.0) * half_pi));
    const double tb = std::sqrt(std::sin(std::clamp(b, 0.0, 1.0) * half_pi));
    return 0.5 * (ta + tb);
}

double boundary_value(std::span<const std::size_t> members, std::span<const SampleRecord> records,
                      double f_b, double f_low, double f_up)
{
    double min_above = std::numeric_limits<double>::infinity();
    double max_below = -std::numeric_limits<double>::infinity();
    for (std::size_t m : members) {
        const double r = records[m].risk;
        if (r > f_b) min_above = std::min(min_above, r);
        if (r < f_b) max_below = std::max(max_below, r);
    }
    if (!std::isfinite(min_above) || !std::isfinite(max_below)) {
        throw Error("boundary_value: node is not a boundary subspace");
    }
    return boundary_value_from(min_above, max_below, f_b, f_low, f_up);
}

double dropout_prob(std::size_t n_sampled, double k)
{
    if (!(k >= 1.0)) throw Error("dropout_prob: k must be >= 1");
    const auto n = static_cast<double>(n_sampled);
    return n < k ? 1.0 - n / k : 0.0;
}

double normalize(double x, std::span<const double> all, double x_low)
{
    if (all.empty()) throw Error("normalize: empty population");
    const double hi = *std::max_element(all.begin(), all.end());
    if (!(hi > x_low)) return 0.0;
    return (x - x_low) / (hi - x_low);
}

double convex_g(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) throw Error("convex_g: argument outside [0, 1]");
    if (x == 0.0) return 0.0;
    return 1.0 / (1.0 - std::log10(x));
}

double density_term(double parent_density, double child_density)
{
    return std::log(parent_density / child_density);
}

void annotate_boundaries(PartitionTree& tree, std::span<const SampleRecord> records,
                         const SearchSpace& space)
{
    for (auto& n : tree.nodes) {
        n.boundary = !n.members.empty() && is_boundary(n.members, records, space.hazard_threshold);
        n.v_boundary = n.boundary ? boundary_value(n.members, records, space.hazard_threshold,
                                                   space.risk_low, space.risk_high)
                                  : 0.0;
    }
}

std::array<ChildScore, 2> score_children(const PartitionTree& tree, int parent,
                                         const ScoringContext& ctx, Rng& rng)
{
    const auto& cfg = *ctx.config;
    const auto& p = tree.node(parent);
    if (p.is_leaf()) throw Error("score_children: node is a leaf");
    const std::array<int, 2> ids{p.left, p.right};

    std::array<ChildScore, 2> out;
    std::array<double, 2> exploit{}, loss_ratio{};
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& c = tree.node(ids[i]);
        auto& s = out[i];
        s.node = c.id;
        s.boundary = c.boundary;
        double bonus = 0.0;
        if (cfg.mode == UcbMode::improved && c.boundary) {
            s.dropped = uniform01(rng) < dropout_prob(ctx.n_sampled, cfg.dropout_k);
            if (!s.dropped) bonus = c.v_boundary;
        }
        exploit[i] = c.stats.v_exploit + bonus;
        s.exploit_input = exploit[i];
        loss_ratio[i] = p.stats.mean_loss > 0.0 ? c.stats.mean_loss / p.stats.mean_loss : 1.0;
        s.density_term = density_term(p.stats.mean_density, c.stats.mean_density);
    }
    for (std::size_t i = 0; i < 2; ++i) {
        auto& s = out[i];
        s.exploit_term = convex_g(std::clamp(normalize(exploit[i], exploit, ctx.f_low), 0.0, 1.0));
        s.loss_term = ctx.use_loss ? convex_g(std::clamp(normalize(loss_ratio[i], loss_ratio, 0.0), 0.0, 1.0))
                                   : 1.0;
        s.score = s.exploit_term * s.loss_term + cfg.c_p * s.density_term;
    }
    return out;
}

int select_leaf(const PartitionTree& tree, const ScoringContext& ctx, Rng& rng,
                std::vector<SelectionStep>* trace)
{
    int id = 0;
    while (!tree.node(id).is_leaf()) {
        const auto scores = score_children(tree, id, ctx, rng);
        const int chosen = scores[1].score > scores[0].score ? scores[1].node : scores[0].node;
        if (trace) trace->push_back({id, scores, chosen});
        id = chosen;
    }
    return id;
}

std::vector<Point> sample_in_leaf(const HazardBox& region, std::size_t count, Rng& rng)
{
    std::vector<Point> pts(count, Point(region.dim()));
    for (auto& p : pts) {
        for (std::size_t d = 0; d < region.dim(); ++d) {
            p[d] = region.lower[d] + uniform01(rng) * region.width(d);
        }
    }
    return pts;
}

}  // namespace hazmap
