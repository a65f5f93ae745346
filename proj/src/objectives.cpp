#include "hazmap/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "json.hpp"

namespace hazmap {

void GaussianSpec::validate() const
{
    if (dim < 1) throw Error("GaussianSpec: dim must be >= 1");
    if (!(sigma > 0.0)) throw Error("GaussianSpec: sigma must be positive");
    if (!(half_range > 0.0)) throw Error("GaussianSpec: half_range must be positive");
}

double eval_gaussian(const GaussianSpec& spec, std::span<const double> p)
{
    check_dim(spec.dim, p.size(), "eval_gaussian");
    const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
    double base = 0.0;
    for (double v : p) base += v * v;
    double total = 0.0;
    for (std::size_t i = 0; i < spec.dim; ++i) {
        // ||p + bias * e_i||^2 = ||p||^2 + 2 bias p_i + bias^2
        const double r2 = base + spec.bias * (2.0 * p[i] + spec.bias);
        total += std::exp(-std::max(r2, 0.0) * inv);
    }
    return total;
}

SearchSpace gaussian_space(const GaussianSpec& spec)
{
    spec.validate();
    return SearchSpace(std::vector<double>(spec.dim, -spec.half_range),
                       std::vector<double>(spec.dim, spec.half_range), spec.threshold, 0.0, 1.0);
}

std::vector<Point> gaussian_mode_centers(const GaussianSpec& spec)
{
    std::vector<Point> centers(spec.dim, Point(spec.dim, 0.0));
    for (std::size_t i = 0; i < spec.dim; ++i) centers[i][i] = -spec.bias;
    return centers;
}

double gaussian_hazard_radius(const GaussianSpec& spec)
{
    if (!(spec.threshold > 0.0 && spec.threshold < 1.0)) {
        throw Error("gaussian_hazard_radius: threshold must lie in (0, 1)");
    }
    return std::sqrt(-2.0 * spec.sigma * spec.sigma * std::log(spec.threshold));
}

std::vector<HazardBox> gaussian_truth_boxes(const GaussianSpec& spec)
{
    const double r = gaussian_hazard_radius(spec);
    std::vector<HazardBox> boxes;
    for (const auto& c : gaussian_mode_centers(spec)) {
        std::vector<double> lo(spec.dim), hi(spec.dim);
        for (std::size_t d = 0; d < spec.dim; ++d) {
            lo[d] = std::max(c[d] - r, -spec.half_range);
            hi[d] = std::min(c[d] + r, spec.half_range);
        }
        boxes.emplace_back(std::move(lo), std::move(hi));
    }
    return boxes;
}

double gaussian_analytic_hazard_fraction(const GaussianSpec& spec)
{
    const double r = gaussian_hazard_radius(spec);
    const double n = static_cast<double>(spec.dim);
    const double ball = std::pow(std::numbers::pi, n / 2.0) * std::pow(r, n) / std::tgamma(n / 2.0 + 1.0);
    const double space = std::pow(2.0 * spec.half_range, n);
    return static_cast<double>(spec.dim) * ball / space;
}

void CutInSpec::validate() const
{
    if (!(s1_min < s1_max && v1_min < v1_max && tlc_min < tlc_max)) {
        throw Error("CutInSpec: parameter ranges must be non-empty");
    }
    if (!(tlc_min > 0.0)) throw Error("CutInSpec: lane-change duration must be positive");
    if (!(dt > 0.0 && horizon > 0.0)) throw Error("CutInSpec: bad time discretisation");
    if (!(gap_ref > 0.0 && max_decel > 0.0 && reaction_delay >= 0.0)) {
        throw Error("CutInSpec: controller parameters out of range");
    }
}

SearchSpace cut_in_space(const CutInSpec& spec)
{
    spec.validate();
    return SearchSpace({spec.s1_min, spec.v1_min, spec.tlc_min},
                       {spec.s1_max, spec.v1_max, spec.tlc_max}, spec.threshold, 0.0, 1.0);
}

CutInOutcome simulate_cut_in_detailed(const CutInSpec& spec, std::span<const double> p)
{
    check_dim(3, p.size(), "simulate_cut_in");
    const double s1 = p[0];
    const double v1 = p[1];
    const double t_lc = p[2];
    const double len = spec.vehicle_length;
    const double half_lane = 0.5 * spec.lane_width;
    const double half_width = 0.5 * spec.vehicle_width;

    double x_ego = 0.0;
    double v_ego = spec.v_ego;
    double x_bv = s1 + len;  // centre-to-centre
    double detect_time = -1.0;

    CutInOutcome out;
    out.min_gap = std::numeric_limits<double>::infinity();

    const auto steps = static_cast<long>(std::llround(spec.horizon / spec.dt));
    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * spec.dt;

        double y_bv = spec.lane_width;
        if (t >= spec.t_start + t_lc) {
            y_bv = 0.0;
        } else if (t > spec.t_start) {
            const double tau = (t - spec.t_start) / t_lc;
            const double s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
            y_bv = spec.lane_width * (1.0 - s);
        }

        const double intrusion = half_lane - (y_bv - half_width);
        const double dx = x_bv - x_ego;
        if (std::abs(dx) < len && std::abs(y_bv) < spec.vehicle_width) out.collided = true;
        if (intrusion > spec.intrusion_trigger) {
            if (detect_time < 0.0) detect_time = t;
            out.min_gap = std::min(out.min_gap, std::max(0.0, std::abs(dx) - len));
        }

        if (detect_time >= 0.0 && t >= detect_time + spec.reaction_delay && v_ego > v1) {
            if (out.brake_onset < 0.0) out.brake_onset = t;
            v_ego = std::max(v1, v_ego - spec.max_decel * spec.dt);
        }
        x_ego += v_ego * spec.dt;
        x_bv += v1 * spec.dt;
    }

    if (out.collided) {
        out.risk = 1.0;
        out.min_gap = 0.0;
    } else if (std::isfinite(out.min_gap)) {
        out.risk = std::clamp(1.0 - out.min_gap / spec.gap_ref, 0.0, 1.0);
    }
    return out;
}

double simulate_cut_in(const CutInSpec& spec, std::span<const double> p)
{
    return simulate_cut_in_detailed(spec, p).risk;
}

Objective make_gaussian_objective(const GaussianSpec& spec, std::string name)
{
    Objective obj;
    obj.name = std::move(name);
    obj.space = gaussian_space(spec);
    obj.evaluate = [spec](std::span<const double> p) { return eval_gaussian(spec, p); };
    obj.truth_boxes = gaussian_truth_boxes(spec);
    obj.mode_centers = gaussian_mode_centers(spec);
    return obj;
}

Objective make_cut_in_objective(const CutInSpec& spec)
{
    Objective obj;
    obj.name = "cutin-3d";
    obj.space = cut_in_space(spec);
    obj.evaluate = [spec](std::span<const double> p) { return simulate_cut_in(spec, p); };
    obj.scenario = true;
    return obj;
}

Objective make_objective(std::string_view name)
{
    if (name == "gaussian-2d") return make_gaussian_objective(GaussianSpec{.dim = 2}, "gaussian-2d");
    if (name == "gaussian-4d") return make_gaussian_objective(GaussianSpec{.dim = 4}, "gaussian-4d");
    if (name == "cutin-3d") return make_cut_in_objective(CutInSpec{});
    throw Error("unknown objective '" + std::string(name) + "'");
}

Point GroundTruth::point(std::size_t i) const
{
    Point p(grid.dim());
    grid.point(i, p);
    return p;
}

GroundTruth grid_oracle(const Objective& objective, std::span<const std::size_t> resolution,
                        std::size_t cap)
{
    const auto& space = objective.space;
    check_dim(space.dim(), resolution.size(), "grid_oracle");
    double nodes = 1.0;
    for (auto r : resolution) {
        if (r < 2) throw Error("grid_oracle: resolution must be >= 2 on every axis");
        nodes *= static_cast<double>(r);
    }
    if (nodes > static_cast<double>(cap)) {
        throw Error("grid_oracle: " + std::to_string(static_cast<long long>(nodes)) +
                    " nodes exceed the cap of " + std::to_string(cap));
    }

    GroundTruth gt;
    gt.grid = kernels::Grid{space.lower, space.upper, {resolution.begin(), resolution.end()}};
    gt.threshold = space.hazard_threshold;
    gt.risk.resize(gt.grid.size());
    kernels::evaluate_grid(gt.grid,
                           [&](std::span<const double> p) { return space.clamp_risk(objective.evaluate(p)); },
                           gt.risk);
    gt.hazardous.resize(gt.risk.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < gt.risk.size(); ++i) {
        gt.hazardous[i] = space.is_hazardous(gt.risk[i]) ? 1 : 0;
        count += gt.hazardous[i];
    }
    gt.hazardous_fraction = gt.risk.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(gt.risk.size());
    return gt;
}

GroundTruth grid_oracle(const Objective& objective, std::size_t resolution, std::size_t cap)
{
    std::vector<std::size_t> res(objective.space.dim(), resolution);
    return grid_oracle(objective, res, cap);
}

std::vector<HazardBox> truth_boxes_from_grid(const GroundTruth& truth)
{
    const auto& grid = truth.grid;
    const std::size_t n = grid.size();
    const std::size_t dim = grid.dim();
    std::vector<std::size_t> stride(dim, 1);
    for (std::size_t d = dim - 1; d-- > 0;) stride[d] = stride[d + 1] * grid.resolution[d + 1];

    std::vector<unsigned char> seen(n, 0);
    std::vector<HazardBox> boxes;
    std::vector<std::size_t> stack;
    Point p(dim);
    for (std::size_t start = 0; start < n; ++start) {
        if (!truth.hazardous[start] || seen[start]) continue;
        grid.point(start, p);
        HazardBox box(p, p, 0);
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            grid.point(cur, p);
            for (std::size_t d = 0; d < dim; ++d) {
                box.lower[d] = std::min(box.lower[d], p[d]);
                box.upper[d] = std::max(box.upper[d], p[d]);
            }
            ++box.member_count;
            const auto idx = grid.multi_index(cur);
            for (std::size_t d = 0; d < dim; ++d) {
                if (idx[d] > 0) {
                    const std::size_t nb = cur - stride[d];
                    if (truth.hazardous[nb] && !seen[nb]) { seen[nb] = 1; stack.push_back(nb); }
                }
                if (idx[d] + 1 < grid.resolution[d]) {
                    const std::size_t nb = cur + stride[d];
                    if (truth.hazardous[nb] && !seen[nb]) { seen[nb] = 1; stack.push_back(nb); }
                }
            }
        }
        boxes.push_back(std::move(box));
    }
    return boxes;
}

void write_ground_truth_csv(const GroundTruth& truth, std::ostream& out)
{
    const std::size_t dim = truth.grid.dim();
    for (std::size_t d = 0; d < dim; ++d) out << 'x' << d << ',';
    out << "risk,hazardous\n";
    Point p(dim);
    auto old_prec = out.precision(17);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth.grid.point(i, p);
        for (double v : p) out << v << ',';
        out << truth.risk[i] << ',' << static_cast<int>(truth.hazardous[i]) << '\n';
    }
    out.precision(old_prec);
}

std::string ground_truth_sidecar_json(const GroundTruth& truth, std::string_view objective)
{
    nlohmann::json j;
    j["schema"] = "hazmap.ground_truth/1";
    j["objective"] = objective;
    j["resolution"] = truth.grid.resolution;
    j["lower"] = truth.grid.lower;
    j["upper"] = truth.grid.upper;
    j["threshold"] = truth.threshold;
    j["nodes"] = truth.size();
    j["hazardous_fraction"] = truth.hazardous_fraction;
    return j.dump(2) + "\n";
}

}  // namespace hazmap
