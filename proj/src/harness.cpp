#include "hazmap/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "hazmap/density.hpp"
#include "json.hpp"

namespace hazmap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PhaseTimer {
    std::map<std::string, double>& sink;
    std::string name;
    Clock::time_point t0 = Clock::now();
    ~PhaseTimer() { sink[name] += seconds_since(t0); }
};

double resolved_dropout_k(const RunConfig& c)
{
    if (c.dropout_k_explicit) return c.ucb.dropout_k;
    return std::max(1.0, c.dropout_fraction * static_cast<double>(c.sample_limit()));
}

std::string trace_line(std::size_t n, int leaf, const std::vector<SelectionStep>& steps)
{
    nlohmann::json j;
    j["n"] = n;
    j["leaf"] = leaf;
    auto& arr = j["steps"] = nlohmann::json::array();
    for (const auto& s : steps) {
        nlohmann::json step{{"parent", s.parent}, {"chosen", s.chosen}};
        for (const auto& c : s.children) {
            step["children"].push_back({{"node", c.node},
                                        {"boundary", c.boundary},
                                        {"dropped", c.dropped},
                                        {"exploit", c.exploit_term},
                                        {"loss", c.loss_term},
                                        {"density", c.density_term},
                                        {"score", c.score}});
        }
        arr.push_back(std::move(step));
    }
    return j.dump();
}

std::vector<IdentifiedDomain> identify_for(Algorithm algorithm, std::span<const SampleRecord> records,
                                           const RunConfig& config, const SearchSpace& space,
                                           PartitionTree* tree_out)
{
    PartitionTree tree = algorithm == Algorithm::item ? rebuild_tree(records, space, config.tree)
                                                      : single_node_tree(records, space);
    auto domains = identify_domains(tree, records, space.hazard_threshold, config.identify);
    if (tree_out) *tree_out = std::move(tree);
    return domains;
}

MetricReport compute_metrics(std::span<const SampleRecord> records, std::span<const IdentifiedDomain> domains,
                             const RunConfig& config, const EvaluationContext& ctx)
{
    MetricReport m;
    const auto boxes = domain_boxes(domains);
    m.per_gt = breakdown(ctx.truth_boxes, boxes);
    double api_sum = 0.0, adi_sum = 0.0;
    bool any = false;
    for (const auto& b : m.per_gt) {
        api_sum += b.api;
        adi_sum += b.adi;
        any = any || !b.matched.empty();
    }
    if (!m.per_gt.empty()) {
        m.api = api_sum / static_cast<double>(m.per_gt.size());
        m.adi = adi_sum / static_cast<double>(m.per_gt.size());
    }
    m.no_detection = !any;

    if (records.empty()) return m;
    const auto model = train_classifier(records, ctx.objective.space, config.classifier);
    m.f2_grid = ctx.objective.scenario ? f2_grid_classifier(model, ctx.truth) : f2_grid_boxes(boxes, ctx.truth);
    const std::size_t res = config.ratio_resolution ? config.ratio_resolution
                                                    : default_ratio_resolution(ctx.objective);
    m.hazard_ratio = hazard_ratio_estimate(model, ctx.objective.space, res);
    return m;
}

RunReport run_search(const RunConfig& config_in, std::uint64_t seed, const EvaluationContext& ctx,
                     Algorithm algorithm)
{
    config_in.validate();
    RunConfig config = config_in;
    config.ucb.dropout_k = resolved_dropout_k(config_in);
    config.ucb.seed = seed;
    config.seeds = {seed};

    const auto t_total = Clock::now();
    const Objective& objective = ctx.objective;
    const SearchSpace& space = objective.space;

    RunReport report;
    report.algorithm = algorithm;
    report.config = config;
    report.seed = seed;
    report.truth_boxes = ctx.truth_boxes;

    Rng rng(seed);
    const std::size_t limit = config.sample_limit();
    const std::size_t initial = std::min(limit, config.initial_samples ? config.initial_samples : 10 * space.dim());
    const bool item = algorithm == Algorithm::item;
    const bool use_loss = item && objective.scenario;
    std::size_t clamped_count = 0;

    auto evaluate = [&](const std::vector<Point>& pts, bool boundary) {
        PhaseTimer timer{report.timings, "evaluate"};
        for (const auto& p : pts) {
            double raw = 0.0;
            try {
                raw = objective.evaluate(p);
            } catch (const std::exception& e) {
                throw ObjectiveError(std::string("objective failed: ") + e.what());
            }
            if (!std::isfinite(raw)) throw ObjectiveError("objective returned a non-finite risk");
            bool clamped = false;
            report.records.push_back(make_record(space, p, raw, report.records.size(), &clamped));
            report.from_boundary.push_back(boundary ? 1 : 0);
            clamped_count += clamped ? 1 : 0;
            ++report.evaluations;
        }
    };

    PartitionTree tree;
    auto refresh = [&] {
        if (!item) {
            tree = single_node_tree(report.records, space);
            return;
        }
        if (report.records.size() >= 2) {
            PhaseTimer timer{report.timings, "density"};
            assign_densities(report.records, space);
        }
        if (use_loss) {
            PhaseTimer timer{report.timings, "loss"};
            const auto model = train_classifier(report.records, space, config.classifier);
            const auto losses = model.sample_losses(report.records);
            for (std::size_t i = 0; i < losses.size(); ++i) report.records[i].loss = losses[i];
        }
        PhaseTimer timer{report.timings, "tree"};
        tree = rebuild_tree(report.records, space, config.tree);
        refresh_node_stats(tree, report.records);
        annotate_boundaries(tree, report.records, space);
    };

    try {
        evaluate(sample_in_leaf(space.box(), initial, rng), false);
        ScoringContext sctx{&config.ucb, 0, space.risk_low, use_loss};
        while (true) {
            refresh();
            const std::size_t n = report.records.size();
            if (config.stopping_enabled && is_check_point(n, config.stop)) {
                PhaseTimer timer{report.timings, "stop"};
                auto decision = should_stop(report.records, space, config.classifier, config.stop);
                report.stop_history.push_back(decision);
                report.snapshots.push_back({n, tree});
                if (decision.stop) break;
            }
            if (n >= limit) {
                if (config.stopping_enabled) {
                    report.warnings.push_back("stopping rule not met before max_samples=" + std::to_string(limit));
                }
                break;
            }
            std::size_t b = std::min(config.ucb.batch, limit - n);
            if (config.stopping_enabled) b = std::min(b, next_check_point(n, config.stop) - n);

            if (item) {
                std::vector<Point> pts;
                bool boundary = false;
                {
                    PhaseTimer timer{report.timings, "select"};
                    sctx.n_sampled = n;
                    std::vector<SelectionStep> steps;
                    const int leaf = select_leaf(tree, sctx, rng, config.trace_selections ? &steps : nullptr);
                    if (config.trace_selections) report.selection_trace.push_back(trace_line(n, leaf, steps));
                    boundary = tree.node(leaf).boundary;
                    pts = sample_in_leaf(tree.node(leaf).region, b, rng);
                }
                evaluate(pts, boundary);
            } else {
                evaluate(sample_in_leaf(space.box(), b, rng), false);
            }
        }
    } catch (const ObjectiveError& e) {
        report.complete = false;
        report.failure = e.what();
    }

    if (clamped_count > 0) {
        report.warnings.push_back(std::to_string(clamped_count) + " risk values clamped into the metric range");
    }

    {
        PhaseTimer timer{report.timings, "identify"};
        PartitionTree final_tree;
        report.domains = identify_for(algorithm, report.records, config, space, &final_tree);
        if (report.complete) {
            report.snapshots.push_back({report.records.size(), tree});
        } else {
            refresh_node_stats(final_tree, report.records);
            report.snapshots.push_back({report.records.size(), std::move(final_tree)});
        }
    }
    {
        PhaseTimer timer{report.timings, "metrics"};
        report.metrics = compute_metrics(report.records, report.domains, config, ctx);
    }
    report.timings["total"] = seconds_since(t_total);
    return report;
}

}  // namespace

void RunConfig::validate() const
{
    if (budget.has_value() == stopping_enabled) {
        throw ConfigError("exactly one of a fixed budget or the stopping rule must be active");
    }
    if (budget && *budget == 0) throw ConfigError("budget must be positive");
    if (stopping_enabled) {
        if (max_samples == 0) throw ConfigError("max_samples must be positive");
        if (stop.first_check == 0 || stop.check_every == 0) throw ConfigError("stop check cadence must be positive");
        if (!(stop.f2_threshold >= 0.0 && stop.f2_threshold <= 1.0)) throw ConfigError("f2_threshold outside [0,1]");
        if (!(stop.coverage_threshold >= 0.0 && stop.coverage_threshold <= 1.0)) {
            throw ConfigError("coverage_threshold outside [0,1]");
        }
    }
    if (seeds.empty()) throw ConfigError("seeds must be nonempty");
    if (classifier.k_nn == 0) throw ConfigError("classifier k_nn must be positive");
    if (!(dropout_fraction > 0.0)) throw ConfigError("dropout_fraction must be positive");
    if (!(tree.min_split_accuracy >= 0.5 && tree.min_split_accuracy <= 1.0)) {
        throw ConfigError("min_split_accuracy outside [0.5,1]");
    }
    if (!(identify.sibling_gap_ratio >= 0.0)) throw ConfigError("sibling_gap_ratio must be >= 0");
    if (output_dir.empty()) throw ConfigError("output_dir must be nonempty");
    try {
        UcbConfig u = ucb;
        if (!dropout_k_explicit) u.dropout_k = 1.0;
        u.validate();
        if (objective == "custom") custom.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (objective != "gaussian-2d" && objective != "gaussian-4d" && objective != "cutin-3d" &&
        objective != "custom") {
        throw ConfigError("unknown objective '" + objective + "'");
    }
}

RunConfig preset(std::string_view name)
{
    RunConfig c;
    if (name == "gaussian-2d") {
        c.objective = "gaussian-2d";
        c.budget = 900;
    } else if (name == "gaussian-4d" || name == "gaussian-4d-full") {
        c.objective = "gaussian-4d";
        c.budget = name == "gaussian-4d" ? 10000 : 30000;
    } else if (name == "cutin-3d") {
        c.objective = "cutin-3d";
        c.budget.reset();
        c.stopping_enabled = true;
        c.max_samples = 10000;
        // 0.5 leaves a third of the cube unvisited and C_T stalls near 0.5
        c.ucb.c_p = 2.0;
    } else if (name == "custom") {
        c.objective = "custom";
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

std::size_t default_truth_resolution(const Objective& objective)
{
    switch (objective.space.dim()) {
    case 1: return 2000;
    case 2: return 200;
    case 3: return 30;
    case 4: return 41;
    default: return 9;
    }
}

std::size_t default_ratio_resolution(const Objective& objective)
{
    switch (objective.space.dim()) {
    case 1: return 1000;
    case 2: return 100;
    case 3: return 30;
    case 4: return 15;
    default: return 6;
    }
}

std::string_view to_string(Algorithm a)
{
    return a == Algorithm::item ? "item" : "random";
}

Algorithm parse_algorithm(std::string_view s)
{
    if (s == "item") return Algorithm::item;
    if (s == "random") return Algorithm::random;
    throw Error("unknown algorithm '" + std::string(s) + "'");
}

double boundary_focus(const RunReport& report)
{
    const std::size_t n = report.from_boundary.size();
    const std::size_t q = n / 4;
    if (q == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = n - q; i < n; ++i) hits += report.from_boundary[i];
    return static_cast<double>(hits) / static_cast<double>(q);
}

Objective objective_for(const RunConfig& config)
{
    if (config.objective == "custom") return make_gaussian_objective(config.custom, "custom");
    try {
        return make_objective(config.objective);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

EvaluationContext make_evaluation_context(const RunConfig& config)
{
    return make_evaluation_context(config, objective_for(config));
}

EvaluationContext make_evaluation_context(const RunConfig& config, Objective objective)
{
    EvaluationContext ctx;
    ctx.objective = std::move(objective);
    const std::size_t res = config.truth_resolution ? config.truth_resolution
                                                    : default_truth_resolution(ctx.objective);
    ctx.truth = grid_oracle(ctx.objective, res);
    ctx.truth_boxes = ctx.objective.truth_boxes.empty() ? truth_boxes_from_grid(ctx.truth)
                                                        : ctx.objective.truth_boxes;
    return ctx;
}

RunReport run_item(const RunConfig& config, std::uint64_t seed, const EvaluationContext& ctx)
{
    return run_search(config, seed, ctx, Algorithm::item);
}

RunReport run_item(const RunConfig& config, std::uint64_t seed)
{
    config.validate();
    return run_item(config, seed, make_evaluation_context(config));
}

RunReport run_random_baseline(const RunConfig& config, std::uint64_t seed, const EvaluationContext& ctx)
{
    return run_search(config, seed, ctx, Algorithm::random);
}

RunReport run_random_baseline(const RunConfig& config, std::uint64_t seed)
{
    config.validate();
    return run_random_baseline(config, seed, make_evaluation_context(config));
}

std::vector<AblationPair> run_ablation(const RunConfig& config, const EvaluationContext& ctx)
{
    config.validate();
    std::vector<AblationPair> out;
    for (auto seed : config.seeds) {
        RunConfig improved = config;
        improved.ucb.mode = UcbMode::improved;
        RunConfig original = config;
        original.ucb.mode = UcbMode::original;
        AblationPair pair;
        pair.seed = seed;
        pair.improved = run_item(improved, seed, ctx);
        pair.original = run_item(original, seed, ctx);
        pair.improved_focus = boundary_focus(pair.improved);
        pair.original_focus = boundary_focus(pair.original);
        out.push_back(std::move(pair));
    }
    return out;
}

std::vector<AblationPair> run_ablation(const RunConfig& config)
{
    config.validate();
    return run_ablation(config, make_evaluation_context(config));
}

MetricReport rescore(const RunReport& report, const EvaluationContext& ctx)
{
    const auto domains = identify_for(report.algorithm, report.records, report.config, ctx.objective.space, nullptr);
    return compute_metrics(report.records, domains, report.config, ctx);
}

}  // namespace hazmap
