#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hazmap/acquisition.hpp"
#include "hazmap/classifier.hpp"
#include "hazmap/domains.hpp"
#include "hazmap/metrics.hpp"
#include "hazmap/objectives.hpp"
#include "hazmap/partition_tree.hpp"
#include "hazmap/stopping.hpp"

namespace hazmap {

/// Raised for invalid run configurations (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised when the objective cannot be evaluated (CLI exit code 2).
class ObjectiveError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    /// gaussian-2d | gaussian-4d | cutin-3d | custom (a Gaussian built from `custom`).
    std::string objective = "gaussian-2d";
    GaussianSpec custom;
    /// Fixed sampling budget. Exactly one of budget / stopping.enabled is active.
    std::optional<std::size_t> budget = 900;
    bool stopping_enabled = false;
    StopSettings stop;
    /// Hard cap on evaluations when the stopping rule is active.
    std::size_t max_samples = 10000;
    /// 0 selects 10 * dim.
    std::size_t initial_samples = 0;
    UcbConfig ucb;
    /// dropout_k = dropout_fraction * (budget or max_samples) unless set explicitly.
    double dropout_fraction = 0.4;
    bool dropout_k_explicit = false;
    ClassifierConfig classifier;
    TreeConfig tree;
    IdentifyConfig identify;
    /// Ground-truth grid nodes per axis (0 selects the objective default).
    std::size_t truth_resolution = 0;
    /// Grid nodes per axis for the hazard-ratio estimate (0 selects the default).
    std::size_t ratio_resolution = 0;
    std::vector<std::uint64_t> seeds{7};
    std::string output_dir = "out";
    bool trace_selections = false;

    std::size_t sample_limit() const { return budget ? *budget : max_samples; }
    /// Throws ConfigError on violated invariants.
    void validate() const;
};

/// Named presets: gaussian-2d (900), gaussian-4d (10 000, desk scale),
/// gaussian-4d-full (30 000), cutin-3d (stopping rule, c_p = 2).
RunConfig preset(std::string_view name);
std::size_t default_truth_resolution(const Objective& objective);
std::size_t default_ratio_resolution(const Objective& objective);

enum class Algorithm { item, random };
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct TreeSnapshot {
    std::size_t n_samples = 0;
    PartitionTree tree;
};

struct RunReport {
    Algorithm algorithm = Algorithm::item;
    RunConfig config;
    std::uint64_t seed = 0;
    std::vector<SampleRecord> records;
    /// 1 when the sample was drawn from a leaf that was a boundary subspace.
    std::vector<unsigned char> from_boundary;
    /// Trees at each stop check, then the final tree last.
    std::vector<TreeSnapshot> snapshots;
    std::vector<StopDecision> stop_history;
    std::vector<IdentifiedDomain> domains;
    std::vector<HazardBox> truth_boxes;
    MetricReport metrics;
    std::vector<std::string> warnings;
    /// JSON-lines selection trace (only when config.trace_selections).
    std::vector<std::string> selection_trace;
    bool complete = true;
    std::string failure;
    std::map<std::string, double> timings;
    std::size_t evaluations = 0;

    const PartitionTree& final_tree() const { return snapshots.back().tree; }
};

/// Fraction of the last quarter of samples drawn from boundary subspaces.
double boundary_focus(const RunReport& report);

/// Shared evaluation inputs; computed once per objective and reused across seeds.
struct EvaluationContext {
    Objective objective;
    GroundTruth truth;
    std::vector<HazardBox> truth_boxes;
};

EvaluationContext make_evaluation_context(const RunConfig& config);
EvaluationContext make_evaluation_context(const RunConfig& config, Objective objective);

RunReport run_item(const RunConfig& config, std::uint64_t seed, const EvaluationContext& ctx);
RunReport run_item(const RunConfig& config, std::uint64_t seed);
/// Uniform sampling throughout; domains from a single-node tree.
RunReport run_random_baseline(const RunConfig& config, std::uint64_t seed, const EvaluationContext& ctx);
RunReport run_random_baseline(const RunConfig& config, std::uint64_t seed);

struct AblationPair {
    std::uint64_t seed = 0;
    RunReport improved;
    RunReport original;
    double improved_focus = 0.0;
    double original_focus = 0.0;
};

std::vector<AblationPair> run_ablation(const RunConfig& config, const EvaluationContext& ctx);
std::vector<AblationPair> run_ablation(const RunConfig& config);

Objective objective_for(const RunConfig& config);

/// Recomputes domains and metrics from the records alone.
MetricReport rescore(const RunReport& report, const EvaluationContext& ctx);

}  // namespace hazmap
