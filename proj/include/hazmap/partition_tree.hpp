#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hazmap/space.hpp"

namespace hazmap {

struct SplitRule {
    std::size_t axis = 0;
    /// Points with coord < threshold go left, the rest go right.
    double threshold = 0.0;
};

struct NodeStats {
    double v_exploit = 0.0;
    double mean_density = 0.0;
    double mean_loss = 0.0;
};

struct TreeNode {
    int id = 0;
    int parent = -1;
    int left = -1;
    int right = -1;
    int depth = 0;
    HazardBox region;
    /// Positions into the record vector the tree was built from.
    std::vector<std::size_t> members;
    std::optional<SplitRule> split;

    NodeStats stats;
    double mean_risk = 0.0;
    bool boundary = false;
    double v_boundary = 0.0;

    bool is_leaf() const { return left < 0; }
};

struct TreeConfig {
    /// 0 selects 5 * dim.
    std::size_t leaf_min = 0;
    /// A split survives pruning when the subtree grown beneath it, with each
    /// leaf labelled by its majority, recovers the node's risk clusters with
    /// at least this accuracy.
    double min_split_accuracy = 0.7;
    int max_depth = 48;

    std::size_t effective_leaf_min(std::size_t dim) const { return leaf_min ? leaf_min : 5 * dim; }
};

struct SplitResult {
    SplitRule rule;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    double accuracy = 0.0;
};

/// Two-cluster labelling of risk values (exact 1-d 2-means). Returns the
/// smallest risk assigned to the high cluster, or nullopt when all values
/// are equal.
std::optional<double> two_means_cut(std::span<const double> risks);

/// Axis-aligned cut minimising the weighted Gini impurity of the two risk
/// clusters, each side keeping at least leaf_min members. `accuracy` is the
/// share recovered by labelling each side with its majority cluster.
/// nullopt when no valid cut exists.
std::optional<SplitResult> split_node(const HazardBox& region, std::span<const std::size_t> members,
                                      std::span<const SampleRecord> records, const TreeConfig& config);

/// Density-weighted node statistics: V_exploit = sum f w, mean density and
/// mean loss weighted by w = density_weights(members).
NodeStats node_stats(std::span<const std::size_t> members, std::span<const SampleRecord> records);

class PartitionTree {
public:
    std::vector<TreeNode> nodes;

    const TreeNode& root() const { return nodes.front(); }
    const TreeNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    TreeNode& node(int id) { return nodes.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return nodes.size(); }

    std::vector<int> leaves() const;
    /// Leaf reached by descending the split rules.
    int leaf_for(std::span<const double> p) const;
    /// Leaf listing each record position.
    std::vector<int> leaf_of_members(std::size_t record_count) const;
};

/// Recursive splitting from the full space down to leaf_min, then top-down
/// pruning against min_split_accuracy. Ids are assigned breadth-first.
/// Fewer than 2 * leaf_min records give a single-node tree.
PartitionTree rebuild_tree(std::span<const SampleRecord> records, const SearchSpace& space,
                           const TreeConfig& config = {});
PartitionTree single_node_tree(std::span<const SampleRecord> records, const SearchSpace& space);

/// Recomputes node_stats and mean risk on every node.
void refresh_node_stats(PartitionTree& tree, std::span<const SampleRecord> records);

}  // namespace hazmap
