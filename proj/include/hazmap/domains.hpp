#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "hazmap/partition_tree.hpp"
#include "hazmap/space.hpp"

namespace hazmap {

enum class MergeKind { sibling, overlap };

std::string_view to_string(MergeKind k);

struct MergeEvent {
    MergeKind kind = MergeKind::sibling;
    /// Tree node the sibling merge happened at; -1 for overlap merges.
    int node = -1;
    std::vector<int> sources_a;
    std::vector<int> sources_b;
};

struct IdentifiedDomain {
    HazardBox box;
    std::vector<int> source_leaves;
    std::vector<MergeEvent> lineage;
    /// Hazardous record positions the box was built from.
    std::vector<std::size_t> members;
};

struct IdentifyConfig {
    /// Above the leaf level two sibling-side boxes merge only when they face
    /// each other across the parent's cut: their projections meet on every
    /// other axis and the gap along the cut axis is at most this fraction of
    /// the wider box's extent on that axis.
    double sibling_gap_ratio = 0.5;
};

/// Leaf id -> positions of its hazardous records (risk > f_b). Leaves
/// without hazardous records are dropped.
std::map<int, std::vector<std::size_t>> select_hazardous(const PartitionTree& tree,
                                                         std::span<const SampleRecord> records, double f_b);

/// Per-axis min/max of the member coordinates.
HazardBox approx_box(std::span<const std::size_t> members, std::span<const SampleRecord> records);

/// True when a and b face each other across the cut described above.
bool adjacent_across(const HazardBox& a, const HazardBox& b, std::size_t axis, double gap_ratio);

/// Bottom-up sibling merging. Two sibling leaves that both carry a box are
/// always merged; higher up, boxes from the two subtrees merge when
/// adjacent_across holds. A box with no partner is promoted unchanged.
std::vector<IdentifiedDomain> merge_siblings(const PartitionTree& tree,
                                             const std::map<int, IdentifiedDomain>& leaf_domains,
                                             const IdentifyConfig& config = {});

/// Replaces the lowest-index pair overlapping on every axis by its hull
/// until no such pair remains.
std::vector<IdentifiedDomain> merge_overlapping(std::vector<IdentifiedDomain> domains);

std::vector<IdentifiedDomain> identify_domains(const PartitionTree& tree, std::span<const SampleRecord> records,
                                               double f_b, const IdentifyConfig& config = {});

std::vector<HazardBox> domain_boxes(std::span<const IdentifiedDomain> domains);

}  // namespace hazmap
