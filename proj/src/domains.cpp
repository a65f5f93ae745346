#include "hazmap/domains.hpp"

#include <algorithm>

namespace hazmap {

namespace {

IdentifiedDomain merged(const IdentifiedDomain& a, const IdentifiedDomain& b, MergeKind kind, int node)
{
    IdentifiedDomain out;
    out.box = bounding_hull(a.box, b.box);
    out.source_leaves = a.source_leaves;
    out.source_leaves.insert(out.source_leaves.end(), b.source_leaves.begin(), b.source_leaves.end());
    std::sort(out.source_leaves.begin(), out.source_leaves.end());
    out.members = a.members;
    out.members.insert(out.members.end(), b.members.begin(), b.members.end());
    std::sort(out.members.begin(), out.members.end());
    out.lineage = a.lineage;
    out.lineage.insert(out.lineage.end(), b.lineage.begin(), b.lineage.end());
    out.lineage.push_back({kind, node, a.source_leaves, b.source_leaves});
    return out;
}

}  // namespace

std::string_view to_string(MergeKind k)
{
    return k == MergeKind::sibling ? "sibling" : "overlap";
}

std::map<int, std::vector<std::size_t>> select_hazardous(const PartitionTree& tree,
                                                         std::span<const SampleRecord> records, double f_b)
{
    std::map<int, std::vector<std::size_t>> out;
    for (const auto& n : tree.nodes) {
        if (!n.is_leaf()) continue;
        std::vector<std::size_t> haz;
        for (std::size_t m : n.members) {
            if (records[m].risk > f_b) haz.push_back(m);
        }
        if (!haz.empty()) out.emplace(n.id, std::move(haz));
    }
    return out;
}

HazardBox approx_box(std::span<const std::size_t> members, std::span<const SampleRecord> records)
{
    if (members.empty()) throw Error("approx_box: no hazardous records");
    const auto& first = records[members.front()].point;
    HazardBox box(first, first, 0);
    for (std::size_t m : members) {
        const auto& p = records[m].point;
        check_dim(box.dim(), p.size(), "approx_box");
        for (std::size_t d = 0; d < box.dim(); ++d) {
            box.lower[d] = std::min(box.lower[d], p[d]);
            box.upper[d] = std::max(box.upper[d], p[d]);
        }
    }
    box.member_count = members.size();
    return box;
}

bool adjacent_across(const HazardBox& a, const HazardBox& b, std::size_t axis, double gap_ratio)
{
    for (std::size_t d = 0; d < a.dim(); ++d) {
        if (d == axis) continue;
        if (std::max(a.lower[d], b.lower[d]) > std::min(a.upper[d], b.upper[d])) return false;
    }
    const double gap = std::max(0.0, std::max(a.lower[axis], b.lower[axis]) -
                                         std::min(a.upper[axis], b.upper[axis]));
    return gap <= gap_ratio * std::max(a.width(axis), b.width(axis));
}

std::vector<IdentifiedDomain> merge_siblings(const PartitionTree& tree,
                                             const std::map<int, IdentifiedDomain>& leaf_domains,
                                             const IdentifyConfig& config)
{
    if (tree.nodes.empty()) return {};
    std::vector<std::vector<IdentifiedDomain>> carried(tree.size());
    // children always have larger ids than their parent
    for (std::size_t k = tree.size(); k-- > 0;) {
        const auto& n = tree.nodes[k];
        if (n.is_leaf()) {
            if (auto it = leaf_domains.find(n.id); it != leaf_domains.end()) carried[k].push_back(it->second);
            continue;
        }
        auto& left = carried[static_cast<std::size_t>(n.left)];
        auto& right = carried[static_cast<std::size_t>(n.right)];
        const bool leaf_pair = tree.node(n.left).is_leaf() && tree.node(n.right).is_leaf();
        if (leaf_pair && !left.empty() && !right.empty()) {
            carried[k].push_back(merged(left.front(), right.front(), MergeKind::sibling, n.id));
            left.clear();
            right.clear();
            continue;
        }

        // side: 0 left subtree, 1 right subtree, 2 already merged across this cut
        std::vector<std::pair<IdentifiedDomain, int>> pool;
        for (auto& d : left) pool.emplace_back(std::move(d), 0);
        for (auto& d : right) pool.emplace_back(std::move(d), 1);
        left.clear();
        right.clear();
        const std::size_t axis = n.split->axis;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < pool.size() && !changed; ++i) {
                for (std::size_t j = i + 1; j < pool.size() && !changed; ++j) {
                    if (pool[i].second == pool[j].second && pool[i].second != 2) continue;
                    if (!adjacent_across(pool[i].first.box, pool[j].first.box, axis, config.sibling_gap_ratio)) {
                        continue;
                    }
                    pool[i].first = merged(pool[i].first, pool[j].first, MergeKind::sibling, n.id);
                    pool[i].second = 2;
                    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                }
            }
        }
        for (auto& [d, side] : pool) carried[k].push_back(std::move(d));
    }
    return std::move(carried.front());
}

std::vector<IdentifiedDomain> merge_overlapping(std::vector<IdentifiedDomain> domains)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < domains.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < domains.size() && !changed; ++j) {
                if (!overlaps_interior(domains[i].box, domains[j].box)) continue;
                domains[i] = merged(domains[i], domains[j], MergeKind::overlap, -1);
                domains.erase(domains.begin() + static_cast<std::ptrdiff_t>(j));
                changed = true;
            }
        }
    }
    return domains;
}

std::vector<IdentifiedDomain> identify_domains(const PartitionTree& tree, std::span<const SampleRecord> records,
                                               double f_b, const IdentifyConfig& config)
{
    std::map<int, IdentifiedDomain> leaf_domains;
    for (auto& [leaf, members] : select_hazardous(tree, records, f_b)) {
        IdentifiedDomain d;
        d.box = approx_box(members, records);
        const auto& region = tree.node(leaf).region;
        for (std::size_t a = 0; a < d.box.dim(); ++a) {
            d.box.lower[a] = std::clamp(d.box.lower[a], region.lower[a], region.upper[a]);
            d.box.upper[a] = std::clamp(d.box.upper[a], region.lower[a], region.upper[a]);
        }
        d.source_leaves = {leaf};
        d.members = members;
        leaf_domains.emplace(leaf, std::move(d));
    }
    return merge_overlapping(merge_siblings(tree, leaf_domains, config));
}

std::vector<HazardBox> domain_boxes(std::span<const IdentifiedDomain> domains)
{
    std::vector<HazardBox> out;
    out.reserve(domains.size());
    for (const auto& d : domains) out.push_back(d.box);
    return out;
}

}  // namespace hazmap
