#include "hazmap/partition_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "hazmap/density.hpp"

namespace hazmap {

std::optional<double> two_means_cut(std::span<const double> risks)
{
    if (risks.size() < 2) return std::nullopt;
    std::vector<double> v(risks.begin(), risks.end());
    std::sort(v.begin(), v.end());
    if (!(v.back() - v.front() > 1e-12)) return std::nullopt;

    const std::size_t n = v.size();
    std::vector<double> s(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s[i + 1] = s[i] + v[i];
        s2[i + 1] = s2[i] + v[i] * v[i];
    }
    auto sse = [&](std::size_t a, std::size_t b) {
        const double cnt = static_cast<double>(b - a);
        const double sum = s[b] - s[a];
        return (s2[b] - s2[a]) - sum * sum / cnt;
    };
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] == v[i - 1]) continue;
        const double cost = sse(0, i) + sse(i, n);
        if (best_i == 0 || cost < best) {
            best = cost;
            best_i = i;
        }
    }
    return v[best_i];
}

namespace {

struct Cut {
    bool valid = false;
    double impurity = 0.0;
    std::size_t correct = 0;  // children labelled by their majority cluster
    double extent = 0.0;
    std::size_t axis = 0;
    std::size_t left_count = 0;
    double threshold = 0.0;
};


// pos: positions into `members`; good: cluster label per position.
Cut scan_cuts(const HazardBox& region, std::span<const std::size_t> pos, std::span<const std::size_t> members,
                  std::span<const unsigned char> good, std::span<const SampleRecord> records, std::size_t leaf_min)
{
    const std::size_t n = pos.size();
    std::size_t total_good = 0;
    for (std::size_t p : pos) total_good += good[p];
    const std::size_t total_bad = n - total_good;
    Cut best;
    if (n < 2 * leaf_min || n < 2) return best;

    const auto imbalance = [&](std::size_t l) { return l * 2 > n ? l * 2 - n : n - l * 2; };
    std::vector<std::size_t> order(pos.begin(), pos.end());
    for (std::size_t axis = 0; axis < region.dim(); ++axis) {
        const auto coord = [&](std::size_t p) { return records[members[p]].point[axis]; };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coord(a) < coord(b); });
        std::size_t good_left = 0;
        Cut axis_best;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            good_left += good[order[i]];
            const std::size_t left = i + 1;
            const std::size_t right = n - left;
            if (left < leaf_min || right < leaf_min) continue;
            const double a = coord(order[i]);
            const double b = coord(order[i + 1]);
            if (!(a < b)) continue;
            const double t = 0.5 * (a + b);
            if (!(a < t && t <= b)) continue;
            const std::size_t bad_left = left - good_left;
            const std::size_t good_right = total_good - good_left;
            const std::size_t bad_right = total_bad - bad_left;
            const double impurity = static_cast<double>(good_left * bad_left) / static_cast<double>(left) +
                                    static_cast<double>(good_right * bad_right) / static_cast<double>(right);
            const std::size_t correct = std::max(good_left, bad_left) + std::max(good_right, bad_right);
            if (!axis_best.valid || impurity < axis_best.impurity ||
                (impurity == axis_best.impurity && imbalance(left) < imbalance(axis_best.left_count))) {
                axis_best = {true, impurity, correct, region.width(axis), axis, left, t};
            }
        }
        if (!axis_best.valid) continue;
        if (!best.valid || axis_best.impurity < best.impurity ||
            (axis_best.impurity == best.impurity && axis_best.extent > best.extent)) {
            best = axis_best;
        }
    }
    return best;
}

}  // namespace

std::optional<SplitResult> split_node(const HazardBox& region, std::span<const std::size_t> members,
                                      std::span<const SampleRecord> records, const TreeConfig& config)
{
    const std::size_t leaf_min = config.effective_leaf_min(region.dim());
    const std::size_t n = members.size();
    if (n < 2 * leaf_min || n < 2) return std::nullopt;

    std::vector<double> risks(n);
    for (std::size_t i = 0; i < n; ++i) risks[i] = records[members[i]].risk;
    const auto cut = two_means_cut(risks);
    if (!cut) return std::nullopt;

    std::vector<unsigned char> good(n);
    for (std::size_t i = 0; i < n; ++i) good[i] = risks[i] >= *cut ? 1 : 0;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    const Cut best = scan_cuts(region, all, members, good, records, leaf_min);
    if (!best.valid) return std::nullopt;

    SplitResult res;
    res.rule = {best.axis, best.threshold};
    res.accuracy = static_cast<double>(best.correct) / static_cast<double>(n);
    for (std::size_t m : members) {
        (records[m].point[best.axis] < best.threshold ? res.left : res.right).push_back(m);
    }
    return res;
}

NodeStats node_stats(std::span<const std::size_t> members, std::span<const SampleRecord> records)
{
    if (members.empty()) throw Error("node_stats: empty node");
    std::vector<double> rho(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) rho[i] = records[members[i]].density;
    const auto w = density_weights(rho);
    NodeStats s;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& r = records[members[i]];
        s.v_exploit += r.risk * w[i];
        s.mean_density += w[i] * r.density;
        s.mean_loss += w[i] * r.loss;
    }
    return s;
}

std::vector<int> PartitionTree::leaves() const
{
    std::vector<int> out;
    for (const auto& n : nodes) {
        if (n.is_leaf()) out.push_back(n.id);
    }
    return out;
}

int PartitionTree::leaf_for(std::span<const double> p) const
{
    int id = 0;
    while (!node(id).is_leaf()) {
        const auto& n = node(id);
        id = p[n.split->axis] < n.split->threshold ? n.left : n.right;
    }
    return id;
}

std::vector<int> PartitionTree::leaf_of_members(std::size_t record_count) const
{
    std::vector<int> out(record_count, -1);
    for (const auto& n : nodes) {
        if (!n.is_leaf()) continue;
        for (std::size_t m : n.members) out.at(m) = n.id;
    }
    return out;
}

PartitionTree single_node_tree(std::span<const SampleRecord> records, const SearchSpace& space)
{
    PartitionTree tree;
    TreeNode root;
    root.region = space.box();
    root.members.resize(records.size());
    std::iota(root.members.begin(), root.members.end(), std::size_t{0});
    tree.nodes.push_back(std::move(root));
    return tree;
}

PartitionTree rebuild_tree(std::span<const SampleRecord> records, const SearchSpace& space,
                           const TreeConfig& config)
{
    PartitionTree full = single_node_tree(records, space);
    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int id = queue.front();
        queue.pop_front();
        if (full.node(id).depth >= config.max_depth) continue;
        auto split = split_node(full.node(id).region, full.node(id).members, records, config);
        if (!split) continue;

        const int next = static_cast<int>(full.nodes.size());
        TreeNode left, right;
        left.id = next;
        right.id = next + 1;
        left.parent = right.parent = id;
        left.depth = right.depth = full.node(id).depth + 1;
        left.region = right.region = full.node(id).region;
        left.region.upper[split->rule.axis] = split->rule.threshold;
        right.region.lower[split->rule.axis] = split->rule.threshold;
        left.members = std::move(split->left);
        right.members = std::move(split->right);

        auto& parent = full.node(id);
        parent.split = split->rule;
        parent.left = left.id;
        parent.right = right.id;
        full.nodes.push_back(std::move(left));
        full.nodes.push_back(std::move(right));
        queue.push_back(next);
        queue.push_back(next + 1);
    }

    // Keep a split only when the subtree grown beneath it recovers the node's
    // own risk clusters (each leaf labelled by its majority) with the
    // configured accuracy. Single cuts are too weak a test: two hazard
    // clusters on opposite sides of every axis cut need several levels.
    std::vector<unsigned char> label(records.size());
    std::vector<int> stack;
    const auto subtree_accuracy = [&](const TreeNode& v) {
        std::vector<double> risks;
        risks.reserve(v.members.size());
        for (std::size_t m : v.members) risks.push_back(records[m].risk);
        const double cut = *two_means_cut(risks);
        for (std::size_t m : v.members) label[m] = records[m].risk >= cut ? 1 : 0;
        std::size_t correct = 0;
        stack.assign(1, v.id);
        while (!stack.empty()) {
            const auto& u = full.node(stack.back());
            stack.pop_back();
            if (!u.is_leaf()) {
                stack.push_back(u.left);
                stack.push_back(u.right);
                continue;
            }
            std::size_t g = 0;
            for (std::size_t m : u.members) g += label[m];
            correct += std::max(g, u.members.size() - g);
        }
        return static_cast<double>(correct) / static_cast<double>(v.members.size());
    };

    PartitionTree tree;
    tree.nodes.reserve(full.size());
    std::deque<std::pair<int, int>> order{{0, -1}};  // (full id, new parent)
    while (!order.empty()) {
        auto [fid, parent] = order.front();
        order.pop_front();
        const auto& src = full.node(fid);
        TreeNode n;
        n.id = static_cast<int>(tree.nodes.size());
        n.parent = parent;
        n.depth = src.depth;
        n.region = src.region;
        n.members = src.members;
        const bool keep = !src.is_leaf() && subtree_accuracy(src) >= config.min_split_accuracy;
        if (keep) {
            n.split = src.split;
            order.emplace_back(src.left, n.id);
            order.emplace_back(src.right, n.id);
        }
        if (parent >= 0) {
            auto& p = tree.node(parent);
            (p.left < 0 ? p.left : p.right) = n.id;
        }
        tree.nodes.push_back(std::move(n));
    }
    return tree;
}

void refresh_node_stats(PartitionTree& tree, std::span<const SampleRecord> records)
{
    for (auto& n : tree.nodes) {
        if (n.members.empty()) continue;
        n.stats = node_stats(n.members, records);
        double sum = 0.0;
        for (std::size_t m : n.members) sum += records[m].risk;
        n.mean_risk = sum / static_cast<double>(n.members.size());
    }
}

}  // namespace hazmap
