#include <cmath>
#include <random>

#include "doctest.h"
#include "hazmap/partition_tree.hpp"

using namespace hazmap;

namespace {

// exhaustive 1-d 2-means: smallest value of the high cluster at the best cut
std::optional<double> two_means_ref(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    if (v.front() == v.back()) return std::nullopt;
    double best = INFINITY;
    double cut = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] == v[k - 1]) continue;
        double sse = 0, m1 = 0, m2 = 0;
        for (std::size_t i = 0; i < k; ++i) m1 += v[i];
        for (std::size_t i = k; i < v.size(); ++i) m2 += v[i];
        m1 /= k;
        m2 /= (v.size() - k);
        for (std::size_t i = 0; i < k; ++i) sse += (v[i] - m1) * (v[i] - m1);
        for (std::size_t i = k; i < v.size(); ++i) sse += (v[i] - m2) * (v[i] - m2);
        if (sse < best - 1e-12) {
            best = sse;
            cut = v[k];
        }
    }
    return cut;
}

std::vector<SampleRecord> random_records(const SearchSpace& s, std::size_t n, std::uint64_t seed,
                                         double (*f)(std::span<const double>))
{
    std::mt19937_64 rng(seed);
    std::vector<SampleRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        Point p(s.dim());
        for (std::size_t d = 0; d < s.dim(); ++d)
            p[d] = std::uniform_real_distribution<double>(s.lower[d], s.upper[d])(rng);
        out.push_back(make_record(s, p, f(p), i));
        out.back().density = 0.5 + static_cast<double>(rng() % 100) / 50.0;
    }
    return out;
}

double two_blobs(std::span<const double> p)
{
    const double a = std::hypot(p[0] - 2, p[1] - 2), b = std::hypot(p[0] - 7, p[1] - 8);
    return std::exp(-a * a / 2) + std::exp(-b * b / 3);
}

double ramp(std::span<const double> p) { return std::clamp(p[0] / 10.0, 0.0, 1.0); }

std::vector<int> mid_grid_leaf(const PartitionTree& t, const SearchSpace& s)
{
    std::vector<int> out;
    for (double x = s.lower[0] + 0.05; x < s.upper[0]; x += 0.37)
        for (double y = s.lower[1] + 0.05; y < s.upper[1]; y += 0.41) out.push_back(t.leaf_for(Point{x, y}));
    return out;
}

}  // namespace

TEST_CASE("two-means cut matches an exhaustive search")
{
    CHECK(two_means_cut(std::vector<double>{0.1, 0.2, 0.9, 1.0}) == 0.9);
    CHECK_FALSE(two_means_cut(std::vector<double>{0.4, 0.4, 0.4}).has_value());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> v(2 + t % 30);
        for (auto& x : v) x = std::round(u(rng) * 50) / 50;
        CHECK(two_means_cut(v) == two_means_ref(v));
    }
}

TEST_CASE("node statistics")
{
    const SearchSpace s({0}, {1}, 0.8);
    std::vector<SampleRecord> rs{make_record(s, {0.1}, 0.9, 0), make_record(s, {0.2}, 0.1, 1)};
    std::vector<std::size_t> both{0, 1};
    CHECK(node_stats(both, rs).v_exploit == doctest::Approx(0.5).epsilon(1e-15));

    std::vector<SampleRecord> one{make_record(s, {0.3}, 0.7, 0)};
    one[0].density = 2.5;
    one[0].loss = 0.3;
    const auto st = node_stats(std::vector<std::size_t>{0}, one);
    CHECK(st.v_exploit == 0.7);
    CHECK(st.mean_density == 2.5);
    CHECK(st.mean_loss == 0.3);

    rs[0].density = 1.0;
    rs[1].density = 3.0;
    const auto a = node_stats(both, rs);
    CHECK(a.v_exploit == doctest::Approx(0.75 * 0.9 + 0.25 * 0.1).epsilon(1e-15));
    CHECK(a.mean_density == doctest::Approx(0.75 * 1 + 0.25 * 3).epsilon(1e-15));
    for (auto& r : rs) r.density *= 2;
    CHECK(node_stats(both, rs).v_exploit == doctest::Approx(a.v_exploit).epsilon(1e-15));
    CHECK_THROWS_AS(node_stats(std::vector<std::size_t>{}, rs), Error);
}

TEST_CASE("split separates two risk clusters")
{
    const SearchSpace s({0}, {10}, 0.8);
    std::vector<SampleRecord> rs;
    for (int i = 0; i < 5; ++i) rs.push_back(make_record(s, {1.0}, 0.9, i));
    for (int i = 0; i < 5; ++i) rs.push_back(make_record(s, {9.0}, 0.1, 5 + i));
    std::vector<std::size_t> all(10);
    std::iota(all.begin(), all.end(), 0);
    TreeConfig cfg;
    cfg.leaf_min = 3;
    const auto sp = split_node(s.box(), all, rs, cfg);
    REQUIRE(sp.has_value());
    CHECK(sp->rule.axis == 0);
    CHECK(sp->rule.threshold > 1.0);
    CHECK(sp->rule.threshold < 9.0);
    CHECK(sp->left == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(sp->accuracy == 1.0);

    for (auto& r : rs) r.risk = 0.5;
    CHECK_FALSE(split_node(s.box(), all, rs, cfg).has_value());

    std::vector<std::size_t> four{0, 1, 5, 6};
    rs[0].risk = rs[1].risk = 0.9;
    CHECK_FALSE(split_node(s.box(), four, rs, cfg).has_value());
}

TEST_CASE("split ties go to the wider axis")
{
    // labels separable on both axes; axis 1 spans more
    const SearchSpace s({0, 0}, {1, 5}, 0.8);
    std::vector<SampleRecord> rs;
    for (int i = 0; i < 4; ++i) rs.push_back(make_record(s, {0.1 + 0.01 * i, 0.5 + 0.01 * i}, 0.9, i));
    for (int i = 0; i < 4; ++i) rs.push_back(make_record(s, {0.9 - 0.01 * i, 4.5 - 0.01 * i}, 0.1, 4 + i));
    std::vector<std::size_t> all(8);
    std::iota(all.begin(), all.end(), 0);
    TreeConfig cfg;
    cfg.leaf_min = 2;
    const auto sp = split_node(s.box(), all, rs, cfg);
    REQUIRE(sp.has_value());
    CHECK(sp->rule.axis == 1);
}

TEST_CASE("small inputs give a root-only tree")
{
    const SearchSpace s({0, 0}, {10, 10}, 0.8);
    const auto rs = random_records(s, 5, 1, two_blobs);
    TreeConfig cfg;
    cfg.leaf_min = 3;
    const auto t = rebuild_tree(rs, s, cfg);
    CHECK(t.size() == 1);
    CHECK(t.root().region == s.box());
    CHECK(t.root().members.size() == 5);
}

TEST_CASE("trees tile the space and every record reaches its own leaf")
{
    const SearchSpace s({0, 0}, {10, 10}, 0.8);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto rs = random_records(s, 100 + 40 * seed, seed, seed % 2 ? two_blobs : ramp);
        auto t = rebuild_tree(rs, s);
        refresh_node_stats(t, rs);
        CHECK(t.root().region == s.box());
        double vol = 0;
        for (int id : t.leaves()) vol += box_volume(t.node(id).region);
        CHECK(std::abs(vol - s.volume()) <= 1e-6 * s.volume());
        const auto owner = t.leaf_of_members(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            CHECK(owner[i] >= 0);
            CHECK(t.leaf_for(rs[i].point) == owner[i]);
            CHECK(contains(t.node(owner[i]).region, rs[i].point));
        }
        for (const auto& n : t.nodes) {
            if (n.is_leaf()) continue;
            const auto& l = t.node(n.left);
            const auto& r = t.node(n.right);
            CHECK(l.parent == n.id);
            CHECK(r.parent == n.id);
            CHECK(std::abs(box_volume(l.region) + box_volume(r.region) - box_volume(n.region)) <=
                  1e-9 * box_volume(n.region));
            CHECK(l.region.upper[n.split->axis] == n.split->threshold);
            CHECK(r.region.lower[n.split->axis] == n.split->threshold);
            CHECK(l.members.size() + r.members.size() == n.members.size());
            // good child carries the higher mean risk
            const auto& good = l.stats.v_exploit >= r.stats.v_exploit ? l : r;
            const auto& other = &good == &l ? r : l;
            CHECK(good.mean_risk >= other.mean_risk);
        }
    }
}

TEST_CASE("rebuild is deterministic")
{
    const SearchSpace s({0, 0}, {10, 10}, 0.8);
    const auto rs = random_records(s, 400, 3, two_blobs);
    const auto a = rebuild_tree(rs, s);
    const auto b = rebuild_tree(rs, s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.nodes[i].region == b.nodes[i].region);
        CHECK(a.nodes[i].members == b.nodes[i].members);
        CHECK(a.nodes[i].left == b.nodes[i].left);
    }
    CHECK(mid_grid_leaf(a, s) == mid_grid_leaf(b, s));
}

TEST_CASE("pruning keeps splits that only pay off deeper down")
{
    // hazardous in two opposite quadrants: no single cut separates them
    const SearchSpace s({0, 0}, {10, 10}, 0.8);
    std::vector<SampleRecord> rs;
    std::size_t idx = 0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const Point p{0.25 + 0.5 * i, 0.25 + 0.5 * j};
            const bool haz = (p[0] < 5) == (p[1] < 5);
            rs.push_back(make_record(s, p, haz ? 0.95 : 0.05, idx++));
        }
    const auto t = rebuild_tree(rs, s);
    CHECK(t.size() >= 7);
    for (int id : t.leaves()) {
        const auto& n = t.node(id);
        std::size_t h = 0;
        for (auto m : n.members) h += rs[m].hazardous;
        CHECK((h == 0 || h == n.members.size()));
    }
}

TEST_CASE("a lone outlier does not fragment the tree")
{
    const SearchSpace s({0, 0}, {10, 10}, 0.8);
    std::vector<SampleRecord> rs;
    for (int i = 0; i < 200; ++i) {
        const Point p{0.05 * i, std::fmod(0.37 * i, 10.0)};
        rs.push_back(make_record(s, p, 0.1 + 0.001 * (i % 7), i));
    }
    rs[17].risk = 0.95;
    const auto t = rebuild_tree(rs, s);
    CHECK(t.size() <= 3);
}

TEST_CASE("single node tree")
{
    const SearchSpace s({0, 0}, {10, 10}, 0.8);
    const auto rs = random_records(s, 50, 2, ramp);
    const auto t = single_node_tree(rs, s);
    CHECK(t.size() == 1);
    CHECK(t.root().members.size() == 50);
}
