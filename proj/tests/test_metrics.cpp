#include <algorithm>
#include <random>

#include "doctest.h"
#include "hazmap/metrics.hpp"

using namespace hazmap;

namespace {

const HazardBox gt02({0, 0}, {2, 2});

std::vector<HazardBox> one(HazardBox b) { return {std::move(b)}; }

}  // namespace

TEST_CASE("overlap volume")
{
    CHECK(std::abs(overlap_volume(gt02, one(HazardBox({1, 1}, {3, 3}))) - 1.0) <= 1e-9);
    CHECK(overlap_volume(gt02, one(HazardBox({5, 5}, {6, 6}))) == 0.0);
    CHECK(overlap_volume(gt02, one(gt02)) == box_volume(gt02));
    CHECK_THROWS_AS(overlap_volume(gt02, one(HazardBox({0}, {1}))), Error);
}

TEST_CASE("api")
{
    CHECK(api(one(gt02), one(gt02)) == 1.0);
    CHECK(std::abs(api(one(gt02), one(HazardBox({1, 1}, {3, 3}))) - 0.25) <= 1e-9);
    CHECK(std::abs(0.5 * (1.0 / 4 + 1.0 / 4) - 0.25) <= 1e-15);
    CHECK(api(one(gt02), {}) == 0.0);
    CHECK_THROWS_AS(api({}, one(gt02)), Error);
    CHECK_THROWS_AS(api(one(HazardBox({0, 0}, {0, 2})), one(gt02)), Error);
}

TEST_CASE("api sums the identified volume over the boxes touching a GT box")
{
    // two identified halves of the GT plus an unrelated box elsewhere
    const std::vector<HazardBox> ids{HazardBox({0, 0}, {1, 2}), HazardBox({1, 0}, {2, 2}),
                                     HazardBox({10, 10}, {20, 20})};
    CHECK(api(one(gt02), ids) == doctest::Approx(1.0).epsilon(1e-12));
    // identified twice the size of the GT, covering it
    const double v = api(one(gt02), one(HazardBox({0, 0}, {4, 2})));
    CHECK(v == doctest::Approx(0.5 * (1.0 + 0.5)).epsilon(1e-12));
}

TEST_CASE("centroid distance")
{
    CHECK(centroid_distance(gt02, gt02) == 0.0);
    CHECK(std::abs(centroid_distance(gt02, HazardBox({1, 1}, {3, 3})) - std::sqrt(2.0)) <= 1e-9);
    CHECK(centroid_distance(gt02, HazardBox({0.3, 0}, {2.3, 2})) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("adi")
{
    CHECK(adi(one(gt02), one(gt02)) == 1.0);
    CHECK(std::abs(adi_component(gt02, HazardBox({1, 1}, {3, 3}))) <= 1e-9);
    CHECK(std::abs(adi_component(gt02, HazardBox({0.5, 0.5}, {2.5, 2.5})) - 0.5) <= 1e-9);
    CHECK(std::abs(1 - std::sqrt(0.5) / std::sqrt(2.0) - 0.5) <= 1e-12);
    // clamp: overlaps but centre beyond the half-diagonal
    CHECK(adi_component(gt02, HazardBox({1.9, 1.9}, {9, 9})) == 0.0);
    CHECK(adi(one(gt02), {}) == 0.0);
    CHECK(adi(one(gt02), one(HazardBox({5, 5}, {6, 6}))) == 0.0);
    // per-GT mean over the overlapping boxes
    const std::vector<HazardBox> ids{gt02, HazardBox({0.5, 0.5}, {2.5, 2.5})};
    CHECK(adi(one(gt02), ids) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("breakdown and no-detection inputs")
{
    const std::vector<HazardBox> gts{gt02, HazardBox({10, 10}, {12, 12})};
    const auto b = breakdown(gts, one(HazardBox({1, 1}, {3, 3})));
    REQUIRE(b.size() == 2);
    CHECK(b[0].overlap == doctest::Approx(1.0));
    CHECK(b[0].matched == std::vector<std::size_t>{0});
    CHECK(b[1].matched.empty());
    CHECK(b[1].api == 0.0);
    CHECK(b[1].adi == 0.0);
    CHECK(api(gts, one(HazardBox({1, 1}, {3, 3}))) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("metric properties on random box sets")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 10), w(0.5, 4);
    auto random_box = [&] {
        std::vector<double> lo(3), hi(3);
        for (int d = 0; d < 3; ++d) {
            lo[d] = u(rng);
            hi[d] = lo[d] + w(rng);
        }
        return HazardBox(lo, hi);
    };
    // both lists pairwise disjoint, as produced by the identifier
    auto disjoint = [&](std::size_t n) {
        std::vector<HazardBox> out;
        while (out.size() < n) {
            auto b = random_box();
            bool clash = false;
            for (const auto& o : out) clash = clash || intersection_volume(o, b) > 0;
            if (!clash) out.push_back(b);
        }
        return out;
    };
    for (int t = 0; t < 200; ++t) {
        const auto gts = disjoint(2);
        const auto ids = disjoint(3);
        // clipped form of the overlap bound
        for (const auto& g : gts) {
            std::vector<HazardBox> clipped;
            for (const auto& b : ids) {
                auto c = b;
                for (int d = 0; d < 3; ++d) {
                    c.lower[d] = std::clamp(c.lower[d], g.lower[d], g.upper[d]);
                    c.upper[d] = std::clamp(c.upper[d], g.lower[d], g.upper[d]);
                }
                clipped.push_back(c);
            }
            CHECK(overlap_volume(g, std::vector<HazardBox>{clipped[0]}) <= box_volume(g) * (1 + 1e-12));
            CHECK(overlap_volume(g, ids) <= box_volume(g) + box_volume(ids[0]) + box_volume(ids[1]) + box_volume(ids[2]));
        }
        const double a = api(gts, ids), d = adi(gts, ids);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0 + 1e-12);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        auto perm = ids;
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(api(gts, perm) == doctest::Approx(a).epsilon(1e-12));
        CHECK(adi(gts, perm) == doctest::Approx(d).epsilon(1e-12));
        CHECK(api(gts, gts) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(adi(gts, gts) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("overlap volume against Monte Carlo membership")
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u01(0, 1);
    for (int t = 0; t < 10; ++t) {
        const HazardBox gt({0, 0, 0}, {4, 3, 2});
        // disjoint identified boxes: one random sub-box per cell of a 2x2x1 split
        std::vector<HazardBox> ids;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double cell_lo[3] = {2.0 * i - 0.5, 1.5 * j - 0.5, -0.5};
                const double cell[3] = {2.0, 1.5, 3.0};
                std::vector<double> lo(3), hi(3);
                for (int d = 0; d < 3; ++d) {
                    const double f = 0.6 + 0.4 * u01(rng);
                    lo[d] = cell_lo[d] + u01(rng) * (1 - f) * cell[d];
                    hi[d] = lo[d] + f * cell[d];
                }
                ids.emplace_back(lo, hi);
            }
        const double exact = overlap_volume(gt, ids);
        const std::size_t n = 1'000'000;
        std::size_t hit = 0;
        Point p(3);
        for (std::size_t k = 0; k < n; ++k) {
            for (int d = 0; d < 3; ++d) p[d] = gt.lower[d] + u01(rng) * gt.width(d);
            for (const auto& b : ids)
                if (contains(b, p)) {
                    ++hit;
                    break;
                }
        }
        const double mc = box_volume(gt) * static_cast<double>(hit) / static_cast<double>(n);
        REQUIRE(exact > 0.2 * box_volume(gt));
        CHECK(std::abs(mc - exact) <= 0.01 * exact);
    }
}

TEST_CASE("f2 on a grid")
{
    GroundTruth t;
    t.grid = kernels::Grid{{0, 0}, {9, 9}, {10, 10}};
    t.risk.assign(100, 0.0);
    t.hazardous.assign(100, 0);
    for (std::size_t i = 0; i < 100; ++i) {
        const auto mi = t.grid.multi_index(i);
        if (mi[0] >= 2 && mi[0] <= 4 && mi[1] >= 5 && mi[1] <= 7) t.hazardous[i] = 1;
    }
    CHECK(f2_grid_boxes(one(HazardBox({2, 5}, {4, 7})), t) == 1.0);
    CHECK(f2_grid_boxes({}, t) == 0.0);
    // one extra column predicted: P = 9/12, R = 1
    const double p = 9.0 / 12, r = 1.0;
    CHECK(f2_grid_boxes(one(HazardBox({2, 5}, {5, 7})), t) == doctest::Approx(5 * p * r / (4 * p + r)).epsilon(1e-12));
}

TEST_CASE("hazard ratio estimate")
{
    const auto obj = make_objective("gaussian-2d");
    const auto truth = grid_oracle(obj, 200);
    std::vector<SampleRecord> safe;
    for (int i = 0; i < 10; ++i) safe.push_back(make_record(obj.space, {-20.0 + 4 * i, 3.0}, 0.1, i));
    const auto none = train_classifier(safe, obj.space);
    CHECK(hazard_ratio_estimate(none, obj.space, 50) == 0.0);
    CHECK(f2_grid_classifier(none, truth) == 0.0);

    const auto coarse = grid_oracle(obj, 100);
    std::vector<SampleRecord> rs;
    for (std::size_t i = 0; i < coarse.size(); ++i) rs.push_back(make_record(obj.space, coarse.point(i), coarse.risk[i], i));
    const auto m = train_classifier(rs, obj.space);
    const double est = hazard_ratio_estimate(m, obj.space, 300);
    CHECK(est >= truth.hazardous_fraction / 2);
    CHECK(est <= truth.hazardous_fraction * 2);

    const double single = hazard_ratio_estimate(m, obj.space, 1);
    CHECK((single == 0.0 || single == 1.0));
    CHECK_THROWS_AS(hazard_ratio_estimate(m, obj.space, 0), Error);
}
