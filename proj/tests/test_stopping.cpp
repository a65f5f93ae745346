#include <random>

#include "doctest.h"
#include "hazmap/stopping.hpp"

using namespace hazmap;

namespace {

const SearchSpace unit2({0, 0}, {1, 1}, 0.5);

// centre of cell (i, j) on a 10 x 10 grid
Point cell_point(int i, int j, double jitter = 0.0)
{
    return {(i + 0.5 + jitter) / 10.0, (j + 0.5 + jitter) / 10.0};
}

}  // namespace

TEST_CASE("one test point per occupied cell")
{
    std::vector<SampleRecord> rs;
    for (int i = 0; i < 4; ++i) rs.push_back(make_record(unit2, cell_point(i, i), 0.1, i));
    auto sp = stratified_split(rs, unit2, 10);
    CHECK(sp.test.size() == 4);
    CHECK(sp.train.empty());

    rs.clear();
    for (int i = 0; i < 10; ++i) rs.push_back(make_record(unit2, cell_point(3, 3, 0.03 * i), 0.1 * i, i));
    sp = stratified_split(rs, unit2, 10);
    CHECK(sp.test.size() == 1);
    CHECK(sp.train.size() == 9);
    CHECK(sp.occupied_cells == 1);
}

TEST_CASE("coverage counts occupied cells")
{
    std::vector<SampleRecord> rs;
    for (int c = 0; c < 85; ++c) rs.push_back(make_record(unit2, cell_point(c / 10, c % 10), 0.2, c));
    const auto sp = stratified_split(rs, unit2, 10);
    CHECK(sp.occupied_cells == 85);
    CHECK(sp.total_cells == 100);
    CHECK(coverage_ct(sp) == 0.85);
    CHECK(coverage_ct(stratified_split({}, unit2, 10)) == 0.0);
    for (int c = 85; c < 100; ++c) rs.push_back(make_record(unit2, cell_point(c / 10, c % 10), 0.2, c));
    CHECK(coverage_ct(stratified_split(rs, unit2, 10)) == 1.0);
    CHECK_THROWS_AS(stratified_split(rs, unit2, 1), Error);
}

TEST_CASE("test representative is the record nearest the cell median")
{
    std::vector<SampleRecord> rs;
    const double risks[] = {0.9, 0.1, 0.45, 0.3, 0.7};  // median 0.45
    for (int i = 0; i < 5; ++i) rs.push_back(make_record(unit2, cell_point(0, 0, 0.05 * i), risks[i], i));
    auto sp = stratified_split(rs, unit2, 10);
    REQUIRE(sp.test.size() == 1);
    CHECK(sp.test[0] == 2);

    // even count: median 0.5, records at 0.25 and 0.75 tie; lower sample_index wins
    rs.clear();
    const double r2[] = {0.75, 0.0, 0.25, 1.0};
    const std::size_t idx[] = {5, 6, 9, 7};
    for (int i = 0; i < 4; ++i) rs.push_back(make_record(unit2, cell_point(0, 0, 0.05 * i), r2[i], idx[i]));
    sp = stratified_split(rs, unit2, 10);
    CHECK(sp.test[0] == 0);
}

TEST_CASE("split is a partition; coverage never drops as records arrive")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 50; ++t) {
        std::vector<SampleRecord> rs;
        double last = 0.0;
        const std::size_t n = 1 + t * 7;
        for (std::size_t i = 0; i < n; ++i) {
            rs.push_back(make_record(unit2, {u(rng), u(rng)}, u(rng), i));
            const auto sp = stratified_split(rs, unit2, 2 + t % 9);
            const double c = coverage_ct(sp);
            CHECK(c >= last);
            last = c;
            if (i + 1 == n) {
                std::vector<int> seen(rs.size(), 0);
                for (auto k : sp.test) ++seen[k];
                for (auto k : sp.train) ++seen[k];
                for (int s : seen) CHECK(s == 1);
                CHECK(sp.test.size() == sp.occupied_cells);
            }
        }
    }
}

TEST_CASE("f2 score")
{
    CHECK(f2_from_counts(8, 2, 2) == doctest::Approx(0.8).epsilon(1e-12));
    std::vector<unsigned char> pred, truth;
    for (int i = 0; i < 8; ++i) { pred.push_back(1); truth.push_back(1); }
    for (int i = 0; i < 2; ++i) { pred.push_back(1); truth.push_back(0); }
    for (int i = 0; i < 2; ++i) { pred.push_back(0); truth.push_back(1); }
    CHECK(std::abs(f2_score(pred, truth) - 0.8) <= 1e-9);
    CHECK(f2_score(truth, truth) == 1.0);
    std::vector<unsigned char> none(truth.size(), 0);
    CHECK(f2_score(none, truth) == 0.0);
    CHECK_THROWS_AS(f2_score(std::vector<unsigned char>{1}, truth), Error);
}

TEST_CASE("f2 matches the beta formula on random confusion matrices")
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> c(0, 50);
    for (int t = 0; t < 1000; ++t) {
        const int tp = c(rng), fp = c(rng), fn = c(rng);
        double expect = 0.0;
        if (tp > 0) {
            const double beta2 = 4.0;
            const double prec = tp / double(tp + fp), rec = tp / double(tp + fn);
            expect = (1 + beta2) * prec * rec / (beta2 * prec + rec);
        }
        CHECK(f2_from_counts(tp, fp, fn) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("stop decision is the conjunction of coverage and F2")
{
    auto fill = [](int cells, bool scramble) {
        std::vector<SampleRecord> rs;
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-0.45, 0.45);
        std::size_t idx = 0;
        for (int c = 0; c < cells; ++c)
            for (int k = 0; k < 6; ++k) {
                const Point p = cell_point(c / 10, c % 10, u(rng));
                const bool haz = scramble ? (rng() % 2 == 0) : p[0] < 0.5;
                rs.push_back(make_record(unit2, p, haz ? 0.9 : 0.1, idx++));
            }
        return rs;
    };
    const StopSettings st;
    const ClassifierConfig cc;

    auto d = should_stop(fill(85, false), unit2, cc, st);
    CHECK(d.coverage == 0.85);
    CHECK(d.f2_obv >= 0.95);
    CHECK(d.stop);

    d = should_stop(fill(60, false), unit2, cc, st);
    CHECK(d.coverage == 0.6);
    CHECK(d.f2_obv >= 0.9);
    CHECK_FALSE(d.stop);

    d = should_stop(fill(90, true), unit2, cc, st);
    CHECK(d.coverage == 0.9);
    CHECK(d.f2_obv < 0.9);
    CHECK_FALSE(d.stop);

    CHECK(d.test_size + d.train_size == 90 * 6);
    CHECK_THROWS_AS(should_stop(std::vector<SampleRecord>(1), unit2, cc, st), Error);
}

TEST_CASE("check cadence")
{
    const StopSettings st;
    CHECK_FALSE(is_check_point(250, st));
    CHECK(is_check_point(500, st));
    CHECK_FALSE(is_check_point(600, st));
    CHECK(is_check_point(2750, st));
    CHECK(next_check_point(0, st) == 500);
    CHECK(next_check_point(500, st) == 750);
    CHECK(next_check_point(740, st) == 750);
    CHECK(default_stratification_bins(3) == 10);
    CHECK(default_stratification_bins(4) == 6);
}
