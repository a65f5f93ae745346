#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hazmap/density.hpp"

using namespace hazmap;

namespace {

std::vector<SampleRecord> uniform_records(std::size_t n, const SearchSpace& s, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<SampleRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        Point p(s.dim());
        for (std::size_t d = 0; d < s.dim(); ++d) {
            p[d] = std::uniform_real_distribution<double>(s.lower[d], s.upper[d])(rng);
        }
        out.push_back(make_record(s, p, 0.0, i));
    }
    return out;
}

// brute-force product-kernel KDE in normalised coordinates
double kde_ref(const std::vector<SampleRecord>& rs, const SearchSpace& s, const std::vector<double>& h,
               std::span<const double> p)
{
    long double sum = 0;
    for (const auto& r : rs) {
        long double k = 1;
        for (std::size_t d = 0; d < s.dim(); ++d) {
            const long double z = ((p[d] - r.point[d]) / s.span(d)) / h[d];
            k *= std::exp(-0.5L * z * z) / (h[d] * std::sqrt(2 * std::numbers::pi_v<long double>));
        }
        sum += k;
    }
    return static_cast<double>(sum / rs.size());
}

}  // namespace

TEST_CASE("uniform samples give roughly unit density at the centre")
{
    const SearchSpace s({0, 0}, {1, 1}, 0.5);
    const auto rs = uniform_records(100, s, 1);
    const auto m = fit_density(rs, s);
    const double c = m.density_at(Point{0.5, 0.5});
    CHECK(c >= 0.5);
    CHECK(c <= 2.0);
}

TEST_CASE("scott bandwidth per axis")
{
    const SearchSpace s({0, -10}, {1, 10}, 0.5);
    const auto rs = uniform_records(50, s, 2);
    const auto m = fit_density(rs, s);
    for (std::size_t d = 0; d < 2; ++d) {
        double mean = 0, var = 0;
        for (const auto& r : rs) mean += s.normalize(r.point)[d];
        mean /= 50;
        for (const auto& r : rs) var += std::pow(s.normalize(r.point)[d] - mean, 2);
        var /= 49;
        CHECK(m.bandwidth()[d] == doctest::Approx(std::sqrt(var) * std::pow(50.0, -1.0 / 6)).epsilon(1e-12));
    }
}

TEST_CASE("degenerate and minimal sample sets")
{
    const SearchSpace s({0, 0}, {1, 1}, 0.5);
    std::vector<SampleRecord> same(5, make_record(s, {0.3, 0.3}, 0.0, 0));
    const auto m = fit_density(same, s);
    CHECK(m.bandwidth()[0] == kMinBandwidth);
    CHECK(std::isfinite(m.density_at(Point{0.3, 0.3})));
    const auto two = uniform_records(2, s, 3);
    CHECK_NOTHROW(fit_density(two, s));
    CHECK_THROWS_AS(fit_density(std::span(two).first(1), s), Error);
}

TEST_CASE("density agrees with a brute-force kernel sum")
{
    const SearchSpace s({-5, 0, 2}, {5, 1, 3}, 0.5);
    const auto rs = uniform_records(200, s, 4);
    const auto m = fit_density(rs, s);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 50; ++t) {
        Point p(3);
        for (std::size_t d = 0; d < 3; ++d) p[d] = std::uniform_real_distribution<double>(s.lower[d], s.upper[d])(rng);
        CHECK(m.density_at(p) == doctest::Approx(kde_ref(rs, s, m.bandwidth(), p)).epsilon(1e-9));
    }
}

TEST_CASE("density is positive far away, larger in clusters, repeatable")
{
    const SearchSpace s({0, 0}, {1, 1}, 0.5);
    std::vector<SampleRecord> rs;
    for (int i = 0; i < 20; ++i) rs.push_back(make_record(s, {0.2 + 0.001 * i, 0.2}, 0.0, i));
    rs.push_back(make_record(s, {0.8, 0.8}, 0.0, 20));
    const auto m = fit_density(rs, s);
    const double far = m.density_at(Point{1.0, 0.0});
    CHECK(far > 0.0);
    CHECK(m.density_at(Point{0.21, 0.2}) > m.density_at(Point{0.8, 0.8}));
    CHECK(m.density_at(Point{0.5, 0.5}) == m.density_at(Point{0.5, 0.5}));
}

TEST_CASE("density weights")
{
    auto w = density_weights(std::vector<double>{1, 1, 1, 1});
    for (double v : w) CHECK(v == 0.25);
    w = density_weights(std::vector<double>{1, 3});
    CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(density_weights(std::vector<double>{7.5}) == std::vector<double>{1.0});
    CHECK_THROWS_AS(density_weights(std::vector<double>{}), Error);
}

TEST_CASE("density weights sum to one and invert the density order")
{
    std::mt19937_64 rng(6);
    std::lognormal_distribution<double> ln(0, 3);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> rho(1 + t % 40);
        for (auto& r : rho) r = ln(rng);
        const auto w = density_weights(rho);
        double sum = 0;
        for (double v : w) {
            CHECK(v > 0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        for (std::size_t i = 0; i < rho.size(); ++i)
            for (std::size_t j = 0; j < rho.size(); ++j)
                if (rho[i] < rho[j]) CHECK(w[i] > w[j]);
    }
}

TEST_CASE("assign_densities fills every record through the batched kernel")
{
    const SearchSpace s({0, 0}, {1, 1}, 0.5);
    auto rs = uniform_records(300, s, 8);
    assign_densities(rs, s);
    const auto m = fit_density(rs, s);
    for (std::size_t i = 0; i < rs.size(); i += 17) CHECK(rs[i].density == m.density_at(rs[i].point));
}
