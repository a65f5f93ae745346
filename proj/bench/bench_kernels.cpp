#include <benchmark/benchmark.h>

#include <random>

#include "hazmap/kernels.hpp"
#include "hazmap/objectives.hpp"

using namespace hazmap;
namespace k = hazmap::kernels;

namespace {

PointSet random_points(std::size_t n, std::size_t dim, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    PointSet s(dim);
    s.data.resize(n * dim);
    for (auto& v : s.data) v = u(rng);
    return s;
}

template <bool Parallel>
void BM_kde(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto samples = random_points(n, 4, 1);
    const auto queries = random_points(n, 4, 2);
    const std::vector<double> inv_bw(4, 1.5);
    std::vector<double> out(n);
    for (auto _ : state) {
        if constexpr (Parallel) k::gaussian_kernel_sum(samples, inv_bw, queries, out);
        else k::gaussian_kernel_sum_serial(samples, inv_bw, queries, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <bool Parallel>
void BM_knn(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto train = random_points(n, 4, 3);
    std::vector<k::Neighbor> out;
    for (auto _ : state) {
        if constexpr (Parallel) k::nearest_neighbors(train, train, 10, {}, out);
        else k::nearest_neighbors_serial(train, train, 10, {}, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_grid(benchmark::State& state)
{
    const auto obj = make_objective("gaussian-2d");
    const auto r = static_cast<std::size_t>(state.range(0));
    k::Grid g{obj.space.lower, obj.space.upper, {r, r}};
    std::vector<double> out(g.size());
    for (auto _ : state) {
        if constexpr (Parallel) k::evaluate_grid(g, obj.evaluate, out);
        else k::evaluate_grid_serial(g, obj.evaluate, out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_kde<false>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kde<true>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_knn<false>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_knn<true>)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_grid<false>)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid<true>)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
