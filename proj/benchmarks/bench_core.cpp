#include "tis/env.hpp"
#include "tis/planner.hpp"
#include "tis/reach.hpp"
#include "tis/time_informed_set.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace tis;

namespace {

const ProblemConfig& problem(const std::string& name) {
    static std::map<std::string, ProblemConfig> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, builtin_problem(name)).first;
    return it->second;
}

std::shared_ptr<const ReachLibrary> library(const std::string& name, double horizon) {
    const ProblemConfig& c = problem(name);
    return std::make_shared<const ReachLibrary>(
        build_library(c.system, c.environment.start(), c.environment.goal(), horizon,
                      c.library.step, c.library.start_radius));
}

const char* kNames[] = {"toy2d", "moonlander", "quadrotor", "toy8d"};

}  // namespace

static void BM_MatExp(benchmark::State& state) {
    const Matrix& A = problem(kNames[state.range(0)]).system.A();
    for (auto _ : state) benchmark::DoNotOptimize(mat_exp(A, 0.37));
    state.SetLabel(kNames[state.range(0)]);
}
BENCHMARK(BM_MatExp)->DenseRange(0, 3);

static void BM_Contains(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Ellipsoid E(Vector::Zero(n), Matrix::Identity(n, n) * 2.0);
    Rng rng(1);
    const Vector x = sample_box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0), rng);
    for (auto _ : state) benchmark::DoNotOptimize(contains(E, x));
}
BENCHMARK(BM_Contains)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

static void BM_SampleUniform(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Ellipsoid E(Vector::Zero(n), Matrix::Identity(n, n) * 2.0);
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_uniform(E, rng));
}
BENCHMARK(BM_SampleUniform)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

static void BM_BuildLibrary(benchmark::State& state) {
    const char* name = kNames[state.range(0)];
    for (auto _ : state) benchmark::DoNotOptimize(library(name, 5.0));
    state.SetLabel(name);
}
BENCHMARK(BM_BuildLibrary)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_GenerateSample(benchmark::State& state) {
    const ProblemConfig& c = problem("toy2d");
    TimeInformedSet tis(library("toy2d", 15.0), c.environment.state_lo(),
                        c.environment.state_hi(), c.tie);
    tis.update_best_cost(static_cast<double>(state.range(0)));
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(tis.generate_sample(rng));
    state.counters["fallback_ratio"] = fallback_ratio(tis.stats());
}
BENCHMARK(BM_GenerateSample)->Arg(9)->Arg(12)->Arg(15);

static void BM_IncludeVertex(benchmark::State& state) {
    const ProblemConfig& c = problem("toy2d");
    TimeInformedSet tis(library("toy2d", 15.0), c.environment.state_lo(),
                        c.environment.state_hi(), c.tie);
    tis.update_best_cost(12.0);
    Rng rng(2);
    std::vector<Vector> points;
    for (int i = 0; i < 256; ++i) {
        points.push_back(sample_box(c.environment.state_lo(), c.environment.state_hi(), rng));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tis.include_vertex(points[i++ % points.size()], 4.0));
    }
}
BENCHMARK(BM_IncludeVertex);

static void BM_PlannerIterations(benchmark::State& state) {
    const ProblemConfig& c = problem("toy2d");
    const auto s = static_cast<Strategy>(state.range(0));
    auto lib = library("toy2d", 20.0);
    for (auto _ : state) {
        Rng rng(3);
        benchmark::DoNotOptimize(solve(c, s, Budget::iters(5000), rng, lib));
    }
    state.SetLabel(to_string(s));
    state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_PlannerIterations)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
