#include <benchmark/benchmark.h>

#include <cmath>

#include "thresholdscope/bs.hpp"
#include "thresholdscope/quadrature.hpp"

using namespace ts;

namespace {

PotentialSpec well(Family f, int n) {
    PotentialSpec s;
    s.family = f;
    s.n = n;
    s.shape = SquareWell{1.0, 1.0};
    return s;
}

GridSpec full_grid(double h) {
    GridSpec g;
    g.kind = GridKind::full;
    g.spacing = h;
    return g;
}

Execution mode(const benchmark::State& st, int arg = 1) {
    return st.range(arg) ? Execution::parallel : Execution::serial;
}

void BM_radial_schrodinger(benchmark::State& st) {
    const PotentialSpec s = well(Family::schrodinger, 3);
    for (auto _ : st) benchmark::DoNotOptimize(radial_reduce(s, int(st.range(0)), 0.0, mode(st)).size());
}

void BM_radial_dirac(benchmark::State& st) {
    const PotentialSpec s = well(Family::dirac_massless, 3);
    for (auto _ : st) benchmark::DoNotOptimize(radial_reduce(s, int(st.range(0)), 1.0, mode(st)).size());
}

void BM_full_grid_schrodinger(benchmark::State& st) {
    const PotentialSpec s = well(Family::schrodinger, int(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(assemble_bs(s, full_grid(1.0 / double(st.range(1))), mode(st, 2)).size());
}

void BM_full_grid_dirac(benchmark::State& st) {
    const PotentialSpec s = well(Family::dirac_massless, 2);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_bs(s, full_grid(1.0 / double(st.range(0))), mode(st)).size());
}

void BM_integrate(benchmark::State& st) {
    PolarRuleOptions opt;
    opt.origin = Eigen::VectorXd::Zero(3);
    opt.outer_radius = 8.0;
    opt.level = int(st.range(0));
    const NodeSet rule = polar_rule(3, {}, opt);
    auto f = [](const Eigen::VectorXd& y) { return std::exp(-y.squaredNorm()); };
    for (auto _ : st)
        benchmark::DoNotOptimize(st.range(1) ? integrate(rule, f, 0.0) : integrate_serial(rule, f, 0.0));
    st.counters["nodes"] = double(rule.size());
}

}  // namespace

// Last argument: 0 serial reference, 1 OpenMP.
BENCHMARK(BM_radial_schrodinger)->ArgsProduct({{1000, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_radial_dirac)->ArgsProduct({{1000, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
// Arguments: dimension, 1/h, execution.
BENCHMARK(BM_full_grid_schrodinger)->Args({3, 4, 0})->Args({3, 4, 1})->Args({3, 6, 0})->Args({3, 6, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_full_grid_dirac)->ArgsProduct({{6, 8}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integrate)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
