// Serial reference path (jobs = 1) against the OpenMP path for the two
// parallel workloads: grid points within tune() and replications within
// replicate().

#include <bagus/evaluation.hpp>
#include <bagus/parallel.hpp>
#include <bagus/selection.hpp>
#include <bagus/simulation.hpp>

#include <benchmark/benchmark.h>

#include <algorithm>

using namespace bagus;

namespace {

Dataset bench_data(Index p, Index n) {
    SimulationSpec spec;
    spec.model = GraphModel::ar2;
    spec.p = p;
    spec.n = n;
    spec.seed = 42;
    return simulate(spec);
}

int jobs_for(const benchmark::State& state) {
    return state.range(1) == 0 ? 1 : std::max(2, available_threads());
}

void BM_Tune(benchmark::State& state) {
    const Index p = state.range(0);
    const Dataset data = bench_data(p, 100);
    const auto grid = default_grid(100, p);
    TuneOptions opts;
    opts.jobs = jobs_for(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tune(data, grid, opts).best_index);
    }
    state.SetLabel(opts.jobs == 1 ? "serial" : "openmp x" + std::to_string(opts.jobs));
}

void BM_Replicate(benchmark::State& state) {
    SimulationSpec spec;
    spec.model = GraphModel::star;
    spec.p = state.range(0);
    spec.n = 100;
    spec.seed = 7;
    const int jobs = jobs_for(state);
    const ReplicationRunner runner = [](const ReplicationContext& c) {
        const Dataset d = simulate(c.spec);
        const TuneReport r = tune(d, default_grid(c.spec.n, c.spec.p));
        const MetricsReport m = evaluate(r.best_fit.theta_hat, threshold_graph(r.best_fit.pmat), *d.truth);
        return std::map<std::string, double>{{"mcc", m.mcc}};
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(replicate(spec, 8, runner, jobs).metrics.size());
    }
    state.SetLabel(jobs == 1 ? "serial" : "openmp x" + std::to_string(jobs));
}

} // namespace

BENCHMARK(BM_Tune)->ArgsProduct({{20, 50}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replicate)->ArgsProduct({{20}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
