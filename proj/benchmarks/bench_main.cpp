#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hvs/active_learner.hpp"
#include "hvs/config.hpp"
#include "hvs/gp.hpp"
#include "hvs/scenario.hpp"
#include "hvs/thermal_sim.hpp"

using namespace hvs;

namespace {

gp::Matrix random_inputs(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    gp::Matrix x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = u(rng);
    return x;
}

std::vector<double> targets(const gp::Matrix& x) {
    std::vector<double> y(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) y[static_cast<std::size_t>(i)] = std::sin(x.row(i).sum());
    return y;
}

gp::FitOptions opts() {
    gp::FitOptions f;
    f.lengthscale.value = 4.0;
    return f;
}

void BM_GpFit(benchmark::State& state) {
    const auto x = random_inputs(state.range(0), 6, 1);
    const auto y = targets(x);
    for (auto _ : state) benchmark::DoNotOptimize(gp::GpModel::fit(x, y, opts()));
}
BENCHMARK(BM_GpFit)->Arg(64)->Arg(128)->Arg(256);

void BM_GpPredictGrid(benchmark::State& state) {
    const auto x = random_inputs(state.range(0), 6, 2);
    const auto m = gp::GpModel::fit(x, targets(x), opts());
    const auto q = random_inputs(4096, 6, 3);
    for (auto _ : state) benchmark::DoNotOptimize(m.predict(q));
    state.SetItemsProcessed(state.iterations() * q.rows());
}
BENCHMARK(BM_GpPredictGrid)->Arg(64)->Arg(128);

void BM_SimulateHour(benchmark::State& state) {
    const auto b = config::default_building();
    const std::vector<double> sp(b.size(), 22.0);
    const auto start = thermal::RoomState::uniform(b.size(), 20.0);
    for (auto _ : state) benchmark::DoNotOptimize(thermal::simulate_hour(b, sp, 5.0, start, 60.0));
}
BENCHMARK(BM_SimulateHour);

void BM_TableLookup(benchmark::State& state) {
    learn::SurrogateTable t;
    t.grid = scenario::delta_grid(control::ComfortPolicy{}, 6);
    t.predicted.assign(t.grid.size(), 1.0);
    const std::vector<double> q{-1.0, 0.0, 1.0, 2.0, 0.0, -1.0};
    for (auto _ : state) benchmark::DoNotOptimize(t.lookup(q));
}
BENCHMARK(BM_TableLookup);

}  // namespace
BENCHMARK_MAIN();
