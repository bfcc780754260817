#include <benchmark/benchmark.h>

#include "dicke/dicke.hpp"

using namespace dicke;

namespace {

CptParams demo_cpt()
{
    return cpt_collinear_from_widths(300.0, 1.0, 3e4, 30.0, 900.0, 0.1);
}

void BM_TwoLevelKernel(benchmark::State& state)
{
    auto const p = two_level_from_widths(1.0, 5.0, 5.0);
    double tau = 0.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(two_level_kernel(p, tau));
        tau = tau > 10.0 ? 0.0 : tau + 0.013;
    }
}
BENCHMARK(BM_TwoLevelKernel);

void BM_CptKernel(benchmark::State& state)
{
    auto const p = demo_cpt();
    double tau = 0.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(cpt_kernel(p, tau));
        tau = tau > 0.05 ? 0.0 : tau + 1e-4;
    }
}
BENCHMARK(BM_CptKernel);

void BM_TwoLevelSpectrum(benchmark::State& state)
{
    auto const p = two_level_from_widths(1.0, 5.0, 5.0);
    auto const grid = linspace(-25.0, 25.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(spectrum_general(p, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwoLevelSpectrum)->Arg(101)->Arg(1001)->Unit(benchmark::kMillisecond);

void BM_CptDip(benchmark::State& state)
{
    auto const p = demo_cpt();
    auto const grid = linspace(-20.0, 20.0, 201);
    for (auto _ : state)
        benchmark::DoNotOptimize(cpt_dip_general(p, grid));
}
BENCHMARK(BM_CptDip)->Unit(benchmark::kMillisecond);

void BM_PhaseFactor(benchmark::State& state)
{
    MotionParams const m{1.0, 1.0, VelocityModel::BrownianMotion};
    std::vector<double> const taus{0.5, 1.0, 2.0, 4.0};
    std::size_t const n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(phase_factor_estimate(Vec3(1.0, 0, 0), m, taus, n, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PhaseFactor)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DensityMatrixTrajectory(benchmark::State& state)
{
    CptParams p;
    p.system.gamma1 = 24.0;
    p.system.gamma_ad = 0.5;
    p.drive.omega1 = 1e-3;
    p.drive.omega2 = 0.25;
    p.motion = {1.0, 25.0, VelocityModel::StrongCollisions};
    p.geom.q1 = Vec3(250.0, 0, 0);
    p.geom.q2 = Vec3(245.0, 0, 0);
    auto const traj = sample_trajectory(p.motion, 20.0, 3, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            integrate_density_matrix(p.system, p.drive, p.geom, traj, 20.0));
}
BENCHMARK(BM_DensityMatrixTrajectory)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
