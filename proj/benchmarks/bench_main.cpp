#include <benchmark/benchmark.h>

#include "res112/bifurcations.hpp"
#include "res112/cli/commands.hpp"
#include "res112/critical_values.hpp"
#include "res112/monodromy.hpp"

using namespace res112;

static void BM_CatalogPoint(benchmark::State& st)
{
    FamilyParams p;
    p.lambda = 0.3;
    const auto r = *family_a_range(Family::CS3, 0.3);
    p.a = 0.5 * (r.first + r.second);
    for (auto _ : st) benchmark::DoNotOptimize(catalog_point(Family::CS3, p));
}
BENCHMARK(BM_CatalogPoint);

static void BM_OracleOneLambda(benchmark::State& st)
{
    OracleOptions o;
    o.grid = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(solve_bifurcations_numeric(1.0, {0.75}, o));
}
BENCHMARK(BM_OracleOneLambda)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_Equilibria(benchmark::State& st)
{
    for (auto _ : st) benchmark::DoNotOptimize(equilibria({0.3, 0.1}, {-0.2, 1.0}));
}
BENCHMARK(BM_Equilibria);

static void BM_ClassifyFiber(benchmark::State& st)
{
    for (auto _ : st) benchmark::DoNotOptimize(classify_fiber({0.02, -0.465}, {-1.0, 1.0}, -0.018));
}
BENCHMARK(BM_ClassifyFiber);

static void BM_CriticalSlice(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const SliceGrid g{-1.0, 1.0, -1.0, 1.0, n, n};
    for (auto _ : st) benchmark::DoNotOptimize(critical_slice({-1.0, 1.0}, g, 1));
}
BENCHMARK(BM_CriticalSlice)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

static void BM_RotationNumbers(benchmark::State& st)
{
    ModelParams mp;
    for (auto _ : st) benchmark::DoNotOptimize(rotation_numbers({0.2, 0.15, 0.2}, mp));
}
BENCHMARK(BM_RotationNumbers)->Unit(benchmark::kMicrosecond);

static void BM_GeneratorLoop(benchmark::State& st)
{
    ModelParams mp;
    mp.delta = st.range(0) / 10.0;
    const auto loop = generator_loop(Generator::Gamma2, mp).points;
    for (auto _ : st) benchmark::DoNotOptimize(monodromy_vector(loop, mp));
}
BENCHMARK(BM_GeneratorLoop)->Arg(0)->Arg(-10)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_BifdiagSixSlices(benchmark::State& st)
{
    cli::BifdiagConfig c;
    c.ells = {-1.25, -0.125, 0.0, 0.125, 0.3125, 0.75};
    c.workers = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(cli::bifdiag_tables(c));
}
BENCHMARK(BM_BifdiagSixSlices)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
