#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sbqcp/oracle_ed.hpp"
#include "sbqcp/qcp.hpp"

using namespace sbqcp;

namespace {

const std::vector<double> kGrid{0.1, 0.3, 0.5, 0.7};

EdInstance ed_instance()
{
    const BathParams p{0.5, 0.2, 0.1};
    return EdInstance{discretize_bath(p, Scheme::linear, 5), 0.1, 10};
}

void BM_ScanSerial(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(scan_alpha_serial(BathParams{1.0, 0.0, 0.1}, kGrid));
}

void BM_ScanParallel(benchmark::State& state)
{
    QcpOptions opt;
    opt.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(scan_alpha(BathParams{1.0, 0.0, 0.1}, kGrid, opt));
}

void BM_SectorApplySerial(benchmark::State& state)
{
    const SectorOperator op(ed_instance(), 1);
    std::vector<double> x(op.size(), 1.0), y(op.size());
    for (auto _ : state) {
        op.apply_serial(x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(op.size()));
}

void BM_SectorApplyParallel(benchmark::State& state)
{
    const SectorOperator op(ed_instance(), 1);
    std::vector<double> x(op.size(), 1.0), y(op.size());
    for (auto _ : state) {
        op.apply(x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(op.size()));
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SectorApplySerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SectorApplyParallel)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
