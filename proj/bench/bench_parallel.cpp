#include "amprb/damping_tensors.hpp"
#include "amprb/model_ad.hpp"
#include "amprb/stability.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace amprb;

namespace {

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = std::pow(10.0, a + (b - a) * k / (n - 1));
    return v;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}

void BM_scan_serial(benchmark::State& st) {
    const auto d = logspace(-2, 2, 8), b = linspace(0, 2.5, 8);
    for (auto _ : st) benchmark::DoNotOptimize(stab::scan_region_serial(d, b, 0.0, {}));
}

void BM_scan_parallel(benchmark::State& st) {
    const auto d = logspace(-2, 2, 8), b = linspace(0, 2.5, 8);
    stab::ScanOptions o;
    o.workers = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(stab::scan_region(d, b, 0.0, {}, o));
}

void BM_growth_serial(benchmark::State& st) {
    const auto d = logspace(-1, 1, 4), b = linspace(0.5, 2, 4);
    ad::SweepSpec spec;
    spec.n_steps = 400;
    spec.n_transient = 50;
    for (auto _ : st) benchmark::DoNotOptimize(ad::growth_sweep_serial(d, b, spec));
}

void BM_growth_parallel(benchmark::State& st) {
    const auto d = logspace(-1, 1, 4), b = linspace(0.5, 2, 4);
    ad::SweepSpec spec;
    spec.n_steps = 400;
    spec.n_transient = 50;
    for (auto _ : st) benchmark::DoNotOptimize(ad::growth_sweep(d, b, spec, static_cast<int>(st.range(0))));
}

void BM_tensors_serial(benchmark::State& st) {
    const auto m = damping::latlong_sphere(0.5, 256, 512, 0.01);
    for (auto _ : st) benchmark::DoNotOptimize(damping::assemble_tensors_serial(m, {}));
}

void BM_tensors_parallel(benchmark::State& st) {
    const auto m = damping::latlong_sphere(0.5, 256, 512, 0.01);
    for (auto _ : st) benchmark::DoNotOptimize(damping::assemble_tensors(m, {}, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(BM_scan_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scan_parallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_growth_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_growth_parallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tensors_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tensors_parallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
