#include <benchmark/benchmark.h>

#include <random>

#include "icg/kernels.hpp"
#include "icg/pipeline.hpp"
#include "icg/sgfilter.hpp"
#include "icg/synth.hpp"

namespace {

std::vector<double> noise(std::size_t n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

void BM_SgSerial(benchmark::State& st) {
    const auto x = noise(static_cast<std::size_t>(st.range(0)));
    const auto& k = icg::cached_sg_kernel(25, 3);
    for (auto _ : st) benchmark::DoNotOptimize(icg::kernels::serial::sg_convolve(x, k));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SgOmp(benchmark::State& st) {
    const auto x = noise(static_cast<std::size_t>(st.range(0)));
    const auto& k = icg::cached_sg_kernel(25, 3);
    for (auto _ : st) benchmark::DoNotOptimize(icg::kernels::omp::sg_convolve(x, k));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_RelEnSerial(benchmark::State& st) {
    const auto x = noise(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(icg::kernels::serial::relative_energy(x, 35, 238));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_RelEnOmp(benchmark::State& st) {
    const auto x = noise(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(icg::kernels::omp::relative_energy(x, 35, 238));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

// One 3 s window at 250 Hz through the whole delineator.
void BM_PipelineWindow(benchmark::State& st) {
    icg::SyntheticBeatSpec spec;
    spec.noise = {{icg::NoiseComponent::Kind::White, 0.05, 0.0}};
    const auto rec = icg::generate(spec, 3.0, 250.0, 3);
    for (auto _ : st) benchmark::DoNotOptimize(icg::run_pipeline(rec.signal, {}));
}

}  // namespace

BENCHMARK(BM_SgSerial)->Arg(750)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_SgOmp)->Arg(750)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_RelEnSerial)->Arg(750)->Arg(1 << 14);
BENCHMARK(BM_RelEnOmp)->Arg(750)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_PipelineWindow)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
