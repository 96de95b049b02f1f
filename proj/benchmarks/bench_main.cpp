// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "irsfb/decomposition.hpp"
#include "irsfb/feedback.hpp"
#include "irsfb/harness.hpp"
#include "irsfb/linalg.hpp"
#include "irsfb/random.hpp"
#include "irsfb/system.hpp"

namespace {

using namespace irsfb;

CVector unit_modulus(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    CVector v = complex_gaussian_vector(rng, n);
    for (auto& z : v) z /= std::abs(z);
    return v;
}

void BM_Svd(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const ComplexMatrix m(rows, 16, complex_gaussian_vector(rng, rows * 16));
    for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_Svd)->Arg(64)->Arg(256)->Arg(1024);

void BM_ParafacAls(benchmark::State& state) {
    const DenseTensor t = tensorize(unit_modulus(1024, 2), {64, 4, 4});
    const auto rank = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(parafac_als(t, {.rank = rank, .max_iterations = 50, .seed = 3}));
}
BENCHMARK(BM_ParafacAls)->Arg(1)->Arg(4)->Arg(16);

void BM_TuckerHosvd(benchmark::State& state) {
    const DenseTensor t = tensorize(unit_modulus(1024, 4), {64, 4, 4});
    for (auto _ : state) benchmark::DoNotOptimize(tucker_hosvd(t, {16, 4, 4}));
}
BENCHMARK(BM_TuckerHosvd);

void BM_CodecRoundTrip(benchmark::State& state) {
    const DenseTensor t = tensorize(unit_modulus(1024, 5), {256, 2, 2});
    const ParafacFit fit = parafac_als(t, {.rank = 1, .seed = 6});
    const unsigned bits[] = {3};
    const FeedbackPayload payload = quantize_parafac(fit.model, bits, 3);
    for (auto _ : state) benchmark::DoNotOptimize(decode_feedback(encode_feedback(payload)));
}
BENCHMARK(BM_CodecRoundTrip);

void BM_Trial(benchmark::State& state) {
    ExperimentConfig c;
    c.scenario = "bench";
    c.trials = 1;
    c.threads = 1;
    c.models = {parse_model_spec("baseline bits=3"), parse_model_spec("parafac p=3 rank=1 bits=3")};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_experiment(c));
        ++c.seed;
    }
}
BENCHMARK(BM_Trial)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
