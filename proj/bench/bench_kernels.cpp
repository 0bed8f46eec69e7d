// SPDX-License-Identifier: Apache-2.0
//
// Throughput comparison of the OpenMP kernels against their serial
// reference implementations. Run manually: build/bench/csiauth_bench

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "csiauth/dataset.hpp"
#include "csiauth/models.hpp"

using namespace csiauth;

namespace {

data::TrainGridConfig small_grid() {
    data::TrainGridConfig cfg;
    cfg.models = {chan::TgnModelId::B, chan::TgnModelId::D};
    cfg.snrs_db = {5.0, 15.0, 50.0};
    cfg.distances_wl = {0.25, 1.0, 3.0};
    cfg.pairs_per_cell = 8;
    cfg.seed = 1;
    return cfg;
}

void grid_generation_serial(benchmark::State& state) {
    const auto cfg = small_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(data::generate_training_grid_serial(cfg));
    }
}

void grid_generation_openmp(benchmark::State& state) {
    const auto cfg = small_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(data::generate_training_grid(cfg));
    }
}

struct GradFixture {
    data::Dataset ds;
    nn::PairBatch batch;
    nn::SiameseWeights weights;
    std::vector<std::size_t> indices;

    explicit GradFixture(nn::ArchSpec arch) {
        data::PairGenConfig pc;
        pc.snr_db = 15.0;
        ds = data::generate_cell(pc, 16, 2);
        batch = nn::PairBatch::from_dataset(ds, arch.input_len);
        weights = nn::init_weights(arch, 3);
        indices.resize(batch.size());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
    }
};

void batch_gradient_serial_cnn(benchmark::State& state) {
    GradFixture fx(nn::ArchSpec::cnn());
    std::vector<double> grad;
    double loss = 0.0;
    for (auto _ : state) {
        nn::batch_gradient_serial(fx.weights, fx.batch, fx.indices, 1.0, &grad, &loss);
        benchmark::DoNotOptimize(loss);
    }
}

void batch_gradient_openmp_cnn(benchmark::State& state) {
    GradFixture fx(nn::ArchSpec::cnn());
    std::vector<double> grad;
    double loss = 0.0;
    for (auto _ : state) {
        nn::batch_gradient(fx.weights, fx.batch, fx.indices, 1.0, &grad, &loss);
        benchmark::DoNotOptimize(loss);
    }
}

void score_batch_openmp(benchmark::State& state) {
    GradFixture fx(nn::ArchSpec::cnn());
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::score_batch(fx.weights, fx.batch));
    }
}

}  // namespace

BENCHMARK(grid_generation_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(grid_generation_openmp)->Unit(benchmark::kMillisecond);
BENCHMARK(batch_gradient_serial_cnn)->Unit(benchmark::kMillisecond);
BENCHMARK(batch_gradient_openmp_cnn)->Unit(benchmark::kMillisecond);
BENCHMARK(score_batch_openmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
