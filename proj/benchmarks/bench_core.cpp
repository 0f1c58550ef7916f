// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "lmvpr/lmvpr.hpp"

namespace {

using namespace lmvpr;

GrayImage test_image(int w, int h) {
  std::vector<float> px(static_cast<std::size_t>(w) * h);
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> noise(0.f, 20.f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      px[static_cast<std::size_t>(y) * w + x] =
          120.f + 80.f * std::sin(x * 0.05f) * std::cos(y * 0.07f) + noise(rng);
    }
  }
  return GrayImage(w, h, std::move(px));
}

DescriptorBlock random_block(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  std::vector<float> data(n * dim);
  for (auto& v : data) v = normal(rng);
  return DescriptorBlock(dense_sample({640, 480}, ScaleSpec::default_spec(), "b"), dim, std::move(data));
}

void BM_DenseSample(benchmark::State& state) {
  const ImageDims dims{static_cast<int>(state.range(0)), static_cast<int>(state.range(0) * 3 / 4)};
  const auto spec = ScaleSpec::default_spec();
  for (auto _ : state) benchmark::DoNotOptimize(dense_sample(dims, spec));
}
BENCHMARK(BM_DenseSample)->Arg(640)->Arg(1920);

void BM_DescribeLandmarks(benchmark::State& state) {
  const auto image = test_image(640, 480);
  const auto set = dense_sample(image.dims(), ScaleSpec::default_spec());
  for (auto _ : state) benchmark::DoNotOptimize(describe_landmarks(image, set));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()));
}
BENCHMARK(BM_DescribeLandmarks)->Unit(benchmark::kMillisecond);

void BM_CompareImages(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto a = random_block(100, dim, 1);
  const auto b = random_block(100, dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(compare_images(a, b, {}));
}
BENCHMARK(BM_CompareImages)->Arg(144)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_CompareImagesSoftNms(benchmark::State& state) {
  const auto a = random_block(100, 144, 1);
  const auto b = random_block(100, 144, 2);
  MatchConfig cfg;
  cfg.soft_nms = SoftNmsConfig{};
  for (auto _ : state) benchmark::DoNotOptimize(compare_images(a, b, cfg));
}
BENCHMARK(BM_CompareImagesSoftNms)->Unit(benchmark::kMicrosecond);

void BM_Projection(benchmark::State& state) {
  const auto block = random_block(100, 4096, 3);
  const GaussianProjector projector(4096, ProjectionConfig{1024, 9});
  for (auto _ : state) benchmark::DoNotOptimize(projector.project(block));
}
BENCHMARK(BM_Projection)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
