// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/descriptors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

DescriptorBlock::DescriptorBlock(LandmarkSet landmarks, std::size_t dim, std::vector<float> data)
    : landmarks_(std::move(landmarks)), dim_(dim), data_(std::move(data)) {
  if (data_.size() != landmarks_.size() * dim_) {
    throw DataError(fmt::format("descriptor block '{}': {} values for {} rows of dim {}",
                                landmarks_.image_id, data_.size(), landmarks_.size(), dim_));
  }
  if (!landmarks_.empty() && dim_ == 0) {
    throw DataError(fmt::format("descriptor block '{}': zero dimension", landmarks_.image_id));
  }
  for (float v : data_) {
    if (!std::isfinite(v)) {
      throw DataError(fmt::format("descriptor block '{}': non-finite value", landmarks_.image_id));
    }
  }
}

namespace {

using patch::kGrid;

// Coverage weights of source samples [0, n) by `out` equal-width output
// cells. Each entry is (first source index, weights...), normalized to 1.
struct AxisWeights {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

AxisWeights area_weights(int n, int out) {
  AxisWeights aw;
  aw.first.resize(static_cast<std::size_t>(out));
  aw.weights.resize(static_cast<std::size_t>(out));
  const double step = static_cast<double>(n) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * step;
    const double hi = (o + 1) * step;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(n - 1, static_cast<int>(std::ceil(hi)) - 1);
    auto& w = aw.weights[static_cast<std::size_t>(o)];
    aw.first[static_cast<std::size_t>(o)] = first;
    for (int s = first; s <= last; ++s) {
      const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
      w.push_back(std::max(0.0, overlap) / step);
    }
  }
  return aw;
}

std::array<double, kGrid * kGrid> resample(const GrayImage& image, const BoundingBox& box) {
  const AxisWeights wx = area_weights(box.w, kGrid);
  const AxisWeights wy = area_weights(box.h, kGrid);

  // Horizontal pass: box.h rows x kGrid columns.
  std::vector<double> rows(static_cast<std::size_t>(box.h) * kGrid);
  for (int y = 0; y < box.h; ++y) {
    for (int o = 0; o < kGrid; ++o) {
      const auto& w = wx.weights[static_cast<std::size_t>(o)];
      const int x0 = box.x + wx.first[static_cast<std::size_t>(o)];
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k] * image.at(x0 + static_cast<int>(k), box.y + y);
      }
      rows[static_cast<std::size_t>(y) * kGrid + o] = acc;
    }
  }
  std::array<double, kGrid * kGrid> grid{};
  for (int o = 0; o < kGrid; ++o) {
    const auto& w = wy.weights[static_cast<std::size_t>(o)];
    const int y0 = wy.first[static_cast<std::size_t>(o)];
    for (int x = 0; x < kGrid; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k] * rows[static_cast<std::size_t>(y0 + static_cast<int>(k)) * kGrid + x];
      }
      grid[static_cast<std::size_t>(o) * kGrid + x] = acc;
    }
  }
  return grid;
}

void l2_normalize(std::span<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

}  // namespace

Descriptor describe_patch(const GrayImage& image, const BoundingBox& box) {
  if (!box.fits(image.dims())) {
    throw GeometryError(fmt::format("box {} outside image {}x{}", to_string(box), image.width(),
                                    image.height()));
  }
  const auto grid = resample(image, box);
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, kGrid - 1);
    y = std::clamp(y, 0, kGrid - 1);
    return grid[static_cast<std::size_t>(y) * kGrid + x];
  };

  std::array<double, patch::kDim> hist{};
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kBinWidth = kTwoPi / patch::kOrientations;
  constexpr int kCellSide = kGrid / patch::kCells;

  for (int y = 0; y < kGrid; ++y) {
    for (int x = 0; x < kGrid; ++x) {
      const double gx = px(x + 1, y) - px(x - 1, y);
      const double gy = px(x, y + 1) - px(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag <= 1e-9) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += kTwoPi;
      // Soft assignment between the two nearest bin centres.
      const double pos = angle / kBinWidth - 0.5;
      const double lower = std::floor(pos);
      const double frac = pos - lower;
      const int b0 = (static_cast<int>(lower) + patch::kOrientations) % patch::kOrientations;
      const int b1 = (b0 + 1) % patch::kOrientations;
      const int cell = (y / kCellSide) * patch::kCells + (x / kCellSide);
      hist[static_cast<std::size_t>(cell * patch::kOrientations + b0)] += mag * (1.0 - frac);
      hist[static_cast<std::size_t>(cell * patch::kOrientations + b1)] += mag * frac;
    }
  }

  constexpr double kIntensityWidth = 256.0 / patch::kIntensityBins;
  for (double v : grid) {
    const double pos = std::clamp(v, 0.0, 255.999) / kIntensityWidth - 0.5;
    const double lower = std::floor(pos);
    const double frac = pos - lower;
    const int b0 = static_cast<int>(lower);
    const int b1 = b0 + 1;
    auto* intensity = hist.data() + patch::kGradientDim;
    if (b0 >= 0) intensity[b0] += 1.0 - frac;
    else intensity[0] += 1.0 - frac;
    if (b1 < patch::kIntensityBins) intensity[b1] += frac;
    else intensity[patch::kIntensityBins - 1] += frac;
  }

  l2_normalize(std::span<double>(hist.data(), patch::kGradientDim));
  l2_normalize(std::span<double>(hist.data() + patch::kGradientDim, patch::kIntensityBins));
  l2_normalize(hist);

  Descriptor d;
  d.values.assign(hist.begin(), hist.end());
  return d;
}

DescriptorBlock describe_landmarks(const GrayImage& image, const LandmarkSet& landmarks) {
  if (landmarks.dims != image.dims()) {
    throw GeometryError(fmt::format("landmarks for {}x{} applied to a {}x{} image",
                                    landmarks.dims.width, landmarks.dims.height, image.width(),
                                    image.height()));
  }
  std::vector<float> data;
  data.reserve(landmarks.size() * patch::kDim);
  for (const auto& lm : landmarks.landmarks) {
    const auto d = describe_patch(image, lm.box);
    data.insert(data.end(), d.values.begin(), d.values.end());
  }
  return DescriptorBlock(landmarks, patch::kDim, std::move(data));
}

CosineDistance cosine_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DataError(fmt::format("cosine distance between dims {} and {}", a.size(), b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return {1.0, true};
  return {1.0 - dot / (std::sqrt(na) * std::sqrt(nb)), false};
}

}  // namespace lmvpr
