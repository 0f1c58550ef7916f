// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

std::string to_string(const BoundingBox& box) {
  return fmt::format("({}, {}, {}, {})", box.x, box.y, box.w, box.h);
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

double area_ratio(const BoundingBox& box, const ImageDims& dims) {
  if (dims.width <= 0 || dims.height <= 0) {
    throw GeometryError(fmt::format("zero-area image {}x{}", dims.width, dims.height));
  }
  if (box.w <= 0 || box.h <= 0) {
    throw GeometryError("zero-area box " + to_string(box));
  }
  if (!box.fits(dims)) {
    throw GeometryError(fmt::format("box {} exceeds image {}x{}", to_string(box),
                                    dims.width, dims.height));
  }
  return static_cast<double>(box.area()) / static_cast<double>(dims.area());
}

int scale_index(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw DomainError(fmt::format("normalized scale {} outside (0, 1]", ratio));
  }
  auto it = std::upper_bound(kScaleBinLower.begin(), kScaleBinLower.end(), ratio);
  return static_cast<int>(it - kScaleBinLower.begin());
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t ix0 = std::max(a.x, b.x);
  const std::int64_t iy0 = std::max(a.y, b.y);
  const std::int64_t ix1 = std::min<std::int64_t>(std::int64_t{a.x} + a.w, std::int64_t{b.x} + b.w);
  const std::int64_t iy1 = std::min<std::int64_t>(std::int64_t{a.y} + a.h, std::int64_t{b.y} + b.h);
  if (ix1 <= ix0 || iy1 <= iy0) return 0.0;
  const std::int64_t inter = (ix1 - ix0) * (iy1 - iy0);
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Landmark make_landmark(const BoundingBox& box, const ImageDims& dims) {
  const double ratio = area_ratio(box, dims);
  return Landmark{box, ratio, scale_index(ratio)};
}

std::vector<BoundingBox> LandmarkSet::boxes() const {
  std::vector<BoundingBox> out;
  out.reserve(landmarks.size());
  for (const auto& lm : landmarks) out.push_back(lm.box);
  return out;
}

LandmarkSet make_landmark_set(std::string image_id, const ImageDims& dims,
                              const std::vector<BoundingBox>& boxes) {
  LandmarkSet set{std::move(image_id), dims, {}};
  set.landmarks.reserve(boxes.size());
  for (const auto& b : boxes) set.landmarks.push_back(make_landmark(b, dims));
  return set;
}

int ScaleSpec::total() const {
  int n = 0;
  for (const auto& level : levels) n += level.count;
  return n;
}

namespace {

int grid_side(int count) {
  const int g = round_half_up(std::sqrt(static_cast<double>(count)));
  return g * g == count ? g : 0;
}

}  // namespace

void ScaleSpec::validate() const {
  if (levels.empty()) throw ConfigError("scale spec has no levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& level = levels[k];
    if (!(level.normalized_scale > 0.0 && level.normalized_scale <= 1.0)) {
      throw ConfigError(fmt::format("level {}: normalized scale {} outside (0, 1]", k,
                                    level.normalized_scale));
    }
    if (level.count <= 0) {
      throw ConfigError(fmt::format("level {}: count must be positive", k));
    }
    if (grid_side(level.count) == 0) {
      throw ConfigError(fmt::format(
          "level {}: count {} is not a perfect square (square grid layout)", k, level.count));
    }
    if (k > 0 && !(level.normalized_scale > levels[k - 1].normalized_scale)) {
      throw ConfigError(fmt::format("level {}: normalized scales must be strictly increasing", k));
    }
  }
}

ScaleSpec ScaleSpec::default_spec() {
  return ScaleSpec{{{0.16, 25}, {0.25, 25}, {0.36, 25}, {0.49, 25}}};
}

namespace {

std::vector<int> grid_offsets(int extent, int window, int g) {
  std::vector<int> offsets(static_cast<std::size_t>(g));
  const int slack = extent - window;
  if (g == 1) {
    offsets[0] = round_half_up(slack / 2.0);
    return offsets;
  }
  for (int i = 0; i < g; ++i) {
    offsets[static_cast<std::size_t>(i)] =
        std::min(slack, round_half_up(static_cast<double>(i) * slack / (g - 1)));
  }
  return offsets;
}

}  // namespace

LandmarkSet dense_sample(const ImageDims& dims, const ScaleSpec& spec, std::string image_id) {
  if (dims.width <= 0 || dims.height <= 0) {
    throw GeometryError(fmt::format("zero-area image {}x{}", dims.width, dims.height));
  }
  spec.validate();

  LandmarkSet set{std::move(image_id), dims, {}};
  set.landmarks.reserve(static_cast<std::size_t>(spec.total()));
  for (const auto& level : spec.levels) {
    const double side = std::sqrt(level.normalized_scale);
    const int w = std::min(dims.width, round_half_up(side * dims.width));
    const int h = std::min(dims.height, round_half_up(side * dims.height));
    if (w <= 0 || h <= 0) {
      throw ConfigError(fmt::format("scale {} rounds to an empty window on a {}x{} image",
                                    level.normalized_scale, dims.width, dims.height));
    }
    const int g = grid_side(level.count);
    const auto xs = grid_offsets(dims.width, w, g);
    const auto ys = grid_offsets(dims.height, h, g);
    for (int y : ys) {
      for (int x : xs) {
        set.landmarks.push_back(make_landmark(BoundingBox{x, y, w, h}, dims));
      }
    }
  }
  return set;
}

}  // namespace lmvpr
