// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lmvpr {

struct ImageDims {
  int width = 0;
  int height = 0;

  [[nodiscard]] std::int64_t area() const {
    return static_cast<std::int64_t>(width) * height;
  }
  bool operator==(const ImageDims&) const = default;
};

// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  [[nodiscard]] std::int64_t area() const {
    return static_cast<std::int64_t>(w) * h;
  }
  [[nodiscard]] bool valid() const { return x >= 0 && y >= 0 && w > 0 && h > 0; }
  [[nodiscard]] bool fits(const ImageDims& dims) const {
    return valid() && static_cast<std::int64_t>(x) + w <= dims.width &&
           static_cast<std::int64_t>(y) + h <= dims.height;
  }
  bool operator==(const BoundingBox&) const = default;
};

std::string to_string(const BoundingBox& box);

constexpr int kScaleBins = 9;

// Lower edges of the nine normalized-scale bins. Bin k covers
// [kScaleBinLower[k-1], kScaleBinLower[k]); the last bin is [0.72, 1].
inline constexpr std::array<double, kScaleBins> kScaleBinLower{
    0.0, 0.02, 0.05, 0.09, 0.14, 0.23, 0.34, 0.5, 0.72};

// Landmark area over full image area. Throws GeometryError for degenerate
// input or a box outside the image.
double area_ratio(const BoundingBox& box, const ImageDims& dims);

// Scale bin 1..9 for a normalized scale. Throws DomainError outside (0, 1].
int scale_index(double ratio);

double iou(const BoundingBox& a, const BoundingBox& b);

struct Landmark {
  BoundingBox box;
  double normalized_scale = 0.0;
  int scale_index = 0;
  bool operator==(const Landmark&) const = default;
};

// Builds a landmark from real geometry; the scale is never taken on trust.
Landmark make_landmark(const BoundingBox& box, const ImageDims& dims);

struct LandmarkSet {
  std::string image_id;
  ImageDims dims;
  std::vector<Landmark> landmarks;

  [[nodiscard]] std::size_t size() const { return landmarks.size(); }
  [[nodiscard]] bool empty() const { return landmarks.empty(); }
  [[nodiscard]] std::vector<BoundingBox> boxes() const;
  bool operator==(const LandmarkSet&) const = default;
};

LandmarkSet make_landmark_set(std::string image_id, const ImageDims& dims,
                              const std::vector<BoundingBox>& boxes);

struct ScaleLevel {
  double normalized_scale = 0.0;
  int count = 0;
  bool operator==(const ScaleLevel&) const = default;
};

struct ScaleSpec {
  std::vector<ScaleLevel> levels;

  [[nodiscard]] int total() const;
  // Throws ConfigError when a count is not a perfect square, scales are not
  // strictly increasing, or a scale lies outside (0, 1].
  void validate() const;

  // 0.16, 0.25, 0.36, 0.49 with 25 windows each.
  static ScaleSpec default_spec();
  bool operator==(const ScaleSpec&) const = default;
};

// Multi-scale dense sampler. Each level contributes a g x g grid of windows
// that keep the image aspect ratio, with the first window flush with the
// top-left corner and the last flush with the bottom-right. Output order is
// level-major, then row-major.
LandmarkSet dense_sample(const ImageDims& dims, const ScaleSpec& spec,
                         std::string image_id = {});

// Round half away from zero; all geometry here is non-negative so this is
// half-up.
int round_half_up(double v);

}  // namespace lmvpr
