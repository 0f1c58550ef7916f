// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lmvpr/geometry.hpp"
#include "lmvpr/image.hpp"

namespace lmvpr {

struct Descriptor {
  std::vector<float> values;

  [[nodiscard]] std::size_t dim() const { return values.size(); }
  bool operator==(const Descriptor&) const = default;
};

// Feature matrix for one image: row i describes landmark i.
class DescriptorBlock {
 public:
  DescriptorBlock() = default;
  DescriptorBlock(LandmarkSet landmarks, std::size_t dim, std::vector<float> data);

  [[nodiscard]] const std::string& image_id() const { return landmarks_.image_id; }
  [[nodiscard]] const LandmarkSet& landmarks() const { return landmarks_; }
  [[nodiscard]] std::size_t size() const { return landmarks_.size(); }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool empty() const { return landmarks_.empty(); }

  [[nodiscard]] std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  [[nodiscard]] const std::vector<float>& data() const { return data_; }

  bool operator==(const DescriptorBlock&) const = default;

 private:
  LandmarkSet landmarks_;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

namespace patch {
inline constexpr int kGrid = 32;         // resampled patch side
inline constexpr int kCells = 4;         // spatial cells per side
inline constexpr int kOrientations = 8;  // gradient orientation bins
inline constexpr int kIntensityBins = 16;
inline constexpr std::size_t kGradientDim = kCells * kCells * kOrientations;
inline constexpr std::size_t kDim = kGradientDim + kIntensityBins;  // 144
}  // namespace patch

// Built-in appearance descriptor: the box is resampled to a 32x32 grid by
// area averaging, then described by a 4x4x8 gradient-orientation histogram
// followed by a 16-bin intensity histogram. Each part is L2-normalized,
// then the concatenation is. A flat patch has an all-zero gradient part.
Descriptor describe_patch(const GrayImage& image, const BoundingBox& box);

DescriptorBlock describe_landmarks(const GrayImage& image, const LandmarkSet& landmarks);

struct CosineDistance {
  double value = 1.0;
  bool degenerate = false;  // a zero vector was involved; value is 1
};

// 1 - a.b / (|a| |b|). Throws DataError on dimension mismatch.
CosineDistance cosine_distance(std::span<const float> a, std::span<const float> b);
inline CosineDistance cosine_distance(const Descriptor& a, const Descriptor& b) {
  return cosine_distance(std::span<const float>(a.values), std::span<const float>(b.values));
}

}  // namespace lmvpr
