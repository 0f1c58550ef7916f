// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <vector>

#include "lmvpr/geometry.hpp"

namespace lmvpr {

// Single-channel image with intensities in [0, 255], row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, float fill = 0.0f);
  GrayImage(int width, int height, std::vector<float> pixels);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] ImageDims dims() const { return {width_, height_}; }
  [[nodiscard]] bool empty() const { return pixels_.empty(); }

  [[nodiscard]] float at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  float& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  [[nodiscard]] const std::vector<float>& pixels() const { return pixels_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
};

// Reads PGM/PPM (P2, P3, P5, P6) natively; other formats go through OpenCV
// when the library was built with it. Colour is converted with BT.601 luma
// weights. Throws DataError when the file cannot be read or decoded.
GrayImage load_image(const std::filesystem::path& path);

// Reads only the dimensions. Cheap for PNM files.
ImageDims probe_image_dims(const std::filesystem::path& path);

// Binary PGM (P5), intensities rounded and clamped to 0..255.
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace lmvpr
