// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lmvpr/geometry.hpp"

namespace lmvpr {

struct CountGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> cells;  // row-major

  [[nodiscard]] std::uint32_t at(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * width + x];
  }
  [[nodiscard]] std::uint32_t min() const;
  [[nodiscard]] std::uint32_t max() const;
  [[nodiscard]] std::uint64_t total() const;
};

// Number of landmarks covering each pixel.
CountGrid coverage_heatmap(const LandmarkSet& set);

// Pixelwise sum of several heatmaps of equal size.
CountGrid accumulate(const std::vector<CountGrid>& grids);

// Block maximum over factor x factor cells (edge blocks may be smaller).
CountGrid downsample_max(const CountGrid& grid, int factor);

// Plain PGM (P2). `comment` goes on the line after the magic.
std::string format_pgm_p2(const CountGrid& grid, const std::string& comment = {});
std::string format_grid_csv(const CountGrid& grid, const std::string& header = {});

}  // namespace lmvpr
