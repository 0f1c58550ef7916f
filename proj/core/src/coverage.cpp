// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/coverage.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

std::uint32_t CountGrid::min() const {
  return cells.empty() ? 0 : *std::min_element(cells.begin(), cells.end());
}
std::uint32_t CountGrid::max() const {
  return cells.empty() ? 0 : *std::max_element(cells.begin(), cells.end());
}
std::uint64_t CountGrid::total() const {
  return std::accumulate(cells.begin(), cells.end(), std::uint64_t{0});
}

CountGrid coverage_heatmap(const LandmarkSet& set) {
  const int w = set.dims.width;
  const int h = set.dims.height;
  if (w <= 0 || h <= 0) throw GeometryError("coverage heatmap of a zero-area image");
  // 2-D difference array, then prefix sums.
  std::vector<std::int64_t> diff(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto d = [&](int x, int y) -> std::int64_t& { return diff[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (const auto& lm : set.landmarks) {
    const auto& b = lm.box;
    if (!b.fits(set.dims)) {
      throw GeometryError(fmt::format("box {} outside {}x{}", to_string(b), w, h));
    }
    d(b.x, b.y) += 1;
    d(b.x + b.w, b.y) -= 1;
    d(b.x, b.y + b.h) -= 1;
    d(b.x + b.w, b.y + b.h) += 1;
  }
  CountGrid grid{w, h, std::vector<std::uint32_t>(static_cast<std::size_t>(w) * h)};
  std::vector<std::int64_t> row(static_cast<std::size_t>(w), 0);
  for (int y = 0; y < h; ++y) {
    std::int64_t run = 0;
    for (int x = 0; x < w; ++x) {
      run += d(x, y);
      row[static_cast<std::size_t>(x)] += run;
      grid.cells[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint32_t>(row[static_cast<std::size_t>(x)]);
    }
  }
  return grid;
}

CountGrid accumulate(const std::vector<CountGrid>& grids) {
  if (grids.empty()) return {};
  CountGrid out = grids.front();
  for (std::size_t i = 1; i < grids.size(); ++i) {
    if (grids[i].width != out.width || grids[i].height != out.height) {
      throw GeometryError("cannot accumulate heatmaps of different sizes");
    }
    for (std::size_t k = 0; k < out.cells.size(); ++k) out.cells[k] += grids[i].cells[k];
  }
  return out;
}

CountGrid downsample_max(const CountGrid& grid, int factor) {
  if (factor < 1) throw ConfigError("downsample factor must be >= 1");
  const int w = (grid.width + factor - 1) / factor;
  const int h = (grid.height + factor - 1) / factor;
  CountGrid out{w, h, std::vector<std::uint32_t>(static_cast<std::size_t>(w) * h, 0)};
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      auto& cell = out.cells[static_cast<std::size_t>(y / factor) * w + x / factor];
      cell = std::max(cell, grid.at(x, y));
    }
  }
  return out;
}

std::string format_pgm_p2(const CountGrid& grid, const std::string& comment) {
  std::string out = "P2\n";
  if (!comment.empty()) out += "# " + comment + "\n";
  out += fmt::format("{} {}\n{}\n", grid.width, grid.height, std::max<std::uint32_t>(1, grid.max()));
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (x) out += ' ';
      out += fmt::format("{}", grid.at(x, y));
    }
    out += '\n';
  }
  return out;
}

std::string format_grid_csv(const CountGrid& grid, const std::string& header) {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (x) out += ',';
      out += fmt::format("{}", grid.at(x, y));
    }
    out += '\n';
  }
  return out;
}

}  // namespace lmvpr
