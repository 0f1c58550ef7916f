// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/projection.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

GaussianProjector::GaussianProjector(std::size_t source_dim, ProjectionConfig cfg)
    : source_dim_(source_dim), cfg_(cfg) {
  if (cfg_.target_dim == 0) throw ConfigError("projection target_dim must be positive");
  if (cfg_.target_dim > source_dim_) {
    throw ConfigError(fmt::format("projection target_dim {} exceeds source dim {}",
                                  cfg_.target_dim, source_dim_));
  }
}

std::vector<double> GaussianProjector::row(std::size_t r) const {
  std::mt19937_64 engine(splitmix64(cfg_.seed + 0x9E3779B97F4A7C15ULL * (r + 1)));
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  std::vector<double> out(source_dim_);
  for (std::size_t c = 0; c < source_dim_; c += 2) {
    const double u1 = 1.0 - static_cast<double>(engine() >> 11) * kInv53;
    const double u2 = static_cast<double>(engine() >> 11) * kInv53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[c] = radius * std::cos(theta);
    if (c + 1 < source_dim_) out[c + 1] = radius * std::sin(theta);
  }
  return out;
}

std::vector<std::vector<float>> GaussianProjector::project_many(
    std::span<const std::span<const float>> xs) const {
  for (const auto& x : xs) {
    if (x.size() != source_dim_) {
      throw DataError(fmt::format("projection expects dim {}, got {}", source_dim_, x.size()));
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.target_dim));
  std::vector<std::vector<float>> out(xs.size(), std::vector<float>(cfg_.target_dim));
  for (std::size_t r = 0; r < cfg_.target_dim; ++r) {
    const auto g = row(r);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < source_dim_; ++c) acc += g[c] * xs[k][c];
      out[k][r] = static_cast<float>(acc * scale);
    }
  }
  return out;
}

Descriptor GaussianProjector::project(std::span<const float> x) const {
  const std::span<const float> one[] = {x};
  auto out = project_many(one);
  return Descriptor{std::move(out.front())};
}

DescriptorBlock GaussianProjector::project(const DescriptorBlock& block) const {
  if (block.dim() != source_dim_ && !block.empty()) {
    throw DataError(fmt::format("block '{}' has dim {}, projector expects {}", block.image_id(),
                                block.dim(), source_dim_));
  }
  std::vector<std::span<const float>> rows;
  rows.reserve(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) rows.push_back(block.row(i));
  const auto projected = project_many(rows);
  std::vector<float> data;
  data.reserve(block.size() * cfg_.target_dim);
  for (const auto& p : projected) data.insert(data.end(), p.begin(), p.end());
  return DescriptorBlock(block.landmarks(), cfg_.target_dim, std::move(data));
}

Descriptor random_projection(const Descriptor& d, const ProjectionConfig& cfg) {
  return GaussianProjector(d.dim(), cfg).project(std::span<const float>(d.values));
}

}  // namespace lmvpr
