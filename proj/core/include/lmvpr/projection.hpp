// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lmvpr/descriptors.hpp"

namespace lmvpr {

struct ProjectionConfig {
  std::size_t target_dim = 1024;
  std::uint64_t seed = 0;
};

// Gaussian random projection y = G x / sqrt(target_dim), G with i.i.d.
// standard-normal entries.
//
// Row r of G is regenerated on demand from (seed, r): a std::mt19937_64
// seeded with splitmix64(seed + 0x9E3779B97F4A7C15 * (r + 1)) feeds a
// Box-Muller transform (both the cosine and sine variates are used, in that
// order; u1 = 1 - U53 so log never sees 0). mt19937_64 output is fixed by
// the C++ standard, so G is reproducible from (seed, source_dim) alone.
// G itself is never stored.
class GaussianProjector {
 public:
  // Throws ConfigError when target_dim is zero or exceeds source_dim.
  GaussianProjector(std::size_t source_dim, ProjectionConfig cfg);

  [[nodiscard]] std::size_t source_dim() const { return source_dim_; }
  [[nodiscard]] std::size_t target_dim() const { return cfg_.target_dim; }

  // Row r of G (unscaled), length source_dim.
  [[nodiscard]] std::vector<double> row(std::size_t r) const;

  [[nodiscard]] Descriptor project(std::span<const float> x) const;

  // Projects many vectors while generating each row of G once.
  [[nodiscard]] std::vector<std::vector<float>> project_many(
      std::span<const std::span<const float>> xs) const;

  [[nodiscard]] DescriptorBlock project(const DescriptorBlock& block) const;

 private:
  std::size_t source_dim_;
  ProjectionConfig cfg_;
};

Descriptor random_projection(const Descriptor& d, const ProjectionConfig& cfg);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lmvpr
