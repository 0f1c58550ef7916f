// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <vector>

#include "lmvpr/descriptors.hpp"
#include "lmvpr/geometry.hpp"

namespace lmvpr {

struct Correspondence {
  std::size_t query_idx = 0;
  std::size_t ref_idx = 0;
  double d = 0.0;  // cosine distance
  bool operator==(const Correspondence&) const = default;
};

struct MatchPair {
  std::size_t query_idx = 0;
  std::size_t ref_idx = 0;
  double d = 0.0;      // cosine distance
  double s = 1.0;      // shape similarity
  double score = 1.0;  // contribution to the image similarity, 1 - d*s before rescoring
  bool operator==(const MatchPair&) const = default;
};

enum class ShapeExponentSign {
  kNegative,          // exp(-x): decays with shape mismatch
  kPositiveAsPrinted  // exp(+x)
};

enum class BoxSide { kQuery, kReference };

struct SoftNmsConfig {
  double iou_threshold = 0.3;
  double sigma = 0.5;
  BoxSide side = BoxSide::kQuery;

  void validate() const;
};

struct MatchConfig {
  ShapeExponentSign shape_exponent_sign = ShapeExponentSign::kNegative;
  std::optional<SoftNmsConfig> soft_nms;
};

// Full query x reference cosine-distance matrix, row-major.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

DistanceMatrix distance_matrix(const DescriptorBlock& a, const DescriptorBlock& b);

// Mutual nearest neighbours under cosine distance. Ties go to the lowest
// index in both directions. Result is sorted by query index.
std::vector<Correspondence> reciprocal_matches(const DistanceMatrix& dist);
std::vector<Correspondence> reciprocal_matches(const DescriptorBlock& a, const DescriptorBlock& b);

double shape_similarity(const BoundingBox& bi, const BoundingBox& bj,
                        ShapeExponentSign sign = ShapeExponentSign::kNegative);

std::vector<MatchPair> score_matches(const std::vector<Correspondence>& matches,
                                     const LandmarkSet& query, const LandmarkSet& reference,
                                     ShapeExponentSign sign);

// Sum of match scores over sqrt(n_a * n_b). n_a and n_b count every landmark
// of each image, matched or not.
double image_similarity(const std::vector<MatchPair>& matches, std::size_t n_a, std::size_t n_b);

// Gaussian soft suppression: repeatedly take the highest-scoring unprocessed
// match and decay every other unprocessed match whose box overlaps it by
// more than the threshold, by exp(-IoU^2 / sigma). `boxes` is the landmark
// set of the side named in cfg.side.
std::vector<MatchPair> soft_nms_rescore(std::vector<MatchPair> matches, const LandmarkSet& boxes,
                                        const SoftNmsConfig& cfg);

struct PairComparison {
  std::vector<MatchPair> matches;
  double similarity = 0.0;
};

// The whole per-pair pipeline: match, weight by shape, optionally rescore,
// aggregate.
PairComparison compare_images(const DescriptorBlock& query, const DescriptorBlock& reference,
                              const MatchConfig& cfg);

}  // namespace lmvpr
