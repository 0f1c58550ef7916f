// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

void SoftNmsConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError(fmt::format("soft-NMS sigma {} must be positive", sigma));
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError(fmt::format("soft-NMS iou_threshold {} outside (0, 1]", iou_threshold));
  }
}

namespace {

std::vector<double> row_norms(const DescriptorBlock& block) {
  std::vector<double> norms(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    double sq = 0.0;
    for (float v : block.row(i)) sq += static_cast<double>(v) * v;
    norms[i] = std::sqrt(sq);
  }
  return norms;
}

}  // namespace

DistanceMatrix distance_matrix(const DescriptorBlock& a, const DescriptorBlock& b) {
  if (a.dim() != b.dim()) {
    throw DataError(fmt::format("cannot match '{}' (dim {}) against '{}' (dim {})", a.image_id(),
                                a.dim(), b.image_id(), b.dim()));
  }
  const auto na = row_norms(a);
  const auto nb = row_norms(b);
  DistanceMatrix dist{a.size(), b.size(), std::vector<double>(a.size() * b.size())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ra = a.row(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      double& out = dist.values[i * dist.cols + j];
      if (na[i] <= 0.0 || nb[j] <= 0.0) {
        out = 1.0;
        continue;
      }
      const auto rb = b.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < ra.size(); ++k) dot += static_cast<double>(ra[k]) * rb[k];
      out = 1.0 - dot / (na[i] * nb[j]);
    }
  }
  return dist;
}

std::vector<Correspondence> reciprocal_matches(const DistanceMatrix& dist) {
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best_ref(dist.rows, kNone);
  std::vector<std::size_t> best_query(dist.cols, kNone);
  for (std::size_t i = 0; i < dist.rows; ++i) {
    for (std::size_t j = 0; j < dist.cols; ++j) {
      const double v = dist.at(i, j);
      if (best_ref[i] == kNone || v < dist.at(i, best_ref[i])) best_ref[i] = j;
      if (best_query[j] == kNone || v < dist.at(best_query[j], j)) best_query[j] = i;
    }
  }
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < dist.rows; ++i) {
    const std::size_t j = best_ref[i];
    if (j != kNone && best_query[j] == i) out.push_back({i, j, dist.at(i, j)});
  }
  return out;
}

std::vector<Correspondence> reciprocal_matches(const DescriptorBlock& a, const DescriptorBlock& b) {
  return reciprocal_matches(distance_matrix(a, b));
}

double shape_similarity(const BoundingBox& bi, const BoundingBox& bj, ShapeExponentSign sign) {
  const double dw = std::abs(bi.w - bj.w) / static_cast<double>(std::max(bi.w, bj.w));
  const double dh = std::abs(bi.h - bj.h) / static_cast<double>(std::max(bi.h, bj.h));
  const double x = 0.5 * (dw + dh);
  return std::exp(sign == ShapeExponentSign::kNegative ? -x : x);
}

std::vector<MatchPair> score_matches(const std::vector<Correspondence>& matches,
                                     const LandmarkSet& query, const LandmarkSet& reference,
                                     ShapeExponentSign sign) {
  std::vector<MatchPair> out;
  out.reserve(matches.size());
  for (const auto& m : matches) {
    if (m.query_idx >= query.size() || m.ref_idx >= reference.size()) {
      throw DataError(fmt::format("match ({}, {}) outside landmark sets of size {} and {}",
                                  m.query_idx, m.ref_idx, query.size(), reference.size()));
    }
    const double s = shape_similarity(query.landmarks[m.query_idx].box,
                                      reference.landmarks[m.ref_idx].box, sign);
    out.push_back({m.query_idx, m.ref_idx, m.d, s, 1.0 - m.d * s});
  }
  return out;
}

double image_similarity(const std::vector<MatchPair>& matches, std::size_t n_a, std::size_t n_b) {
  if (n_a == 0 || n_b == 0) {
    throw DataError(fmt::format("image similarity needs landmarks on both sides (got {} and {})",
                                n_a, n_b));
  }
  double sum = 0.0;
  for (const auto& m : matches) sum += m.score;
  return sum / std::sqrt(static_cast<double>(n_a) * static_cast<double>(n_b));
}

std::vector<MatchPair> soft_nms_rescore(std::vector<MatchPair> matches, const LandmarkSet& boxes,
                                        const SoftNmsConfig& cfg) {
  cfg.validate();
  const bool query_side = cfg.side == BoxSide::kQuery;
  auto box_of = [&](const MatchPair& m) -> const BoundingBox& {
    const std::size_t idx = query_side ? m.query_idx : m.ref_idx;
    if (idx >= boxes.size()) {
      throw DataError(fmt::format("match landmark {} outside a set of {}", idx, boxes.size()));
    }
    return boxes.landmarks[idx].box;
  };

  std::vector<bool> done(matches.size(), false);
  for (std::size_t round = 0; round < matches.size(); ++round) {
    std::size_t top = matches.size();
    for (std::size_t i = 0; i < matches.size(); ++i) {
      if (!done[i] && (top == matches.size() || matches[i].score > matches[top].score)) top = i;
    }
    done[top] = true;
    const BoundingBox& top_box = box_of(matches[top]);
    for (std::size_t i = 0; i < matches.size(); ++i) {
      if (done[i]) continue;
      const double overlap = iou(box_of(matches[i]), top_box);
      if (overlap > cfg.iou_threshold) {
        matches[i].score *= std::exp(-(overlap * overlap) / cfg.sigma);
      }
    }
  }
  return matches;
}

PairComparison compare_images(const DescriptorBlock& query, const DescriptorBlock& reference,
                              const MatchConfig& cfg) {
  PairComparison result;
  auto pairs = score_matches(reciprocal_matches(query, reference), query.landmarks(),
                             reference.landmarks(), cfg.shape_exponent_sign);
  if (cfg.soft_nms) {
    const auto& side = cfg.soft_nms->side == BoxSide::kQuery ? query.landmarks()
                                                             : reference.landmarks();
    pairs = soft_nms_rescore(std::move(pairs), side, *cfg.soft_nms);
  }
  result.similarity = image_similarity(pairs, query.size(), reference.size());
  result.matches = std::move(pairs);
  return result;
}

}  // namespace lmvpr
