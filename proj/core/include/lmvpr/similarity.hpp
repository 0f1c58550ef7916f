// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lmvpr/descriptors.hpp"
#include "lmvpr/manifest.hpp"
#include "lmvpr/matching.hpp"

namespace lmvpr {

struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major; invalid rows/columns hold 0
  std::vector<bool> row_valid;
  std::vector<bool> col_valid;

  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c, 0.0), row_valid(r, true), col_valid(c, true) {}

  [[nodiscard]] double at(std::size_t q, std::size_t r) const { return values[q * cols + r]; }
  double& at(std::size_t q, std::size_t r) { return values[q * cols + r]; }
};

// Per-pair callback for callers that want the matches (study dumps).
using MatchSink = std::function<void(std::size_t query, std::size_t reference,
                                     const PairComparison& result)>;

// All-pairs image similarity. A missing block marks its row or column
// invalid. Cells are filled by index, so the matrix is identical for any
// thread count. The sink, when set, is called in (query, reference) order
// after all cells are computed.
SimilarityMatrix build_similarity_matrix(const std::vector<std::optional<DescriptorBlock>>& queries,
                                         const std::vector<std::optional<DescriptorBlock>>& references,
                                         const MatchConfig& cfg, unsigned threads = 1,
                                         const MatchSink& sink = {});

struct PRPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  bool precision_defined = false;  // false when nothing was accepted (precision reported as 1)
};

struct PRCurve {
  std::vector<PRPoint> points;
};

// The n uniform points 0, 1/(n-1), ..., 1.
std::vector<double> uniform_thresholds(std::size_t n = 101);

struct RatioTest {
  std::size_t best_ref = 0;
  double best = 0.0;
  double second = 0.0;
  double ratio = 1.0;  // second / best clamped to [0, 1]; 1 when best <= 0
};

// Throws DataError for fewer than two columns.
RatioTest ratio_test(const SimilarityMatrix& m, std::size_t query);

// Ratio-test precision-recall sweep. A query's best reference is accepted at
// threshold t when its second-best/best similarity ratio is at most t, and
// counts as a true positive when within the ground-truth frame tolerance.
// Recall is over queries that have ground truth; accepted queries without
// ground truth are false positives. Throws DataError for fewer than two
// columns and ConfigError for a threshold grid that is not strictly
// increasing inside [0, 1].
PRCurve pr_curve(const SimilarityMatrix& m, const GroundTruth& truth,
                 const std::vector<double>& thresholds);

// Highest recall among points with defined precision equal to 1; 0 if none.
double recall_at_full_precision(const PRCurve& curve);

}  // namespace lmvpr
