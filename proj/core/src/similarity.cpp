// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/similarity.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lmvpr/error.hpp"
#include "lmvpr/parallel.hpp"

namespace lmvpr {

SimilarityMatrix build_similarity_matrix(const std::vector<std::optional<DescriptorBlock>>& queries,
                                         const std::vector<std::optional<DescriptorBlock>>& references,
                                         const MatchConfig& cfg, unsigned threads,
                                         const MatchSink& sink) {
  SimilarityMatrix m(queries.size(), references.size());
  for (std::size_t q = 0; q < queries.size(); ++q) m.row_valid[q] = queries[q].has_value();
  for (std::size_t r = 0; r < references.size(); ++r) m.col_valid[r] = references[r].has_value();

  std::vector<std::vector<PairComparison>> kept;
  if (sink) kept.resize(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t q) {
    if (!queries[q]) return;
    if (sink) kept[q].resize(references.size());
    for (std::size_t r = 0; r < references.size(); ++r) {
      if (!references[r]) continue;
      auto result = compare_images(*queries[q], *references[r], cfg);
      m.at(q, r) = result.similarity;
      if (sink) kept[q][r] = std::move(result);
    }
  });
  if (sink) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (!queries[q]) continue;
      for (std::size_t r = 0; r < references.size(); ++r) {
        if (references[r]) sink(q, r, kept[q][r]);
      }
    }
  }
  return m;
}

std::vector<double> uniform_thresholds(std::size_t n) {
  if (n < 2) throw ConfigError("threshold grid needs at least two points");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

RatioTest ratio_test(const SimilarityMatrix& m, std::size_t query) {
  if (m.cols < 2) {
    throw DataError("ratio test needs at least two reference images");
  }
  RatioTest rt;
  rt.best_ref = 0;
  rt.best = m.at(query, 0);
  for (std::size_t r = 1; r < m.cols; ++r) {
    if (m.at(query, r) > rt.best) {
      rt.best = m.at(query, r);
      rt.best_ref = r;
    }
  }
  bool have_second = false;
  for (std::size_t r = 0; r < m.cols; ++r) {
    if (r == rt.best_ref) continue;
    if (!have_second || m.at(query, r) > rt.second) {
      rt.second = m.at(query, r);
      have_second = true;
    }
  }
  rt.ratio = rt.best <= 0.0 ? 1.0 : std::clamp(rt.second / rt.best, 0.0, 1.0);
  return rt;
}

PRCurve pr_curve(const SimilarityMatrix& m, const GroundTruth& truth,
                 const std::vector<double>& thresholds) {
  if (m.cols < 2) throw DataError("precision-recall needs at least two reference images");
  if (truth.reference_for_query.size() != m.rows) {
    throw DataError(fmt::format("ground truth for {} queries, matrix has {} rows",
                                truth.reference_for_query.size(), m.rows));
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0) ||
        (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
      throw ConfigError("threshold grid must be strictly increasing within [0, 1]");
    }
  }

  struct QueryOutcome {
    bool usable;
    double ratio;
    bool correct;
  };
  std::vector<QueryOutcome> outcomes;
  outcomes.reserve(m.rows);
  for (std::size_t q = 0; q < m.rows; ++q) {
    if (!m.row_valid.empty() && !m.row_valid[q]) {
      outcomes.push_back({false, 1.0, false});
      continue;
    }
    const auto rt = ratio_test(m, q);
    outcomes.push_back({true, rt.ratio, truth.is_correct(q, rt.best_ref)});
  }

  const std::size_t positives = truth.queries_with_truth();
  PRCurve curve;
  curve.points.reserve(thresholds.size());
  for (double t : thresholds) {
    PRPoint p;
    p.threshold = t;
    for (const auto& o : outcomes) {
      if (!o.usable || o.ratio > t) continue;
      (o.correct ? p.true_positives : p.false_positives)++;
    }
    const std::size_t accepted = p.true_positives + p.false_positives;
    p.precision_defined = accepted > 0;
    p.precision = accepted > 0 ? static_cast<double>(p.true_positives) / accepted : 1.0;
    p.recall = positives > 0 ? static_cast<double>(p.true_positives) / positives : 0.0;
    curve.points.push_back(p);
  }
  return curve;
}

double recall_at_full_precision(const PRCurve& curve) {
  double best = 0.0;
  for (const auto& p : curve.points) {
    if (p.precision_defined && p.false_positives == 0) best = std::max(best, p.recall);
  }
  return best;
}

}  // namespace lmvpr
