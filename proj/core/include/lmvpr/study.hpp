// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lmvpr/geometry.hpp"
#include "lmvpr/manifest.hpp"

namespace lmvpr {

// One reciprocal landmark match between a query and a reference image, as
// dumped by the `match` stage.
struct MatchRecord {
  std::string query_id;
  std::string ref_id;
  std::size_t query_index = 0;  // manifest positions
  std::size_t ref_index = 0;
  std::size_t query_landmark = 0;
  std::size_t ref_landmark = 0;
  int query_scale = 1;
  int ref_scale = 1;
  double d = 0.0;
  double s = 1.0;
  double score = 0.0;
};

inline constexpr const char* kMatchDumpColumns =
    "query_id,ref_id,query_index,ref_index,query_landmark_idx,ref_landmark_idx,"
    "query_scale,ref_scale,d,s,score";

std::string format_match_record(const MatchRecord& r);
std::vector<MatchRecord> parse_match_dump(const std::string& text,
                                          const std::string& source = "<memory>");
std::vector<MatchRecord> load_match_dump(const std::filesystem::path& path);

// Manual true/false annotations keyed by
// (query_id, ref_id, query_landmark_idx, ref_landmark_idx).
using LabelKey = std::tuple<std::string, std::string, std::size_t, std::size_t>;
using LabelSet = std::map<LabelKey, bool>;

LabelSet parse_labels(const std::string& text, const std::string& source = "<memory>");
LabelSet load_labels(const std::filesystem::path& path);

enum class Channel { kGroundTruth = 0, kIrrelevant = 1 };

struct BinAccumulator {
  std::size_t matches = 0;
  std::size_t labelled = 0;
  std::size_t labelled_true = 0;
  double score_sum = 0.0;
};

// Per-scale accumulators, split into matches against ground-truth
// references and matches against irrelevant references. Matches are binned
// by the query landmark's scale index.
struct StudyRecord {
  std::array<std::array<BinAccumulator, kScaleBins>, 2> bins{};
  bool has_labels = false;

  [[nodiscard]] const BinAccumulator& bin(Channel c, int scale) const {
    return bins[static_cast<std::size_t>(c)][static_cast<std::size_t>(scale - 1)];
  }
};

StudyRecord accumulate_study(const std::vector<MatchRecord>& records, const GroundTruth& truth,
                             const std::optional<LabelSet>& labels = std::nullopt);

using ScaleSeries = std::array<std::optional<double>, kScaleBins>;

// Correct-match rate over labelled ground-truth-pair matches. Throws
// ConfigError when the record carries no labels.
ScaleSeries correct_match_rate(const StudyRecord& record);
// Share of the channel's summed match score contributed by each scale.
ScaleSeries contribution_share(const StudyRecord& record, Channel channel);
// Mean match score per scale.
ScaleSeries average_similarity(const StudyRecord& record, Channel channel);

}  // namespace lmvpr
