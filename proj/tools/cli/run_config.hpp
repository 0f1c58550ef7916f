// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lmvpr/pipeline.hpp"

namespace lmvpr::cli {

struct EvaluationConfig {
  std::vector<double> thresholds = uniform_thresholds(101);
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> labels;  // match label CSV for the correct-match rate
  int heatmap_downsample = 1;
};

struct RunConfig {
  LandmarkSource landmarks = DenseSource{};
  DescriptorSource descriptors = BuiltinDescriptors{};
  std::optional<std::size_t> projection_dim;
  MatchConfig match;
  EvaluationConfig evaluation;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: all hardware threads
};

// Schema (every object rejects unknown keys; every section is optional):
//
//   {
//     "landmarks": {"dense": {"levels": [{"scale": 0.16, "count": 25}, ...]}}
//               | {"proposals": {"dir": "...", "scheme": "top|scheme1|scheme2|overlap",
//                                "limit": 100, "min_scale_index": 4,
//                                "scale_priority": [5, 6, 7, 8, 9, 4], "iou_threshold": 0.4}},
//     "descriptors": {"builtin": {}} | {"files": {"dir": "..."}},
//     "projection": {"target_dim": 1024},
//     "match": {"shape_sign": "negative|positive",
//               "soft_nms": {"iou_threshold": 0.3, "sigma": 0.5, "side": "query|reference"}},
//     "evaluation": {"thresholds": 101 | [0.0, ..., 1.0], "out": "...", "labels": "...",
//                    "heatmap_downsample": 1},
//     "seed": 0,
//     "threads": 0
//   }
//
// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON of the effective config (paths as given after resolution).
std::string canonical_json(const RunConfig& cfg);

// FNV-1a 64 of canonical_json, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

PipelineConfig to_pipeline(const RunConfig& cfg);

}  // namespace lmvpr::cli
