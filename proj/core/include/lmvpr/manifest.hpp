// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lmvpr {

struct ImageEntry {
  std::string id;
  std::filesystem::path path;
};

// Query -> reference association. A query's best reference counts as
// correct when its index is within frame_tolerance of the ground truth.
struct GroundTruth {
  std::vector<std::optional<std::size_t>> reference_for_query;
  int frame_tolerance = 1;

  [[nodiscard]] bool is_correct(std::size_t query, std::size_t reference) const;
  [[nodiscard]] std::size_t queries_with_truth() const;
};

struct DatasetManifest {
  std::vector<ImageEntry> queries;
  std::vector<ImageEntry> references;
  GroundTruth ground_truth;

  void validate() const;
};

// JSON with keys "queries", "references", "ground_truth", "frame_tolerance".
// Image entries are {"id": ..., "path": ...}; relative paths resolve against
// `base_dir`. "ground_truth" is either an object {"<query index>": ref index}
// or an array holding a reference index or null per query. Unknown keys are
// rejected. Throws ParseError / ConfigError.
DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace lmvpr
