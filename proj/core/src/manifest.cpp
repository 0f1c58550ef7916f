// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/manifest.hpp"

#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lmvpr/error.hpp"

namespace lmvpr {

bool GroundTruth::is_correct(std::size_t query, std::size_t reference) const {
  if (query >= reference_for_query.size() || !reference_for_query[query]) return false;
  const auto truth = static_cast<long long>(*reference_for_query[query]);
  return std::llabs(static_cast<long long>(reference) - truth) <= frame_tolerance;
}

std::size_t GroundTruth::queries_with_truth() const {
  std::size_t n = 0;
  for (const auto& r : reference_for_query) n += r.has_value() ? 1 : 0;
  return n;
}

void DatasetManifest::validate() const {
  if (ground_truth.reference_for_query.size() != queries.size()) {
    throw ConfigError(fmt::format("ground truth covers {} queries, manifest has {}",
                                  ground_truth.reference_for_query.size(), queries.size()));
  }
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& r = ground_truth.reference_for_query[q];
    if (r && *r >= references.size()) {
      throw ConfigError(fmt::format("ground truth for query {} names reference {} of {}", q, *r,
                                    references.size()));
    }
  }
  if (ground_truth.frame_tolerance < 0) throw ConfigError("frame_tolerance must be >= 0");
  for (const auto* list : {&queries, &references}) {
    std::set<std::string> ids;
    for (const auto& e : *list) {
      if (e.id.empty()) throw ConfigError("manifest image with empty id");
      if (!ids.insert(e.id).second) throw ConfigError(fmt::format("duplicate image id '{}'", e.id));
    }
  }
}

namespace {

using nlohmann::json;

std::vector<ImageEntry> parse_entries(const json& arr, const char* key,
                                      const std::filesystem::path& base) {
  if (!arr.is_array()) throw ConfigError(fmt::format("manifest '{}' must be an array", key));
  std::vector<ImageEntry> out;
  for (const auto& item : arr) {
    if (!item.is_object()) throw ConfigError(fmt::format("manifest '{}' entries must be objects", key));
    for (const auto& [k, v] : item.items()) {
      if (k != "id" && k != "path") {
        throw ConfigError(fmt::format("manifest '{}' entry: unknown key '{}'", key, k));
      }
    }
    if (!item.contains("id") || !item.contains("path") || !item["id"].is_string() ||
        !item["path"].is_string()) {
      throw ConfigError(fmt::format("manifest '{}' entry needs string 'id' and 'path'", key));
    }
    std::filesystem::path p = item["path"].get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    out.push_back({item["id"].get<std::string>(), p});
  }
  return out;
}

std::size_t as_index(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(fmt::format("{} must be a non-negative integer", what));
  }
  return v.get<std::size_t>();
}

}  // namespace

DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("manifest: {}", e.what()));
  }
  if (!doc.is_object()) throw ConfigError("manifest must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (k != "queries" && k != "references" && k != "ground_truth" && k != "frame_tolerance") {
      throw ConfigError(fmt::format("manifest: unknown key '{}'", k));
    }
  }
  if (!doc.contains("queries") || !doc.contains("references")) {
    throw ConfigError("manifest needs 'queries' and 'references'");
  }
  DatasetManifest m;
  m.queries = parse_entries(doc["queries"], "queries", base_dir);
  m.references = parse_entries(doc["references"], "references", base_dir);
  m.ground_truth.reference_for_query.assign(m.queries.size(), std::nullopt);
  if (doc.contains("frame_tolerance")) {
    m.ground_truth.frame_tolerance =
        static_cast<int>(as_index(doc["frame_tolerance"], "frame_tolerance"));
  }
  if (doc.contains("ground_truth")) {
    const auto& gt = doc["ground_truth"];
    if (gt.is_object()) {
      for (const auto& [k, v] : gt.items()) {
        std::size_t q = 0;
        try {
          std::size_t used = 0;
          q = std::stoul(k, &used);
          if (used != k.size()) throw std::invalid_argument(k);
        } catch (const std::exception&) {
          throw ConfigError(fmt::format("ground_truth key '{}' is not a query index", k));
        }
        if (q >= m.queries.size()) {
          throw ConfigError(fmt::format("ground_truth names query {} of {}", q, m.queries.size()));
        }
        m.ground_truth.reference_for_query[q] = as_index(v, "ground_truth value");
      }
    } else if (gt.is_array()) {
      if (gt.size() != m.queries.size()) {
        throw ConfigError("ground_truth array length must equal the number of queries");
      }
      for (std::size_t q = 0; q < gt.size(); ++q) {
        if (!gt[q].is_null()) m.ground_truth.reference_for_query[q] = as_index(gt[q], "ground_truth entry");
      }
    } else {
      throw ConfigError("ground_truth must be an object or an array");
    }
  }
  m.validate();
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open manifest {}", path.string()));
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_manifest(text, path.parent_path());
}

}  // namespace lmvpr
