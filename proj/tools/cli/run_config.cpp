// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cli/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <iterator>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lmvpr/error.hpp"

namespace lmvpr::cli {

namespace {

using json = nlohmann::json;

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("config: '{}' must be an object", where));
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  expect_object(j, where);
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(fmt::format("config: unknown key '{}' in '{}'", k, where));
  }
}

// Exactly one key from `choices`; returns it.
std::string one_of(const json& j, std::initializer_list<const char*> choices, const std::string& where) {
  check_keys(j, choices, where);
  if (j.size() != 1) {
    throw ConfigError(fmt::format("config: '{}' needs exactly one of its variants", where));
  }
  return j.begin().key();
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(fmt::format("config: '{}' must be a number", what));
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(fmt::format("config: '{}' must be an integer", what));
  return j.get<std::int64_t>();
}

std::string string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(fmt::format("config: '{}' must be a string", what));
  return j.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

ScaleSpec parse_dense(const json& j) {
  check_keys(j, {"levels"}, "landmarks.dense");
  ScaleSpec spec = ScaleSpec::default_spec();
  if (j.contains("levels")) {
    const auto& levels = j["levels"];
    if (!levels.is_array()) throw ConfigError("config: 'landmarks.dense.levels' must be an array");
    spec.levels.clear();
    for (const auto& l : levels) {
      check_keys(l, {"scale", "count"}, "landmarks.dense.levels[]");
      if (!l.contains("scale") || !l.contains("count")) {
        throw ConfigError("config: each level needs 'scale' and 'count'");
      }
      const auto count = integer(l["count"], "count");
      if (count <= 0) throw ConfigError("config: level count must be positive");
      spec.levels.push_back({number(l["scale"], "scale"), static_cast<int>(count)});
    }
  }
  spec.validate();
  return spec;
}

SelectionScheme parse_scheme(const std::string& s) {
  for (auto scheme : {SelectionScheme::kTop, SelectionScheme::kScheme1, SelectionScheme::kScheme2,
                      SelectionScheme::kOverlap}) {
    if (s == scheme_name(scheme)) return scheme;
  }
  throw ConfigError(fmt::format("config: unknown selection scheme '{}'", s));
}

ProposalSource parse_proposals(const json& j, const std::filesystem::path& base) {
  check_keys(j, {"dir", "scheme", "limit", "min_scale_index", "scale_priority", "iou_threshold"},
             "landmarks.proposals");
  if (!j.contains("dir")) throw ConfigError("config: 'landmarks.proposals.dir' is required");
  ProposalSource p;
  p.dir = resolve(string(j["dir"], "dir"), base);
  if (j.contains("scheme")) p.scheme = parse_scheme(string(j["scheme"], "scheme"));
  auto& sel = p.selection;
  if (j.contains("limit")) sel.limit = static_cast<int>(integer(j["limit"], "limit"));
  if (j.contains("min_scale_index")) {
    sel.min_scale_index = static_cast<int>(integer(j["min_scale_index"], "min_scale_index"));
  }
  if (j.contains("scale_priority")) {
    if (!j["scale_priority"].is_array()) throw ConfigError("config: 'scale_priority' must be an array");
    sel.scale_priority.clear();
    for (const auto& v : j["scale_priority"]) {
      sel.scale_priority.push_back(static_cast<int>(integer(v, "scale_priority[]")));
    }
  }
  if (j.contains("iou_threshold")) sel.iou_threshold = number(j["iou_threshold"], "iou_threshold");
  sel.validate();
  return p;
}

MatchConfig parse_match(const json& j) {
  check_keys(j, {"shape_sign", "soft_nms"}, "match");
  MatchConfig m;
  if (j.contains("shape_sign")) {
    const auto s = string(j["shape_sign"], "shape_sign");
    if (s == "negative") {
      m.shape_exponent_sign = ShapeExponentSign::kNegative;
    } else if (s == "positive") {
      m.shape_exponent_sign = ShapeExponentSign::kPositiveAsPrinted;
    } else {
      throw ConfigError(fmt::format("config: shape_sign '{}' is not negative/positive", s));
    }
  }
  if (j.contains("soft_nms") && !j["soft_nms"].is_null()) {
    const auto& s = j["soft_nms"];
    check_keys(s, {"iou_threshold", "sigma", "side"}, "match.soft_nms");
    SoftNmsConfig cfg;
    if (s.contains("iou_threshold")) cfg.iou_threshold = number(s["iou_threshold"], "iou_threshold");
    if (s.contains("sigma")) cfg.sigma = number(s["sigma"], "sigma");
    if (s.contains("side")) {
      const auto side = string(s["side"], "side");
      if (side == "query") {
        cfg.side = BoxSide::kQuery;
      } else if (side == "reference") {
        cfg.side = BoxSide::kReference;
      } else {
        throw ConfigError(fmt::format("config: soft_nms side '{}' is not query/reference", side));
      }
    }
    cfg.validate();
    m.soft_nms = cfg;
  }
  return m;
}

EvaluationConfig parse_evaluation(const json& j, const std::filesystem::path& base) {
  check_keys(j, {"thresholds", "out", "labels", "heatmap_downsample"}, "evaluation");
  EvaluationConfig e;
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    if (t.is_number_integer()) {
      const auto n = t.get<std::int64_t>();
      if (n < 2) throw ConfigError("config: threshold count must be >= 2");
      e.thresholds = uniform_thresholds(static_cast<std::size_t>(n));
    } else if (t.is_array()) {
      e.thresholds.clear();
      for (const auto& v : t) e.thresholds.push_back(number(v, "thresholds[]"));
      for (std::size_t i = 0; i < e.thresholds.size(); ++i) {
        const double v = e.thresholds[i];
        if (!(v >= 0.0 && v <= 1.0) || (i > 0 && v <= e.thresholds[i - 1])) {
          throw ConfigError("config: thresholds must be strictly increasing within [0, 1]");
        }
      }
      if (e.thresholds.empty()) throw ConfigError("config: thresholds must not be empty");
    } else {
      throw ConfigError("config: 'thresholds' must be a count or an array");
    }
  }
  if (j.contains("out")) e.out = resolve(string(j["out"], "out"), base);
  if (j.contains("labels")) e.labels = resolve(string(j["labels"], "labels"), base);
  if (j.contains("heatmap_downsample")) {
    const auto f = integer(j["heatmap_downsample"], "heatmap_downsample");
    if (f < 1) throw ConfigError("config: heatmap_downsample must be >= 1");
    e.heatmap_downsample = static_cast<int>(f);
  }
  return e;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  check_keys(doc, {"landmarks", "descriptors", "projection", "match", "evaluation", "seed", "threads"},
             "<root>");
  RunConfig cfg;
  if (doc.contains("landmarks")) {
    const auto& l = doc["landmarks"];
    if (one_of(l, {"dense", "proposals"}, "landmarks") == "dense") {
      cfg.landmarks = DenseSource{parse_dense(l["dense"])};
    } else {
      cfg.landmarks = parse_proposals(l["proposals"], base_dir);
    }
  }
  if (doc.contains("descriptors")) {
    const auto& d = doc["descriptors"];
    if (one_of(d, {"builtin", "files"}, "descriptors") == "builtin") {
      check_keys(d["builtin"], {}, "descriptors.builtin");
      cfg.descriptors = BuiltinDescriptors{};
    } else {
      const auto& f = d["files"];
      check_keys(f, {"dir"}, "descriptors.files");
      if (!f.contains("dir")) throw ConfigError("config: 'descriptors.files.dir' is required");
      cfg.descriptors = DescriptorFiles{resolve(string(f["dir"], "dir"), base_dir)};
    }
  }
  if (doc.contains("projection") && !doc["projection"].is_null()) {
    const auto& p = doc["projection"];
    check_keys(p, {"target_dim"}, "projection");
    const auto t = p.contains("target_dim") ? integer(p["target_dim"], "target_dim") : 1024;
    if (t <= 0) throw ConfigError("config: projection target_dim must be positive");
    cfg.projection_dim = static_cast<std::size_t>(t);
  }
  if (doc.contains("match")) cfg.match = parse_match(doc["match"]);
  if (doc.contains("evaluation")) cfg.evaluation = parse_evaluation(doc["evaluation"], base_dir);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("config: 'seed' must be an unsigned integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    const auto t = integer(doc["threads"], "threads");
    if (t < 0) throw ConfigError("config: 'threads' must be >= 0");
    cfg.threads = static_cast<unsigned>(t);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_run_config(text, path.parent_path());
}

std::string canonical_json(const RunConfig& cfg) {
  json j;
  if (const auto* dense = std::get_if<DenseSource>(&cfg.landmarks)) {
    json levels = json::array();
    for (const auto& l : dense->spec.levels) levels.push_back({{"scale", l.normalized_scale}, {"count", l.count}});
    j["landmarks"] = {{"dense", {{"levels", levels}}}};
  } else {
    const auto& p = std::get<ProposalSource>(cfg.landmarks);
    j["landmarks"] = {{"proposals",
                       {{"dir", p.dir.generic_string()},
                        {"scheme", scheme_name(p.scheme)},
                        {"limit", p.selection.limit},
                        {"min_scale_index", p.selection.min_scale_index},
                        {"scale_priority", p.selection.scale_priority},
                        {"iou_threshold", p.selection.iou_threshold}}}};
  }
  if (const auto* files = std::get_if<DescriptorFiles>(&cfg.descriptors)) {
    j["descriptors"] = {{"files", {{"dir", files->dir.generic_string()}}}};
  } else {
    j["descriptors"] = {{"builtin", json::object()}};
  }
  j["projection"] = cfg.projection_dim ? json{{"target_dim", *cfg.projection_dim}} : json(nullptr);
  json match = {{"shape_sign", cfg.match.shape_exponent_sign == ShapeExponentSign::kNegative ? "negative" : "positive"}};
  if (cfg.match.soft_nms) {
    const auto& s = *cfg.match.soft_nms;
    match["soft_nms"] = {{"iou_threshold", s.iou_threshold},
                         {"sigma", s.sigma},
                         {"side", s.side == BoxSide::kQuery ? "query" : "reference"}};
  } else {
    match["soft_nms"] = nullptr;
  }
  j["match"] = match;
  json eval = {{"thresholds", cfg.evaluation.thresholds},
               {"heatmap_downsample", cfg.evaluation.heatmap_downsample}};
  eval["labels"] = cfg.evaluation.labels ? json(cfg.evaluation.labels->generic_string()) : json(nullptr);
  j["evaluation"] = eval;
  j["seed"] = cfg.seed;
  // threads and the output directory do not change results and stay out of the hash.
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

PipelineConfig to_pipeline(const RunConfig& cfg) {
  PipelineConfig p;
  p.landmarks = cfg.landmarks;
  p.descriptors = cfg.descriptors;
  p.projection_dim = cfg.projection_dim;
  p.match = cfg.match;
  p.seed = cfg.seed;
  p.threads = cfg.threads;
  return p;
}

}  // namespace lmvpr::cli
