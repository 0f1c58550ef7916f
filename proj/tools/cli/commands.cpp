// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cli/run_config.hpp"
#include "lmvpr/block_io.hpp"
#include "lmvpr/coverage.hpp"
#include "lmvpr/error.hpp"
#include "lmvpr/parallel.hpp"
#include "lmvpr/pipeline.hpp"
#include "lmvpr/study.hpp"

#ifndef LMVPR_VERSION
#define LMVPR_VERSION "unknown"
#endif

namespace lmvpr::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Context {
  RunConfig cfg;
  PipelineConfig pipeline;
  std::string hash;
  std::string header;  // "config_hash=... seed=..."
  std::optional<DatasetManifest> manifest;
  fs::path out;
  bool verbose = false;
  std::ostream* err = nullptr;
  std::vector<ImageError> errors;
};

Context make_context(const CommandOptions& opts, std::ostream& err) {
  Context ctx;
  ctx.cfg = opts.config ? load_run_config(*opts.config) : RunConfig{};
  if (opts.seed) ctx.cfg.seed = *opts.seed;
  if (opts.threads) ctx.cfg.threads = *opts.threads;
  ctx.pipeline = to_pipeline(ctx.cfg);
  ctx.hash = config_hash(ctx.cfg);
  ctx.header = fmt::format("config_hash={} seed={}", ctx.hash, ctx.cfg.seed);
  ctx.verbose = opts.verbose;
  ctx.err = &err;

  if (!opts.manifest) throw ConfigError("--manifest is required");
  ctx.manifest = load_manifest(*opts.manifest);
  std::map<std::string, fs::path> seen;
  for (const auto* list : {&ctx.manifest->queries, &ctx.manifest->references}) {
    for (const auto& e : *list) {
      if (e.id.find_first_of("/\\") != std::string::npos || e.id == "." || e.id == "..") {
        throw ConfigError(fmt::format("image id '{}' cannot be used as a file name", e.id));
      }
      const auto [it, inserted] = seen.emplace(e.id, e.path);
      if (!inserted && it->second != e.path) {
        throw ConfigError(fmt::format("image id '{}' names two different files", e.id));
      }
    }
  }

  if (opts.out) {
    ctx.out = *opts.out;
  } else if (ctx.cfg.evaluation.out) {
    ctx.out = *ctx.cfg.evaluation.out;
  } else {
    throw ConfigError("no output directory: pass --out or set evaluation.out");
  }
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw DataError(fmt::format("cannot create {}: {}", ctx.out.string(), ec.message()));
  return ctx;
}

void note(const Context& ctx, const std::string& msg) {
  if (ctx.verbose) *ctx.err << msg << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// Queries first, then references not already listed under the same id.
std::vector<ImageEntry> all_images(const DatasetManifest& m) {
  std::vector<ImageEntry> out = m.queries;
  std::map<std::string, bool> ids;
  for (const auto& e : out) ids[e.id] = true;
  for (const auto& e : m.references) {
    if (!ids.count(e.id)) out.push_back(e);
  }
  return out;
}

fs::path boxes_dir(const Context& ctx) { return ctx.out / "boxes"; }
fs::path blocks_dir(const Context& ctx) { return ctx.out / "blocks"; }

// ---- timing files -------------------------------------------------------

json timer_json(const StageTimer& t) {
  json j = json::object();
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto s = static_cast<Stage>(i);
    j[stage_name(s)] = {{"seconds", t.seconds(s)}, {"units", t.units(s)}};
  }
  j["wall_seconds"] = t.wall_seconds();
  return j;
}

StageTimer timer_from_json(const json& j) {
  StageTimer t;
  using Dur = StageTimer::Clock::duration;
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto s = static_cast<Stage>(i);
    if (!j.contains(stage_name(s))) continue;
    const auto& e = j[stage_name(s)];
    t.add(s, std::chrono::duration_cast<Dur>(std::chrono::duration<double>(e.at("seconds").get<double>())),
          e.at("units").get<std::size_t>());
  }
  if (j.contains("wall_seconds")) {
    t.set_wall(std::chrono::duration_cast<Dur>(
        std::chrono::duration<double>(j["wall_seconds"].get<double>())));
  }
  return t;
}

void write_stage_timing(const Context& ctx, const std::string& name, const StageTimer& t) {
  json j = timer_json(t);
  j["config_hash"] = ctx.hash;
  j["seed"] = ctx.cfg.seed;
  write_text(ctx.out / fmt::format("timing_{}.json", name), j.dump(2) + "\n");
}

StageTimer read_stage_timing(const Context& ctx, const std::string& name) {
  const auto path = ctx.out / fmt::format("timing_{}.json", name);
  if (!fs::exists(path)) return {};
  try {
    return timer_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string method_name(const RunConfig& cfg) {
  if (std::holds_alternative<DenseSource>(cfg.landmarks)) return "dense";
  return fmt::format("proposals-{}", scheme_name(std::get<ProposalSource>(cfg.landmarks).scheme));
}

// ---- outputs ------------------------------------------------------------

std::string format_matrix(const Context& ctx, const SimilarityMatrix& m) {
  const auto& man = *ctx.manifest;
  std::string out = fmt::format("# {}\nquery_id", ctx.header);
  for (const auto& r : man.references) out += "," + r.id;
  out += "\n";
  for (std::size_t q = 0; q < m.rows; ++q) {
    out += man.queries[q].id;
    for (std::size_t r = 0; r < m.cols; ++r) {
      out += m.row_valid[q] && m.col_valid[r] ? fmt::format(",{}", m.at(q, r)) : std::string(",nan");
    }
    out += "\n";
  }
  return out;
}

std::string format_pr(const Context& ctx, const PRCurve& curve) {
  std::string out = fmt::format("# {}\nthreshold,precision,recall\n", ctx.header);
  for (const auto& p : curve.points) out += fmt::format("{},{},{}\n", p.threshold, p.precision, p.recall);
  return out;
}

std::string format_series(const Context& ctx, const std::vector<std::pair<std::string, ScaleSeries>>& cols) {
  std::string out = fmt::format("# {}\nscale_index", ctx.header);
  for (const auto& [name, s] : cols) out += "," + name;
  out += "\n";
  for (int k = 0; k < kScaleBins; ++k) {
    out += std::to_string(k + 1);
    for (const auto& [name, s] : cols) {
      out += s[static_cast<std::size_t>(k)] ? fmt::format(",{}", *s[static_cast<std::size_t>(k)]) : ",";
    }
    out += "\n";
  }
  return out;
}

void write_study(const Context& ctx, const std::vector<MatchRecord>& records) {
  std::optional<LabelSet> labels;
  if (ctx.cfg.evaluation.labels) labels = load_labels(*ctx.cfg.evaluation.labels);
  const auto study = accumulate_study(records, ctx.manifest->ground_truth, labels);
  write_text(ctx.out / "study_cls.csv",
             format_series(ctx, {{"ground_truth", contribution_share(study, Channel::kGroundTruth)},
                                 {"irrelevant", contribution_share(study, Channel::kIrrelevant)}}));
  write_text(ctx.out / "study_asl.csv",
             format_series(ctx, {{"ground_truth", average_similarity(study, Channel::kGroundTruth)},
                                 {"irrelevant", average_similarity(study, Channel::kIrrelevant)}}));
  if (labels) {
    write_text(ctx.out / "study_cmr.csv", format_series(ctx, {{"ground_truth", correct_match_rate(study)}}));
  } else {
    note(ctx, "no labels configured; skipping the correct-match rate");
  }
}

void write_metadata(const Context& ctx, const std::string& command, const StageTimer& timer,
                    const json& extra = json::object()) {
  json j;
  j["command"] = command;
  j["version"] = LMVPR_VERSION;
  j["config"] = json::parse(canonical_json(ctx.cfg));
  j["config_hash"] = ctx.hash;
  j["seed"] = ctx.cfg.seed;
  j["threads"] = resolve_threads(ctx.cfg.threads);
  j["timing"] = timer_json(timer);
  json errs = json::array();
  for (const auto& e : ctx.errors) errs.push_back({{"image_id", e.image_id}, {"message", e.message}});
  j["errors"] = errs;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  write_text(ctx.out / "run_metadata.json", j.dump(2) + "\n");
}

void write_timing_tables(const Context& ctx, const StageTimer& timer) {
  write_text(ctx.out / "timing.csv", format_timing_table(timer, ctx.header));
  write_text(ctx.out / "cost.csv", format_cost_table(timer, method_name(ctx.cfg), ctx.header));
}

int finish(Context& ctx, const std::string& command) {
  if (ctx.errors.empty()) return kOk;
  std::string text = fmt::format("# {}\nimage_id,message\n", ctx.header);
  for (const auto& e : ctx.errors) {
    text += csv_quote(e.image_id) + "," + csv_quote(e.message) + "\n";
    *ctx.err << command << ": " << e.image_id << ": " << e.message << "\n";
  }
  write_text(ctx.out / "errors.csv", text);
  return kDataError;
}

// ---- subcommands --------------------------------------------------------

int cmd_landmarks(Context& ctx, const std::string& command, std::ostream& log) {
  const bool dense = std::holds_alternative<DenseSource>(ctx.cfg.landmarks);
  if (command == "sample" && !dense) {
    throw ConfigError("sample needs a dense landmark source; use select for proposals");
  }
  if (command == "select" && dense) throw ConfigError("select needs a proposals landmark source");

  const auto images = all_images(*ctx.manifest);
  fs::create_directories(boxes_dir(ctx));
  std::vector<std::optional<Selection>> results(images.size());
  std::vector<std::optional<std::string>> failures(images.size());
  std::vector<StageTimer> timers(images.size());
  const auto start = StageTimer::Clock::now();
  parallel_for(images.size(), ctx.cfg.threads, [&](std::size_t i) {
    try {
      const auto dims = probe_image_dims(images[i].path);
      results[i] = generate_landmarks(images[i], dims, ctx.cfg.landmarks, &timers[i]);
      write_boxes(boxes_dir(ctx) / boxes_filename(images[i].id), results[i]->landmarks.boxes(),
                  ctx.header);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  StageTimer timer;
  std::vector<CountGrid> grids;
  std::optional<ImageDims> grid_dims;
  std::size_t total = 0, underfull = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    timer.merge(timers[i]);
    if (failures[i]) {
      ctx.errors.push_back({images[i].id, *failures[i]});
      continue;
    }
    const auto& sel = *results[i];
    total += sel.landmarks.size();
    if (sel.underfull) {
      ++underfull;
      note(ctx, fmt::format("{}: only {} boxes qualified", images[i].id, sel.landmarks.size()));
    }
    if (!grid_dims) grid_dims = sel.landmarks.dims;
    if (sel.landmarks.dims == *grid_dims) {
      grids.push_back(coverage_heatmap(sel.landmarks));
    } else {
      note(ctx, fmt::format("{}: size differs from the first image; left out of the heatmap", images[i].id));
    }
  }
  timer.set_wall(StageTimer::Clock::now() - start);
  write_stage_timing(ctx, "landmarks", timer);

  if (!grids.empty()) {
    const auto heat = downsample_max(accumulate(grids), ctx.cfg.evaluation.heatmap_downsample);
    write_text(ctx.out / "coverage.pgm", format_pgm_p2(heat, ctx.header));
    write_text(ctx.out / "coverage.csv", format_grid_csv(heat, ctx.header));
  }
  log << fmt::format("{}: {} images, {} boxes, {} underfull, {} errors\n", command,
                     images.size() - ctx.errors.size(), total, underfull, ctx.errors.size());
  return finish(ctx, command);
}

int cmd_describe(Context& ctx, std::ostream& log) {
  const auto images = all_images(*ctx.manifest);
  fs::create_directories(blocks_dir(ctx));
  std::vector<std::optional<std::string>> failures(images.size());
  std::vector<std::size_t> rows(images.size(), 0), dims(images.size(), 0);
  std::vector<StageTimer> timers(images.size());
  const auto start = StageTimer::Clock::now();
  parallel_for(images.size(), ctx.cfg.threads, [&](std::size_t i) {
    const auto& entry = images[i];
    auto& t = timers[i];
    try {
      DescriptorBlock block;
      if (const auto* files = std::get_if<DescriptorFiles>(&ctx.cfg.descriptors)) {
        block = read_block(files->dir / block_filename(entry.id));
        {
          auto scope = t.measure(Stage::kDescriptors);
          block = maybe_project(std::move(block), ctx.pipeline);
        }
        t.add_units(Stage::kDescriptors, 1);
      } else {
        GrayImage image;
        {
          auto scope = t.measure(Stage::kDescriptors);
          image = load_image(entry.path);
        }
        LandmarkSet landmarks;
        const auto box_file = boxes_dir(ctx) / boxes_filename(entry.id);
        if (fs::exists(box_file)) {
          const auto boxes = load_proposals(box_file, image.dims());
          landmarks = make_landmark_set(entry.id, image.dims(), boxes.boxes);
        } else {
          landmarks = generate_landmarks(entry, image.dims(), ctx.cfg.landmarks, &t).landmarks;
        }
        if (landmarks.empty()) throw DataError("no landmarks");
        block = compute_descriptors(image, landmarks, ctx.pipeline, &t);
      }
      rows[i] = block.size();
      dims[i] = block.dim();
      write_block(block, blocks_dir(ctx) / block_filename(entry.id));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });
  StageTimer timer;
  std::size_t total = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    timer.merge(timers[i]);
    if (failures[i]) {
      ctx.errors.push_back({images[i].id, *failures[i]});
    } else {
      total += rows[i];
    }
  }
  timer.set_wall(StageTimer::Clock::now() - start);
  write_stage_timing(ctx, "descriptors", timer);
  log << fmt::format("describe: {} blocks, {} descriptors, {} errors\n",
                     images.size() - ctx.errors.size(), total, ctx.errors.size());
  return finish(ctx, "describe");
}

struct MatchOutput {
  SimilarityMatrix matrix;
  std::vector<MatchRecord> records;
  StageTimer timer;
};

std::vector<std::optional<DescriptorBlock>> load_blocks(Context& ctx, const std::vector<ImageEntry>& entries) {
  std::vector<std::optional<DescriptorBlock>> blocks(entries.size());
  std::vector<std::optional<std::string>> failures(entries.size());
  parallel_for(entries.size(), ctx.cfg.threads, [&](std::size_t i) {
    try {
      blocks[i] = read_block(blocks_dir(ctx) / block_filename(entries[i].id));
      if (blocks[i]->empty()) throw DataError("descriptor block has no rows");
    } catch (const Error& e) {
      failures[i] = e.what();
      blocks[i].reset();
    }
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (failures[i]) ctx.errors.push_back({entries[i].id, *failures[i]});
  }
  return blocks;
}

MatchOutput run_matching(Context& ctx) {
  const auto& man = *ctx.manifest;
  MatchOutput out;
  const auto queries = load_blocks(ctx, man.queries);
  const auto refs = load_blocks(ctx, man.references);
  const auto start = StageTimer::Clock::now();
  {
    auto scope = out.timer.measure(Stage::kMatching);
    out.matrix = build_similarity_matrix(
        queries, refs, ctx.cfg.match, ctx.cfg.threads,
        [&](std::size_t q, std::size_t r, const PairComparison& cmp) {
          const auto& qb = *queries[q];
          const auto& rb = *refs[r];
          for (const auto& mp : cmp.matches) {
            MatchRecord rec;
            rec.query_id = man.queries[q].id;
            rec.ref_id = man.references[r].id;
            rec.query_index = q;
            rec.ref_index = r;
            rec.query_landmark = mp.query_idx;
            rec.ref_landmark = mp.ref_idx;
            rec.query_scale = qb.landmarks().landmarks[mp.query_idx].scale_index;
            rec.ref_scale = rb.landmarks().landmarks[mp.ref_idx].scale_index;
            rec.d = mp.d;
            rec.s = mp.s;
            rec.score = mp.score;
            out.records.push_back(std::move(rec));
          }
        });
  }
  out.timer.add_units(Stage::kMatching, man.queries.size() * man.references.size());
  out.timer.set_wall(StageTimer::Clock::now() - start);

  write_text(ctx.out / "matrix.csv", format_matrix(ctx, out.matrix));
  std::string dump = fmt::format("# {}\n{}\n", ctx.header, kMatchDumpColumns);
  for (const auto& r : out.records) dump += format_match_record(r) + "\n";
  write_text(ctx.out / "matches.csv", dump);
  write_stage_timing(ctx, "matching", out.timer);
  return out;
}

int cmd_match(Context& ctx, std::ostream& log) {
  const auto out = run_matching(ctx);
  log << fmt::format("match: {}x{} matrix, {} landmark matches, {} errors\n", out.matrix.rows,
                     out.matrix.cols, out.records.size(), ctx.errors.size());
  return finish(ctx, "match");
}

int cmd_evaluate(Context& ctx, std::ostream& log) {
  const auto out = run_matching(ctx);
  const auto curve = pr_curve(out.matrix, ctx.manifest->ground_truth, ctx.cfg.evaluation.thresholds);
  write_text(ctx.out / "pr.csv", format_pr(ctx, curve));
  write_study(ctx, out.records);

  StageTimer timer = read_stage_timing(ctx, "landmarks");
  timer.merge(read_stage_timing(ctx, "descriptors"));
  timer.merge(out.timer);
  write_timing_tables(ctx, timer);
  const double r1 = recall_at_full_precision(curve);
  write_metadata(ctx, "evaluate", timer, {{"recall_at_precision_1", r1}});
  log << fmt::format("evaluate: recall at precision 1 = {:.4f}, {} errors\n", r1, ctx.errors.size());
  return finish(ctx, "evaluate");
}

int cmd_study(Context& ctx, std::ostream& log) {
  const auto records = load_match_dump(ctx.out / "matches.csv");
  write_study(ctx, records);
  log << fmt::format("study: {} landmark matches\n", records.size());
  return finish(ctx, "study");
}

int cmd_bench(Context& ctx, std::ostream& log) {
  auto run = run_pipeline(*ctx.manifest, ctx.pipeline);
  ctx.errors = run.errors;
  write_timing_tables(ctx, run.timer);
  const double lm = run.timer.mean_seconds(Stage::kLandmarks);
  const double desc = run.timer.mean_seconds(Stage::kDescriptors);
  write_metadata(ctx, "bench", run.timer, {{"landmark_mean_seconds", lm}, {"descriptor_mean_seconds", desc}});
  log << fmt::format("bench: landmarks {:.3g} s/image, descriptors {:.3g} s/image, matching {:.3g} s/pair\n",
                     lm, desc, run.timer.mean_seconds(Stage::kMatching));
  return finish(ctx, "bench");
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sample", "select", "describe", "match",
                                              "evaluate", "study", "bench"};
  return names;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log,
                std::ostream& err) {
  try {
    auto ctx = make_context(opts, err);
    note(ctx, fmt::format("{}: {}", name, ctx.header));
    if (name == "sample" || name == "select") return cmd_landmarks(ctx, name, log);
    if (name == "describe") return cmd_describe(ctx, log);
    if (name == "match") return cmd_match(ctx, log);
    if (name == "evaluate") return cmd_evaluate(ctx, log);
    if (name == "study") return cmd_study(ctx, log);
    if (name == "bench") return cmd_bench(ctx, log);
    throw ConfigError(fmt::format("unknown command '{}'", name));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace lmvpr::cli
