// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/pipeline.hpp"

#include <fmt/format.h>

#include "lmvpr/block_io.hpp"
#include "lmvpr/error.hpp"
#include "lmvpr/parallel.hpp"
#include "lmvpr/projection.hpp"

namespace lmvpr {

const char* scheme_name(SelectionScheme scheme) {
  switch (scheme) {
    case SelectionScheme::kTop: return "top";
    case SelectionScheme::kScheme1: return "scheme1";
    case SelectionScheme::kScheme2: return "scheme2";
    case SelectionScheme::kOverlap: return "overlap";
  }
  return "unknown";
}

Selection apply_selection(const ProposalList& proposals, SelectionScheme scheme,
                          const SelectionConfig& cfg) {
  switch (scheme) {
    case SelectionScheme::kTop: return select_top(proposals, cfg);
    case SelectionScheme::kScheme1: return select_scheme1(proposals, cfg);
    case SelectionScheme::kScheme2: return select_scheme2(proposals, cfg);
    case SelectionScheme::kOverlap: return select_overlap(proposals, cfg);
  }
  throw ConfigError("unknown selection scheme");
}

Selection generate_landmarks(const ImageEntry& entry, const ImageDims& dims,
                             const LandmarkSource& source, StageTimer* timer) {
  if (const auto* dense = std::get_if<DenseSource>(&source)) {
    StageTimer local;
    Selection sel;
    {
      auto scope = local.measure(Stage::kLandmarks);
      sel.landmarks = dense_sample(dims, dense->spec, entry.id);
    }
    local.add_units(Stage::kLandmarks, 1);
    if (timer) timer->merge(local);
    return sel;
  }
  const auto& prop = std::get<ProposalSource>(source);
  const auto proposals = load_proposals(prop.dir / boxes_filename(entry.id), dims);
  StageTimer local;
  Selection sel;
  {
    auto scope = local.measure(Stage::kLandmarks);
    sel = apply_selection(proposals, prop.scheme, prop.selection);
  }
  local.add_units(Stage::kLandmarks, 1);
  if (timer) timer->merge(local);
  sel.landmarks.image_id = entry.id;
  return sel;
}

DescriptorBlock maybe_project(DescriptorBlock block, const PipelineConfig& cfg) {
  if (!cfg.projection_dim) return block;
  const GaussianProjector projector(block.dim(), ProjectionConfig{*cfg.projection_dim, cfg.seed});
  return projector.project(block);
}

DescriptorBlock compute_descriptors(const GrayImage& image, const LandmarkSet& landmarks,
                                    const PipelineConfig& cfg, StageTimer* timer) {
  StageTimer local;
  DescriptorBlock block;
  {
    auto scope = local.measure(Stage::kDescriptors);
    block = maybe_project(describe_landmarks(image, landmarks), cfg);
  }
  local.add_units(Stage::kDescriptors, 1);
  if (timer) timer->merge(local);
  return block;
}

std::vector<std::optional<DescriptorBlock>> prepare_images(const std::vector<ImageEntry>& entries,
                                                           const PipelineConfig& cfg,
                                                           StageTimer& timer,
                                                           std::vector<ImageError>& errors) {
  std::vector<std::optional<DescriptorBlock>> blocks(entries.size());
  std::vector<StageTimer> timers(entries.size());
  std::vector<std::optional<std::string>> failures(entries.size());

  parallel_for(entries.size(), cfg.threads, [&](std::size_t i) {
    const auto& entry = entries[i];
    try {
      if (const auto* files = std::get_if<DescriptorFiles>(&cfg.descriptors)) {
        auto block = read_block(files->dir / block_filename(entry.id));
        StageTimer& t = timers[i];
        {
          auto scope = t.measure(Stage::kDescriptors);
          block = maybe_project(std::move(block), cfg);
        }
        t.add_units(Stage::kDescriptors, 1);
        blocks[i] = std::move(block);
        return;
      }
      GrayImage image;
      {
        auto scope = timers[i].measure(Stage::kDescriptors);
        image = load_image(entry.path);
      }
      auto sel = generate_landmarks(entry, image.dims(), cfg.landmarks, &timers[i]);
      blocks[i] = compute_descriptors(image, sel.landmarks, cfg, &timers[i]);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < entries.size(); ++i) {
    timer.merge(timers[i]);
    if (failures[i]) {
      errors.push_back({entries[i].id, *failures[i]});
      blocks[i].reset();
    } else if (blocks[i] && blocks[i]->empty()) {
      errors.push_back({entries[i].id, "no landmarks"});
      blocks[i].reset();
    }
  }
  return blocks;
}

PipelineRun run_pipeline(const DatasetManifest& manifest, const PipelineConfig& cfg) {
  PipelineRun run;
  const auto start = StageTimer::Clock::now();
  run.queries = prepare_images(manifest.queries, cfg, run.timer, run.errors);
  run.references = prepare_images(manifest.references, cfg, run.timer, run.errors);
  {
    auto scope = run.timer.measure(Stage::kMatching);
    run.matrix = build_similarity_matrix(run.queries, run.references, cfg.match, cfg.threads);
  }
  run.timer.add_units(Stage::kMatching, manifest.queries.size() * manifest.references.size());
  run.timer.set_wall(StageTimer::Clock::now() - start);
  return run;
}

}  // namespace lmvpr
