// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lmvpr/descriptors.hpp"
#include "lmvpr/geometry.hpp"
#include "lmvpr/image.hpp"
#include "lmvpr/manifest.hpp"
#include "lmvpr/matching.hpp"
#include "lmvpr/proposals.hpp"
#include "lmvpr/similarity.hpp"
#include "lmvpr/timing.hpp"

namespace lmvpr {

struct DenseSource {
  ScaleSpec spec = ScaleSpec::default_spec();
};

enum class SelectionScheme { kTop, kScheme1, kScheme2, kOverlap };

const char* scheme_name(SelectionScheme scheme);

struct ProposalSource {
  std::filesystem::path dir;  // holds <image_id>.boxes.csv
  SelectionScheme scheme = SelectionScheme::kTop;
  SelectionConfig selection;
};

using LandmarkSource = std::variant<DenseSource, ProposalSource>;

struct BuiltinDescriptors {};
struct DescriptorFiles {
  std::filesystem::path dir;  // holds <image_id>.lmdb1
};
using DescriptorSource = std::variant<BuiltinDescriptors, DescriptorFiles>;

struct PipelineConfig {
  LandmarkSource landmarks = DenseSource{};
  DescriptorSource descriptors = BuiltinDescriptors{};
  std::optional<std::size_t> projection_dim;  // seed comes from `seed`
  MatchConfig match;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ImageError {
  std::string image_id;
  std::string message;
};

Selection apply_selection(const ProposalList& proposals, SelectionScheme scheme,
                          const SelectionConfig& cfg);

// Landmarks for one image from the configured source. Only the sampling or
// selection itself is charged to the landmark stage.
Selection generate_landmarks(const ImageEntry& entry, const ImageDims& dims,
                             const LandmarkSource& source, StageTimer* timer = nullptr);

// Built-in descriptors for pre-computed landmarks, projected when
// configured. Charged to the descriptor stage.
DescriptorBlock compute_descriptors(const GrayImage& image, const LandmarkSet& landmarks,
                                    const PipelineConfig& cfg, StageTimer* timer = nullptr);

// Projects a block when cfg.projection_dim is set; passes it through otherwise.
DescriptorBlock maybe_project(DescriptorBlock block, const PipelineConfig& cfg);

// Runs landmark generation and description for each entry. Image decoding
// is charged to the descriptor stage. Failures are recorded per image and
// leave an empty slot.
std::vector<std::optional<DescriptorBlock>> prepare_images(const std::vector<ImageEntry>& entries,
                                                           const PipelineConfig& cfg,
                                                           StageTimer& timer,
                                                           std::vector<ImageError>& errors);

struct PipelineRun {
  SimilarityMatrix matrix;
  std::vector<std::optional<DescriptorBlock>> queries;
  std::vector<std::optional<DescriptorBlock>> references;
  std::vector<ImageError> errors;
  StageTimer timer;
};

// The whole pipeline in memory, with stage timing.
PipelineRun run_pipeline(const DatasetManifest& manifest, const PipelineConfig& cfg);

}  // namespace lmvpr
