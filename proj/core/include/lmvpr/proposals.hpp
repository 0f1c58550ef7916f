// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lmvpr/geometry.hpp"

namespace lmvpr {

// Externally generated candidate boxes for one image, in descending proposal
// score order. Scores are carried through but selection only looks at rank
// and geometry.
struct ProposalList {
  std::string image_id;
  ImageDims dims;
  std::vector<BoundingBox> boxes;
  std::vector<double> scores;  // empty, or parallel to boxes
};

struct SelectionConfig {
  int limit = 100;
  int min_scale_index = 4;
  std::vector<int> scale_priority{5, 6, 7, 8, 9, 4};
  double iou_threshold = 0.4;

  void validate() const;
};

struct Selection {
  LandmarkSet landmarks;
  bool underfull = false;  // fewer than `limit` boxes qualified
};

// Box CSV: one `x,y,w,h[,score]` per line, optional leading `#` header line.
ProposalList parse_proposals(const std::string& text, std::string image_id,
                             const ImageDims& dims, const std::string& source = "<memory>");
ProposalList load_proposals(const std::filesystem::path& path, const ImageDims& dims);

// `header` is written verbatim after a leading "# " when non-empty.
std::string format_boxes(const std::vector<BoundingBox>& boxes, const std::string& header = {},
                         const std::vector<double>& scores = {});
void write_boxes(const std::filesystem::path& path, const std::vector<BoundingBox>& boxes,
                 const std::string& header = {});

// "<image_id>.boxes.csv"
std::string boxes_filename(const std::string& image_id);

// The first `limit` proposals, unfiltered.
Selection select_top(const ProposalList& proposals, const SelectionConfig& cfg);

// Rank-order scan keeping boxes whose scale index reaches min_scale_index.
Selection select_scheme1(const ProposalList& proposals, const SelectionConfig& cfg);

// One full pass over the ranking per entry of scale_priority, taking every
// box of that scale, until `limit` boxes are held.
Selection select_scheme2(const ProposalList& proposals, const SelectionConfig& cfg);

// Greedy rank-order scan accepting a box only when its IoU with every box
// accepted so far is at most iou_threshold.
Selection select_overlap(const ProposalList& proposals, const SelectionConfig& cfg);

}  // namespace lmvpr
