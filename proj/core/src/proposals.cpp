// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/proposals.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

void SelectionConfig::validate() const {
  if (limit < 1) throw ConfigError("selection limit must be at least 1");
  if (min_scale_index < 1 || min_scale_index > kScaleBins) {
    throw ConfigError(fmt::format("min_scale_index {} outside 1..9", min_scale_index));
  }
  std::vector<int> seen;
  for (int s : scale_priority) {
    if (s < 1 || s > kScaleBins) {
      throw ConfigError(fmt::format("scale priority entry {} outside 1..9", s));
    }
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) {
      throw ConfigError(fmt::format("scale priority entry {} repeated", s));
    }
    seen.push_back(s);
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError(fmt::format("iou_threshold {} outside (0, 1]", iou_threshold));
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  field = trim(field);
  if (field.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // std::from_chars for double is available in libstdc++ 11.
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
  } else {
    if (field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
  }
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

ProposalList parse_proposals(const std::string& text, std::string image_id,
                             const ImageDims& dims, const std::string& source) {
  ProposalList list{std::move(image_id), dims, {}, {}};
  std::size_t pos = 0;
  int line_no = 0;
  bool any_score = false;
  bool all_scores = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line_no == 1) continue;
      throw ParseError(fmt::format("{}:{}: header line only allowed first", source, line_no));
    }
    const auto fields = split_commas(line);
    if (fields.size() != 4 && fields.size() != 5) {
      throw ParseError(fmt::format("{}:{}: expected x,y,w,h[,score], got {} fields", source,
                                   line_no, fields.size()));
    }
    BoundingBox box;
    if (!parse_number(fields[0], box.x) || !parse_number(fields[1], box.y) ||
        !parse_number(fields[2], box.w) || !parse_number(fields[3], box.h)) {
      throw ParseError(fmt::format("{}:{}: geometry must be integers", source, line_no));
    }
    if (box.x < 0 || box.y < 0 || box.w <= 0 || box.h <= 0) {
      throw ParseError(fmt::format("{}:{}: invalid box {} (need x,y >= 0 and w,h > 0)", source,
                                   line_no, to_string(box)));
    }
    if (!box.fits(dims)) {
      throw ValidationError(fmt::format("{}:{}: box {} outside image {}x{}", source, line_no,
                                        to_string(box), dims.width, dims.height));
    }
    double score = 0.0;
    if (fields.size() == 5) {
      if (!parse_number(fields[4], score)) {
        throw ParseError(fmt::format("{}:{}: score is not a number", source, line_no));
      }
      any_score = true;
    } else {
      all_scores = false;
    }
    list.boxes.push_back(box);
    list.scores.push_back(score);
  }
  if (!any_score) {
    list.scores.clear();
  } else if (!all_scores) {
    throw ParseError(fmt::format("{}: score column present on some lines only", source));
  }
  return list;
}

std::string boxes_filename(const std::string& image_id) { return image_id + ".boxes.csv"; }

ProposalList load_proposals(const std::filesystem::path& path, const ImageDims& dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open box file {}", path.string()));
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::string id = path.filename().string();
  const std::string suffix = ".boxes.csv";
  if (id.size() > suffix.size() && id.ends_with(suffix)) {
    id.resize(id.size() - suffix.size());
  } else {
    id = path.stem().string();
  }
  return parse_proposals(text, std::move(id), dims, path.string());
}

std::string format_boxes(const std::vector<BoundingBox>& boxes, const std::string& header,
                         const std::vector<double>& scores) {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    if (scores.empty()) {
      out += fmt::format("{},{},{},{}\n", b.x, b.y, b.w, b.h);
    } else {
      out += fmt::format("{},{},{},{},{}\n", b.x, b.y, b.w, b.h, scores[i]);
    }
  }
  return out;
}

void write_boxes(const std::filesystem::path& path, const std::vector<BoundingBox>& boxes,
                 const std::string& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  out << format_boxes(boxes, header);
  if (!out) throw DataError(fmt::format("write failed for {}", path.string()));
}

namespace {

void require_nonempty(const ProposalList& p) {
  if (p.boxes.empty()) {
    throw DataError(fmt::format("image '{}': no proposals to select from", p.image_id));
  }
}

Selection finish(const ProposalList& p, const std::vector<BoundingBox>& chosen, int limit) {
  Selection sel;
  sel.landmarks = make_landmark_set(p.image_id, p.dims, chosen);
  sel.underfull = static_cast<int>(chosen.size()) < limit;
  return sel;
}

}  // namespace

Selection select_top(const ProposalList& p, const SelectionConfig& cfg) {
  cfg.validate();
  require_nonempty(p);
  const auto n = std::min<std::size_t>(p.boxes.size(), static_cast<std::size_t>(cfg.limit));
  return finish(p, {p.boxes.begin(), p.boxes.begin() + static_cast<std::ptrdiff_t>(n)}, cfg.limit);
}

Selection select_scheme1(const ProposalList& p, const SelectionConfig& cfg) {
  cfg.validate();
  require_nonempty(p);
  std::vector<BoundingBox> chosen;
  for (const auto& box : p.boxes) {
    if (static_cast<int>(chosen.size()) >= cfg.limit) break;
    if (scale_index(area_ratio(box, p.dims)) >= cfg.min_scale_index) chosen.push_back(box);
  }
  return finish(p, chosen, cfg.limit);
}

Selection select_scheme2(const ProposalList& p, const SelectionConfig& cfg) {
  cfg.validate();
  require_nonempty(p);
  std::vector<int> scales;
  scales.reserve(p.boxes.size());
  for (const auto& box : p.boxes) scales.push_back(scale_index(area_ratio(box, p.dims)));

  std::vector<BoundingBox> chosen;
  for (int wanted : cfg.scale_priority) {
    for (std::size_t i = 0; i < p.boxes.size(); ++i) {
      if (static_cast<int>(chosen.size()) >= cfg.limit) break;
      if (scales[i] == wanted) chosen.push_back(p.boxes[i]);
    }
  }
  return finish(p, chosen, cfg.limit);
}

Selection select_overlap(const ProposalList& p, const SelectionConfig& cfg) {
  cfg.validate();
  require_nonempty(p);
  std::vector<BoundingBox> chosen;
  for (const auto& box : p.boxes) {
    if (static_cast<int>(chosen.size()) >= cfg.limit) break;
    const bool overlaps = std::any_of(chosen.begin(), chosen.end(), [&](const BoundingBox& kept) {
      return iou(kept, box) > cfg.iou_threshold;
    });
    if (!overlaps) chosen.push_back(box);
  }
  return finish(p, chosen, cfg.limit);
}

}  // namespace lmvpr
