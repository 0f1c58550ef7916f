// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/study.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

namespace lmvpr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto c = line.find(',', start);
    out.push_back(trim(line.substr(start, c == std::string_view::npos ? c : c - start)));
    if (c == std::string_view::npos) return out;
    start = c + 1;
  }
}

template <typename T>
T field(std::string_view f, const std::string& source, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
    throw ParseError(fmt::format("{}:{}: bad field '{}'", source, line, f));
  }
  return v;
}

// Calls fn(fields, line_no) for every data line, skipping blanks, '#'
// comments, and a header row whose first field is `header_first`.
template <typename Fn>
void for_each_row(const std::string& text, std::string_view header_first, Fn&& fn) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (fields.front() == header_first) continue;
    fn(fields, line_no);
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string format_match_record(const MatchRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", r.query_id, r.ref_id, r.query_index,
                     r.ref_index, r.query_landmark, r.ref_landmark, r.query_scale, r.ref_scale,
                     r.d, r.s, r.score);
}

std::vector<MatchRecord> parse_match_dump(const std::string& text, const std::string& source) {
  std::vector<MatchRecord> out;
  for_each_row(text, "query_id", [&](const auto& f, int line) {
    if (f.size() != 11) {
      throw ParseError(fmt::format("{}:{}: expected 11 fields, got {}", source, line, f.size()));
    }
    MatchRecord r;
    r.query_id = std::string(f[0]);
    r.ref_id = std::string(f[1]);
    r.query_index = field<std::size_t>(f[2], source, line);
    r.ref_index = field<std::size_t>(f[3], source, line);
    r.query_landmark = field<std::size_t>(f[4], source, line);
    r.ref_landmark = field<std::size_t>(f[5], source, line);
    r.query_scale = field<int>(f[6], source, line);
    r.ref_scale = field<int>(f[7], source, line);
    r.d = field<double>(f[8], source, line);
    r.s = field<double>(f[9], source, line);
    r.score = field<double>(f[10], source, line);
    if (r.query_scale < 1 || r.query_scale > kScaleBins || r.ref_scale < 1 ||
        r.ref_scale > kScaleBins) {
      throw ParseError(fmt::format("{}:{}: scale index outside 1..9", source, line));
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<MatchRecord> load_match_dump(const std::filesystem::path& path) {
  return parse_match_dump(read_text(path), path.string());
}

LabelSet parse_labels(const std::string& text, const std::string& source) {
  LabelSet out;
  for_each_row(text, "query_id", [&](const auto& f, int line) {
    if (f.size() != 5) {
      throw ParseError(fmt::format("{}:{}: expected 5 label fields, got {}", source, line, f.size()));
    }
    const auto& lab = f[4];
    bool value = false;
    if (lab == "1" || lab == "true" || lab == "TRUE" || lab == "True") {
      value = true;
    } else if (lab == "0" || lab == "false" || lab == "FALSE" || lab == "False") {
      value = false;
    } else {
      throw ParseError(fmt::format("{}:{}: label '{}' is not true/false", source, line, lab));
    }
    out[LabelKey{std::string(f[0]), std::string(f[1]), field<std::size_t>(f[2], source, line),
                 field<std::size_t>(f[3], source, line)}] = value;
  });
  return out;
}

LabelSet load_labels(const std::filesystem::path& path) {
  return parse_labels(read_text(path), path.string());
}

StudyRecord accumulate_study(const std::vector<MatchRecord>& records, const GroundTruth& truth,
                             const std::optional<LabelSet>& labels) {
  StudyRecord rec;
  rec.has_labels = labels.has_value();
  for (const auto& r : records) {
    if (r.query_scale < 1 || r.query_scale > kScaleBins) {
      throw DataError(fmt::format("match record with scale {}", r.query_scale));
    }
    const Channel c = truth.is_correct(r.query_index, r.ref_index) ? Channel::kGroundTruth
                                                                   : Channel::kIrrelevant;
    auto& bin = rec.bins[static_cast<std::size_t>(c)][static_cast<std::size_t>(r.query_scale - 1)];
    ++bin.matches;
    bin.score_sum += r.score;
    if (labels) {
      const auto it = labels->find(LabelKey{r.query_id, r.ref_id, r.query_landmark, r.ref_landmark});
      if (it != labels->end()) {
        ++bin.labelled;
        bin.labelled_true += it->second ? 1 : 0;
      }
    }
  }
  return rec;
}

ScaleSeries correct_match_rate(const StudyRecord& record) {
  if (!record.has_labels) {
    throw ConfigError("correct-match rate requires a label file");
  }
  ScaleSeries out{};
  for (int k = 1; k <= kScaleBins; ++k) {
    const auto& b = record.bin(Channel::kGroundTruth, k);
    if (b.labelled > 0) out[static_cast<std::size_t>(k - 1)] = static_cast<double>(b.labelled_true) / b.labelled;
  }
  return out;
}

ScaleSeries contribution_share(const StudyRecord& record, Channel channel) {
  double total = 0.0;
  for (int k = 1; k <= kScaleBins; ++k) total += record.bin(channel, k).score_sum;
  ScaleSeries out{};
  for (int k = 1; k <= kScaleBins; ++k) {
    const auto& b = record.bin(channel, k);
    if (b.matches > 0 && total != 0.0) out[static_cast<std::size_t>(k - 1)] = b.score_sum / total;
  }
  return out;
}

ScaleSeries average_similarity(const StudyRecord& record, Channel channel) {
  ScaleSeries out{};
  for (int k = 1; k <= kScaleBins; ++k) {
    const auto& b = record.bin(channel, k);
    if (b.matches > 0) out[static_cast<std::size_t>(k - 1)] = b.score_sum / static_cast<double>(b.matches);
  }
  return out;
}

}  // namespace lmvpr
