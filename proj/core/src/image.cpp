// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <fmt/format.h>

#include "lmvpr/error.hpp"

#ifdef LMVPR_WITH_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

namespace lmvpr {

GrayImage::GrayImage(int width, int height, float fill)
    : width_(width),
      height_(height),
      pixels_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {}

GrayImage::GrayImage(int width, int height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw GeometryError(fmt::format("pixel buffer of {} values does not match {}x{}",
                                    pixels_.size(), width, height));
  }
}

namespace {

struct PnmHeader {
  char kind = 0;  // '2', '3', '5' or '6'
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t data_offset = 0;
};

bool is_pnm(const std::string& bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' &&
         (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6');
}

// Tokenizer over the ASCII part of a PNM file; skips whitespace and comments.
class PnmTokens {
 public:
  PnmTokens(const std::string& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  long next(const std::filesystem::path& path) {
    skip();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) {
      throw DataError(fmt::format("{}: malformed PNM data at byte {}", path.string(), start));
    }
    return std::stol(bytes_.substr(start, pos_ - start));
  }
  [[nodiscard]] std::size_t pos() const { return pos_; }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_;
};

PnmHeader parse_pnm_header(const std::string& bytes, const std::filesystem::path& path) {
  PnmHeader header;
  header.kind = bytes[1];
  PnmTokens tokens(bytes, 2);
  header.width = static_cast<int>(tokens.next(path));
  header.height = static_cast<int>(tokens.next(path));
  header.maxval = static_cast<int>(tokens.next(path));
  if (header.width <= 0 || header.height <= 0 || header.maxval <= 0 || header.maxval > 65535) {
    throw DataError(fmt::format("{}: invalid PNM header", path.string()));
  }
  // Exactly one whitespace byte separates the header from binary payloads.
  header.data_offset = tokens.pos() + 1;
  return header;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open image {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

GrayImage decode_pnm(const std::string& bytes, const std::filesystem::path& path) {
  const PnmHeader header = parse_pnm_header(bytes, path);
  const bool colour = header.kind == '3' || header.kind == '6';
  const bool binary = header.kind == '5' || header.kind == '6';
  const std::size_t channels = colour ? 3 : 1;
  const std::size_t n = static_cast<std::size_t>(header.width) * header.height;
  const double scale = 255.0 / header.maxval;

  std::vector<double> samples(n * channels);
  if (binary) {
    const std::size_t bps = header.maxval > 255 ? 2 : 1;
    if (bytes.size() < header.data_offset + samples.size() * bps) {
      throw DataError(fmt::format("{}: truncated PNM payload", path.string()));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + header.data_offset);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = bps == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
    }
  } else {
    PnmTokens tokens(bytes, header.data_offset - 1);
    for (auto& s : samples) s = static_cast<double>(tokens.next(path));
  }

  std::vector<float> pixels(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = colour ? 0.299 * samples[3 * i] + 0.587 * samples[3 * i + 1] +
                            0.114 * samples[3 * i + 2]
                      : samples[i];
    pixels[i] = static_cast<float>(std::clamp(v * scale, 0.0, 255.0));
  }
  return GrayImage(header.width, header.height, std::move(pixels));
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  if (is_pnm(bytes)) return decode_pnm(bytes, path);
#ifdef LMVPR_WITH_OPENCV
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (!mat.empty()) {
    std::vector<float> pixels(static_cast<std::size_t>(mat.rows) * mat.cols);
    for (int y = 0; y < mat.rows; ++y) {
      const auto* row = mat.ptr<unsigned char>(y);
      for (int x = 0; x < mat.cols; ++x) pixels[static_cast<std::size_t>(y) * mat.cols + x] = row[x];
    }
    return GrayImage(mat.cols, mat.rows, std::move(pixels));
  }
#endif
  throw DataError(fmt::format("cannot decode image {}", path.string()));
}

ImageDims probe_image_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open image {}", path.string()));
  std::string head(512, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  if (is_pnm(head)) {
    try {
      const auto header = parse_pnm_header(head, path);
      return {header.width, header.height};
    } catch (const DataError&) {
      // Header longer than the probe window (many comments); decode fully.
    }
  }
  return load_image(path).dims();
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::string payload(image.pixels().size(), '\0');
  for (std::size_t i = 0; i < payload.size(); ++i) {
    const double v = std::clamp(std::round(static_cast<double>(image.pixels()[i])), 0.0, 255.0);
    payload[i] = static_cast<char>(static_cast<unsigned char>(v));
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw DataError(fmt::format("write failed for {}", path.string()));
}

}  // namespace lmvpr
