// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/block_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <fmt/format.h>

namespace lmvpr {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint32_t checked_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError(fmt::format("{} {} does not fit the block format", what, v));
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string encode_block(const DescriptorBlock& block) {
  const auto& set = block.landmarks();
  std::string out;
  out.reserve(kBlockHeaderSize + block.size() * (16 + 4 * block.dim()));
  out.append(kBlockMagic, sizeof(kBlockMagic));
  put_u16(out, kBlockVersion);
  put_u32(out, checked_u32(static_cast<std::int64_t>(block.size()), "landmark count"));
  put_u32(out, checked_u32(static_cast<std::int64_t>(block.dim()), "dimension"));
  put_u32(out, checked_u32(set.dims.width, "image width"));
  put_u32(out, checked_u32(set.dims.height, "image height"));
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto& b = set.landmarks[i].box;
    put_u32(out, checked_u32(b.x, "box x"));
    put_u32(out, checked_u32(b.y, "box y"));
    put_u32(out, checked_u32(b.w, "box w"));
    put_u32(out, checked_u32(b.h, "box h"));
    for (float v : block.row(i)) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

DescriptorBlock decode_block(const std::string& bytes, std::string image_id,
                             std::size_t expected_dim, const std::string& source) {
  if (bytes.size() < sizeof(kBlockMagic) ||
      std::memcmp(bytes.data(), kBlockMagic, sizeof(kBlockMagic)) != 0) {
    throw BlockMagicError(fmt::format("{}: not a descriptor block (bad magic)", source));
  }
  if (bytes.size() < kBlockHeaderSize) {
    throw BlockTruncatedError(fmt::format("{}: truncated header", source));
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint16_t version = static_cast<std::uint16_t>(p[6] | (p[7] << 8));
  if (version != kBlockVersion) {
    throw BlockVersionError(fmt::format("{}: unsupported block version {}", source, version));
  }
  const std::uint32_t n = get_u32(p + 8);
  const std::uint32_t d = get_u32(p + 12);
  const ImageDims dims{static_cast<int>(get_u32(p + 16)), static_cast<int>(get_u32(p + 20))};
  if (expected_dim != 0 && d != expected_dim) {
    throw BlockDimError(
        fmt::format("{}: descriptor dim {} but {} expected", source, d, expected_dim));
  }
  if (n > 0 && d == 0) throw BlockDimError(fmt::format("{}: zero descriptor dim", source));

  const std::uint64_t record = 16 + 4ULL * d;
  const std::uint64_t need = kBlockHeaderSize + record * n;
  if (bytes.size() < need) {
    throw BlockTruncatedError(fmt::format("{}: truncated payload ({} of {} bytes)", source,
                                           bytes.size(), need));
  }
  if (bytes.size() > need) {
    throw BlockTruncatedError(
        fmt::format("{}: {} trailing bytes after payload", source, bytes.size() - need));
  }

  std::vector<BoundingBox> boxes;
  boxes.reserve(n);
  std::vector<float> data;
  data.reserve(static_cast<std::size_t>(n) * d);
  const unsigned char* q = p + kBlockHeaderSize;
  for (std::uint32_t i = 0; i < n; ++i) {
    boxes.push_back(BoundingBox{static_cast<int>(get_u32(q)), static_cast<int>(get_u32(q + 4)),
                                static_cast<int>(get_u32(q + 8)),
                                static_cast<int>(get_u32(q + 12))});
    q += 16;
    for (std::uint32_t k = 0; k < d; ++k, q += 4) data.push_back(std::bit_cast<float>(get_u32(q)));
  }
  LandmarkSet set;
  try {
    set = make_landmark_set(std::move(image_id), dims, boxes);
  } catch (const GeometryError& e) {
    throw ValidationError(fmt::format("{}: {}", source, e.what()));
  }
  return DescriptorBlock(std::move(set), d, std::move(data));
}

std::string block_filename(const std::string& image_id) { return image_id + ".lmdb1"; }

void write_block(const DescriptorBlock& block, const std::filesystem::path& path) {
  const std::string bytes = encode_block(block);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(fmt::format("write failed for {}", path.string()));
  }
  std::filesystem::rename(tmp, path);
}

DescriptorBlock read_block(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open descriptor block {}", path.string()));
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::string id = path.filename().string();
  if (id.ends_with(".lmdb1")) id.resize(id.size() - 6);
  return decode_block(bytes, std::move(id), expected_dim, path.string());
}

}  // namespace lmvpr
