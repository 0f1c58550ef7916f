// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <string>

#include "lmvpr/descriptors.hpp"
#include "lmvpr/error.hpp"

namespace lmvpr {

// Descriptor block file, little-endian:
//   "LMDB1\0"  u16 version=1  u32 N  u32 D  u32 width  u32 height
//   N x { u32 x, u32 y, u32 w, u32 h, D x float32 }
inline constexpr char kBlockMagic[6] = {'L', 'M', 'D', 'B', '1', '\0'};
inline constexpr std::uint16_t kBlockVersion = 1;
inline constexpr std::size_t kBlockHeaderSize = 6 + 2 + 4 * 4;

class BlockMagicError : public ParseError {
 public:
  using ParseError::ParseError;
};
class BlockVersionError : public ParseError {
 public:
  using ParseError::ParseError;
};
class BlockDimError : public ParseError {
 public:
  using ParseError::ParseError;
};
class BlockTruncatedError : public ParseError {
 public:
  using ParseError::ParseError;
};

std::string encode_block(const DescriptorBlock& block);
// `image_id` labels the result; `expected_dim` of 0 accepts any dimension.
DescriptorBlock decode_block(const std::string& bytes, std::string image_id,
                             std::size_t expected_dim = 0, const std::string& source = "<memory>");

void write_block(const DescriptorBlock& block, const std::filesystem::path& path);
// The image id is the filename without the ".lmdb1" suffix.
DescriptorBlock read_block(const std::filesystem::path& path, std::size_t expected_dim = 0);

std::string block_filename(const std::string& image_id);

}  // namespace lmvpr
