// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lmvpr::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kDataError = 2, kInternalError = 3 };

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool verbose = false;
};

const std::vector<std::string>& command_names();

// Runs one subcommand and maps failures onto exit codes. Diagnostics go to
// `err`; a one-line summary goes to `log`.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log,
                std::ostream& err);

}  // namespace lmvpr::cli
