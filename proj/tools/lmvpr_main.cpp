// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace lmvpr::cli;
  CLI::App app{"Landmark-based visual place recognition"};
  app.require_subcommand(1);

  std::string config, manifest, out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool verbose = false;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "Run config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Seed override");
    sub->add_option("--threads", threads, "Worker threads (0: all)");
    sub->add_flag("--verbose", verbose, "Per-image diagnostics");
    subs.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    CommandOptions opts;
    if (!config.empty()) opts.config = config;
    opts.manifest = manifest;
    if (!out.empty()) opts.out = out;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--threads")) opts.threads = threads;
    opts.verbose = verbose;
    return run_command(name, opts, std::cout, std::cerr);
  }
  return kInternalError;
}
