// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "lmvpr/timing.hpp"

#include <fmt/format.h>

namespace lmvpr {

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kLandmarks: return "landmark_generation";
    case Stage::kDescriptors: return "descriptor_computation";
    case Stage::kMatching: return "matching_and_remaining";
  }
  return "unknown";
}

void StageTimer::add(Stage stage, Clock::duration elapsed, std::size_t units) {
  elapsed_[index(stage)] += elapsed;
  units_[index(stage)] += units;
}

double StageTimer::seconds(Stage stage) const {
  return std::chrono::duration<double>(elapsed_[index(stage)]).count();
}

double StageTimer::mean_seconds(Stage stage) const {
  const auto n = units_[index(stage)];
  return n == 0 ? 0.0 : seconds(stage) / static_cast<double>(n);
}

double StageTimer::stage_sum_seconds() const {
  double total = 0.0;
  for (std::size_t i = 0; i < kStageCount; ++i) total += seconds(static_cast<Stage>(i));
  return total;
}

double StageTimer::wall_seconds() const {
  return wall_ == Clock::duration{} ? stage_sum_seconds()
                                    : std::chrono::duration<double>(wall_).count();
}

void StageTimer::merge(const StageTimer& other) {
  for (std::size_t i = 0; i < kStageCount; ++i) {
    elapsed_[i] += other.elapsed_[i];
    units_[i] += other.units_[i];
  }
  wall_ += other.wall_;
}

std::string format_timing_table(const StageTimer& timer, const std::string& header) {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "stage,total_seconds,units,mean_seconds\n";
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto s = static_cast<Stage>(i);
    out += fmt::format("{},{:.9f},{},{:.9f}\n", stage_name(s), timer.seconds(s), timer.units(s),
                       timer.mean_seconds(s));
  }
  out += fmt::format("total,{:.9f},,\n", timer.wall_seconds());
  return out;
}

std::string format_cost_table(const StageTimer& timer, const std::string& method,
                              const std::string& header) {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "method,extract_landmarks_s,compute_features_s,remaining_steps_s\n";
  out += fmt::format("{},{:.9f},{:.9f},{:.9f}\n", method,
                     2.0 * timer.mean_seconds(Stage::kLandmarks),
                     2.0 * timer.mean_seconds(Stage::kDescriptors),
                     timer.mean_seconds(Stage::kMatching));
  return out;
}

}  // namespace lmvpr
