// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <chrono>
#include <string>

namespace lmvpr {

enum class Stage { kLandmarks = 0, kDescriptors = 1, kMatching = 2 };
inline constexpr std::size_t kStageCount = 3;

const char* stage_name(Stage stage);

// Wall-clock accounting for the three pipeline stages: landmark generation
// (per image), descriptor computation (per image) and matching plus the
// remaining steps (per image pair).
class StageTimer {
 public:
  using Clock = std::chrono::steady_clock;

  class Scope {
   public:
    Scope(StageTimer& timer, Stage stage) : timer_(timer), stage_(stage), start_(Clock::now()) {}
    ~Scope() { timer_.add(stage_, Clock::now() - start_, 0); }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    StageTimer& timer_;
    Stage stage_;
    Clock::time_point start_;
  };

  [[nodiscard]] Scope measure(Stage stage) { return Scope(*this, stage); }

  void add(Stage stage, Clock::duration elapsed, std::size_t units);
  void add_units(Stage stage, std::size_t units) { units_[index(stage)] += units; }
  void set_wall(Clock::duration wall) { wall_ = wall; }

  [[nodiscard]] double seconds(Stage stage) const;
  [[nodiscard]] std::size_t units(Stage stage) const { return units_[index(stage)]; }
  // Mean seconds per unit (image or image pair); 0 when nothing was counted.
  [[nodiscard]] double mean_seconds(Stage stage) const;
  [[nodiscard]] double stage_sum_seconds() const;
  // Wall time of the whole run, when recorded; otherwise the stage sum.
  [[nodiscard]] double wall_seconds() const;

  void merge(const StageTimer& other);

 private:
  static std::size_t index(Stage s) { return static_cast<std::size_t>(s); }

  std::array<Clock::duration, kStageCount> elapsed_{};
  std::array<std::size_t, kStageCount> units_{};
  Clock::duration wall_{};
};

// Stage-per-row table: stage,total_seconds,units,mean_seconds plus a total row.
std::string format_timing_table(const StageTimer& timer, const std::string& header = {});

// extract_landmarks_s,compute_features_s,remaining_steps_s in one row, each
// the cost of matching two images: two images' worth of landmark and
// feature cost plus one pair's matching cost.
std::string format_cost_table(const StageTimer& timer, const std::string& method,
                              const std::string& header = {});

}  // namespace lmvpr
