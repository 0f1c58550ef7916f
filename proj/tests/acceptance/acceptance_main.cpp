// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. One line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli/run_config.hpp"
#include "lmvpr/lmvpr.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace lmvpr;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kDenseBudgetSeconds = 1e-3;       // per image
constexpr double kMatchingBudgetSeconds = 10.0;    // 200 oracle instances
constexpr double kArithmeticTol = 1e-9;
constexpr double kSelfSimilarityTol = 1e-9;
constexpr double kSoftNmsTol = 1e-9;
constexpr double kPenaltyAtHalf = 0.6065;          // e^{-0.5^2/0.5}, 4 decimals
constexpr double kPenaltyDisplayTol = 5e-5;
constexpr double kProjectionDistortion = 0.05;    // mean |d' - d|
constexpr double kEndToEndRecall = 0.9;
constexpr double kEndToEndBudgetSeconds = 60.0;
constexpr double kStageSpeedup = 100.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Failures {
  std::vector<std::string> messages;
  void check(bool ok, const std::string& what) {
    if (!ok && messages.size() < 5) messages.push_back(what);
    all_ok = all_ok && ok;
  }
  bool all_ok = true;
  Outcome outcome(const std::string& detail) const {
    std::string d = detail;
    for (const auto& m : messages) d += "; " + m;
    return {all_ok, d};
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path fixture(const std::string& name) { return fs::path(LMVPR_CONFIG_DIR) / name; }

// ---- 1 ------------------------------------------------------------------

Outcome dense_sampling_contract() {
  Failures f;
  const auto spec = cli::load_run_config(fixture("default.json"));
  const auto& s = std::get<DenseSource>(spec.landmarks).spec;
  f.check(s == ScaleSpec::default_spec(), "default.json differs from the built-in default");

  std::vector<ImageDims> sizes{{100, 100}, {101, 157}, {320, 240}, {640, 480}, {1920, 1080}, {1000, 100}};
  std::mt19937_64 rng(11);
  for (int i = 0; i < 40; ++i) {
    sizes.push_back({100 + static_cast<int>(rng() % 1900), 100 + static_cast<int>(rng() % 1900)});
  }
  for (const auto& dims : sizes) {
    const auto set = dense_sample(dims, s);
    f.check(set.size() == 100, fmt::format("{}x{}: {} boxes", dims.width, dims.height, set.size()));
    std::size_t offset = 0;
    for (const auto& level : s.levels) {
      const double side = std::sqrt(level.normalized_scale);
      std::vector<BoundingBox> boxes;
      for (int k = 0; k < level.count; ++k) {
        const auto& b = set.landmarks[offset + static_cast<std::size_t>(k)].box;
        boxes.push_back(b);
        f.check(b.fits(dims), fmt::format("{}x{}: box {} out of bounds", dims.width, dims.height, to_string(b)));
        f.check(std::abs(b.w - side * dims.width) <= 0.5 + 1e-9 &&
                    std::abs(b.h - side * dims.height) <= 0.5 + 1e-9,
                fmt::format("{}x{}: box {} off the image aspect", dims.width, dims.height, to_string(b)));
      }
      offset += static_cast<std::size_t>(level.count);
      const auto heat = coverage_heatmap(make_landmark_set("lvl", dims, boxes));
      f.check(heat.min() >= 1, fmt::format("{}x{}: level {} leaves pixels uncovered", dims.width,
                                           dims.height, level.normalized_scale));
    }
  }

  const ImageDims timed{640, 480};
  constexpr int kReps = 2000;
  std::size_t sink = 0;
  const auto start = Clock::now();
  for (int i = 0; i < kReps; ++i) sink += dense_sample(timed, s).size();
  const double per_image = seconds_since(start) / kReps;
  f.check(sink == 100u * kReps, "timing loop lost boxes");
  f.check(per_image < kDenseBudgetSeconds, fmt::format("{:.3g} s per image", per_image));
  return f.outcome(fmt::format("{} image sizes, {:.2f} us per 640x480 image", sizes.size(), per_image * 1e6));
}

// ---- 2 ------------------------------------------------------------------

Outcome level_grid_configs() {
  Failures f;
  const int expected[6] = {100, 100, 98, 98, 100, 96};
  std::string got;
  for (int k = 1; k <= 6; ++k) {
    const auto cfg = cli::load_run_config(fixture(fmt::format("levels_set{}.json", k)));
    const auto& spec = std::get<DenseSource>(cfg.landmarks).spec;
    const auto n = static_cast<int>(dense_sample({640, 480}, spec).size());
    f.check(n == expected[k - 1], fmt::format("set {}: {} boxes, expected {}", k, n, expected[k - 1]));
    got += fmt::format("{}{}", k == 1 ? "" : ",", n);
  }
  return f.outcome("totals " + got);
}

// ---- 3 ------------------------------------------------------------------

Outcome matching_oracle() {
  Failures f;
  std::mt19937_64 rng(3);
  const auto start = Clock::now();
  std::size_t total_pairs = 0, tied = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t na = 1 + rng() % 16, nb = 1 + rng() % 16, dim = 1 + rng() % 8;
    auto a = synthetic::random_block(rng, na, dim, "a");
    auto b = synthetic::random_block(rng, nb, dim, "b");
    if (t % 4 == 0 && na > 1 && nb > 1) {
      // Duplicate rows on both sides to force distance ties.
      std::vector<float> da(a.data().begin(), a.data().end()), db(b.data().begin(), b.data().end());
      std::copy_n(da.begin(), dim, da.begin() + static_cast<std::ptrdiff_t>(dim));
      std::copy_n(da.begin(), dim, db.begin());
      std::copy_n(da.begin(), dim, db.begin() + static_cast<std::ptrdiff_t>(dim));
      a = DescriptorBlock(a.landmarks(), dim, std::move(da));
      b = DescriptorBlock(b.landmarks(), dim, std::move(db));
      ++tied;
    }
    const auto got = reciprocal_matches(a, b);
    const auto want = oracle::mutual_nn(a, b);
    f.check(got == want, fmt::format("instance {} ({}x{}, dim {}) differs", t, na, nb, dim));
    total_pairs += got.size();
  }
  const double elapsed = seconds_since(start);
  f.check(elapsed < kMatchingBudgetSeconds, fmt::format("{:.2f} s", elapsed));
  return f.outcome(fmt::format("200 instances ({} with ties), {} pairs, {:.3f} s", tied, total_pairs, elapsed));
}

// ---- 4 ------------------------------------------------------------------

Outcome similarity_arithmetic() {
  Failures f;
  auto near = [&](double got, double want, const std::string& what) {
    f.check(std::abs(got - want) <= kArithmeticTol, fmt::format("{}: {} vs {}", what, got, want));
  };
  near(shape_similarity({0, 0, 100, 100}, {0, 0, 50, 100}, ShapeExponentSign::kNegative),
       std::exp(-0.25), "shape (100,100)/(50,100)");
  near(shape_similarity({0, 0, 100, 100}, {0, 0, 50, 100}, ShapeExponentSign::kPositiveAsPrinted),
       std::exp(0.25), "shape, positive sign");
  near(shape_similarity({3, 4, 20, 30}, {0, 0, 20, 30}), 1.0, "identical shape");
  near(image_similarity({{0, 0, 0.2, 1.0, 0.8}}, 100, 100), 0.008, "single match");
  near(image_similarity({}, 10, 7), 0.0, "no matches");

  // Two-image toy: query landmarks e0 (50x50), e1 (20x40); reference (3,4) 40x40, (0,1) 20x20.
  // Only (e1, (0,1)) is mutual: d = 0, so S = 1/sqrt(2*2).
  const ImageDims dims{100, 100};
  const DescriptorBlock q(make_landmark_set("q", dims, {{0, 0, 50, 50}, {0, 0, 20, 40}}), 2, {1, 0, 0, 1});
  const DescriptorBlock r(make_landmark_set("r", dims, {{0, 0, 40, 40}, {0, 0, 20, 20}}), 2, {3, 4, 0, 1});
  near(compare_images(q, r, {}).similarity, 0.5, "toy pair");
  // (1,1) 40x40 against (1,0) 50x25: d = 1 - 1/sqrt2, s = exp(-(10/50 + 15/40)/2).
  const DescriptorBlock q1(make_landmark_set("q1", dims, {{0, 0, 40, 40}}), 2, {1, 1});
  const DescriptorBlock r1(make_landmark_set("r1", dims, {{0, 0, 50, 25}}), 2, {1, 0});
  near(compare_images(q1, r1, {}).similarity, 1.0 - (1.0 - 1.0 / std::sqrt(2.0)) * std::exp(-0.2875),
       "single-landmark pair");

  // Self-similarity on blocks with pairwise-distinct rows.
  std::mt19937_64 rng(4);
  double worst = 0.0;
  std::vector<DescriptorBlock> blocks;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + rng() % 100;
    const std::size_t dim = 2 + rng() % 63;
    blocks.push_back(synthetic::random_block(rng, n, dim));
  }
  const auto img = synthetic::smooth_image(320, 240, 5);
  blocks.push_back(describe_landmarks(img, dense_sample(img.dims(), ScaleSpec::default_spec(), "img")));
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = i + 1; j < b.size(); ++j) {
        // Distinct under the matching metric: no two rows share a direction.
        f.check(cosine_distance(b.row(i), b.row(j)).value > 0.0,
                "self-similarity block has parallel rows");
      }
    }
    worst = std::max(worst, std::abs(compare_images(b, b, {}).similarity - 1.0));
  }
  f.check(worst <= kSelfSimilarityTol, fmt::format("self-similarity off by {}", worst));
  return f.outcome(fmt::format("hand cases within {}, self-similarity max error {:.2g} over {} blocks",
                               kArithmeticTol, worst, blocks.size()));
}

// ---- 5 ------------------------------------------------------------------

ProposalList random_proposals(std::mt19937_64& rng, std::size_t n, const ImageDims& dims) {
  ProposalList p;
  p.image_id = "p";
  p.dims = dims;
  std::uniform_real_distribution<double> frac(0.03, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int w = std::max(1, static_cast<int>(frac(rng) * dims.width));
    const int h = std::max(1, static_cast<int>(frac(rng) * dims.height));
    const int x = static_cast<int>(rng() % static_cast<std::uint64_t>(dims.width - w + 1));
    const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(dims.height - h + 1));
    p.boxes.push_back({x, y, w, h});
  }
  return p;
}

Outcome selection_schemes() {
  Failures f;
  std::mt19937_64 rng(5);
  const ImageDims dims{640, 480};
  std::size_t kept1 = 0, kept2 = 0, kept3 = 0;
  const std::vector<std::vector<int>> priorities{{5, 6, 8, 9, 4}, {5, 6, 7, 8, 9, 4}};
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 300 + rng() % 1200;
    const auto p = random_proposals(rng, n, dims);
    std::vector<int> scale(p.boxes.size());
    for (std::size_t i = 0; i < p.boxes.size(); ++i) scale[i] = make_landmark(p.boxes[i], dims).scale_index;

    SelectionConfig cfg;
    const auto s1 = select_scheme1(p, cfg).landmarks;
    std::vector<BoundingBox> want1;
    for (std::size_t i = 0; i < p.boxes.size() && want1.size() < 100; ++i) {
      if (scale[i] >= 4) want1.push_back(p.boxes[i]);
    }
    for (const auto& l : s1.landmarks) f.check(l.scale_index >= 4, "scheme 1 kept a small box");
    f.check(s1.boxes() == want1, fmt::format("trial {}: scheme 1 differs from rank-order filter", trial));
    kept1 += s1.size();

    for (const auto& prio : priorities) {
      cfg.scale_priority = prio;
      const auto s2 = select_scheme2(p, cfg).landmarks;
      std::vector<BoundingBox> want2;
      for (int k : prio) {
        for (std::size_t i = 0; i < p.boxes.size() && want2.size() < 100; ++i) {
          if (scale[i] == k) want2.push_back(p.boxes[i]);
        }
      }
      f.check(s2.boxes() == want2, fmt::format("trial {}: scheme 2 grouping differs", trial));
      std::size_t group = 0;
      for (const auto& l : s2.landmarks) {
        while (group < prio.size() && prio[group] != l.scale_index) ++group;
        f.check(group < prio.size(), "scheme 2 out of priority order");
      }
      kept2 += s2.size();
    }

    for (double t : {0.4, 0.5, 0.6, 0.7}) {
      cfg.iou_threshold = t;
      const auto s3 = select_overlap(p, cfg).landmarks;
      f.check(!s3.empty() && s3.landmarks[0].box == p.boxes[0], "overlap scheme dropped the first box");
      double worst = 0.0;
      for (std::size_t i = 0; i < s3.size(); ++i) {
        for (std::size_t j = i + 1; j < s3.size(); ++j) {
          worst = std::max(worst, iou(s3.landmarks[i].box, s3.landmarks[j].box));
        }
      }
      f.check(worst <= t, fmt::format("trial {}: max IoU {} > {}", trial, worst, t));
      kept3 += s3.size();
    }
  }
  return f.outcome(fmt::format("40 lists; kept {} / {} / {} boxes (schemes 1/2/3)", kept1, kept2, kept3));
}

// ---- 6 ------------------------------------------------------------------

std::vector<MatchPair> pairs_with_scores(const std::vector<double>& scores) {
  std::vector<MatchPair> out;
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({i, i, 0.0, 1.0, scores[i]});
  return out;
}

Outcome soft_nms() {
  Failures f;
  SoftNmsConfig cfg{0.3, 0.5, BoxSide::kQuery};
  // Six boxes on one row, so IoU is overlap width over union width.
  const ImageDims dims{200, 20};
  const std::vector<BoundingBox> boxes{{0, 0, 10, 10},  {5, 0, 10, 10},  {2, 0, 10, 10},
                                       {40, 0, 10, 10}, {45, 0, 10, 10}, {100, 0, 10, 10}};
  const auto set = make_landmark_set("q", dims, boxes);
  const std::vector<double> scores{0.95, 0.90, 0.85, 0.60, 0.55, 0.50};
  // Hand trace, t = 0.3, sigma = 0.5. Pick 0: IoU(1,0) = 1/3, IoU(2,0) = 2/3.
  // Pick 1 (0.9 e^{-2/9}): IoU(2,1) = 7/13. Pick 3: IoU(4,3) = 1/3. Then 5, 4, 2.
  const std::vector<double> hand{0.95,
                                 0.90 * std::exp(-2.0 / 9.0),
                                 0.85 * std::exp(-8.0 / 9.0 - 98.0 / 169.0),
                                 0.60,
                                 0.55 * std::exp(-2.0 / 9.0),
                                 0.50};
  const auto got = soft_nms_rescore(pairs_with_scores(scores), set, cfg);
  const auto trace = oracle::soft_nms_trace(boxes, scores, cfg.iou_threshold, cfg.sigma);
  double worst = 0.0;
  for (std::size_t i = 0; i < hand.size(); ++i) {
    worst = std::max({worst, std::abs(got[i].score - hand[i]), std::abs(trace[i] - hand[i])});
  }
  f.check(worst <= kSoftNmsTol, fmt::format("6-match trace off by {}", worst));

  const double penalty = std::exp(-0.5 * 0.5 / 0.5);
  f.check(std::abs(penalty - kPenaltyAtHalf) <= kPenaltyDisplayTol, fmt::format("penalty {}", penalty));
  // IoU exactly 0.5: (0,0,20,10) vs (0,0,10,10) has IoU 100/200.
  const auto half = soft_nms_rescore(pairs_with_scores({1.0, 1.0 - 1e-12}),
                                     make_landmark_set("h", dims, {{0, 0, 20, 10}, {0, 0, 10, 10}}), cfg);
  f.check(std::abs(half[1].score / (1.0 - 1e-12) - penalty) <= 1e-12, "penalty at IoU 0.5");

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<BoundingBox> bx;
    std::vector<double> sc;
    for (std::size_t i = 0; i < n; ++i) {
      const int w = 5 + static_cast<int>(rng() % 60), h = 2 + static_cast<int>(rng() % 15);
      bx.push_back({static_cast<int>(rng() % (200 - w)), static_cast<int>(rng() % (20 - h)), w, h});
      sc.push_back(u(rng));
    }
    const auto out = soft_nms_rescore(pairs_with_scores(sc), make_landmark_set("r", dims, bx), cfg);
    const double max_in = *std::max_element(sc.begin(), sc.end());
    double max_out = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
      f.check(out[i].score <= sc[i], fmt::format("instance {}: score {} grew", t, i));
      max_out = std::max(max_out, out[i].score);
    }
    f.check(max_out == max_in, fmt::format("instance {}: global max changed", t));
  }
  return f.outcome(fmt::format("6-match trace error {:.2g}, penalty(0.5) = {:.4f}, 500 property instances",
                               worst, penalty));
}

// ---- 7 ------------------------------------------------------------------

Outcome pr_evaluator() {
  Failures f;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.2, 1.0);
  const auto grid = uniform_thresholds(101);
  std::size_t points = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t rows = 1 + rng() % 20, cols = 2 + rng() % 19;
    std::vector<std::vector<double>> sims(rows, std::vector<double>(cols));
    SimilarityMatrix m(rows, cols);
    for (std::size_t q = 0; q < rows; ++q) {
      for (std::size_t r = 0; r < cols; ++r) {
        // A few exact ties exercise the lowest-index rule.
        sims[q][r] = (rng() % 10 == 0 && r > 0) ? sims[q][r - 1] : u(rng);
        m.at(q, r) = sims[q][r];
      }
    }
    std::vector<std::optional<std::size_t>> truth(rows);
    for (auto& g : truth) {
      if (rng() % 6 != 0) g = rng() % cols;
    }
    const int tol = static_cast<int>(rng() % 3);
    const auto curve = pr_curve(m, GroundTruth{truth, tol}, grid);
    const auto brute = oracle::pr_brute_force(sims, truth, tol, grid);
    double prev = -1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& p = curve.points[k];
      f.check(p.true_positives == brute[k].tp && p.false_positives == brute[k].fp &&
                  p.precision == brute[k].precision && p.recall == brute[k].recall,
              fmt::format("matrix {} threshold {}: curve differs", t, grid[k]));
      f.check(p.recall >= prev, fmt::format("matrix {}: recall decreases at {}", t, grid[k]));
      prev = p.recall;
      ++points;
    }
  }
  return f.outcome(fmt::format("100 matrices, {} curve points equal the brute-force evaluator", points));
}

// ---- 8 ------------------------------------------------------------------

double cosine_distance64(std::span<const float> a, std::span<const float> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  return 1.0 - ab / std::sqrt(aa * bb);
}

Outcome random_projection_check() {
  Failures f;
  constexpr std::size_t kSource = 4096, kTarget = 1024, kPairs = 500;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> corr(0.0, 1.0);
  std::vector<std::vector<float>> vecs;
  for (std::size_t p = 0; p < kPairs; ++p) {
    std::vector<float> x(kSource), y(kSource);
    const double rho = corr(rng);
    for (std::size_t i = 0; i < kSource; ++i) {
      const double a = normal(rng), b = normal(rng);
      x[i] = static_cast<float>(a);
      y[i] = static_cast<float>(rho * a + std::sqrt(1.0 - rho * rho) * b);
    }
    vecs.push_back(std::move(x));
    vecs.push_back(std::move(y));
  }
  std::vector<std::span<const float>> spans(vecs.begin(), vecs.end());

  const ProjectionConfig cfg{kTarget, 2024};
  const auto start = Clock::now();
  const auto projected = GaussianProjector(kSource, cfg).project_many(spans);
  const double elapsed = seconds_since(start);
  const auto again = GaussianProjector(kSource, cfg).project_many(spans);

  double sum = 0.0, worst = 0.0;
  for (std::size_t p = 0; p < kPairs; ++p) {
    const double before = cosine_distance64(vecs[2 * p], vecs[2 * p + 1]);
    const double after = cosine_distance64(projected[2 * p], projected[2 * p + 1]);
    sum += std::abs(after - before);
    worst = std::max(worst, std::abs(after - before));
  }
  const double mean = sum / kPairs;
  f.check(mean < kProjectionDistortion, fmt::format("mean distortion {}", mean));

  bool identical = projected.size() == again.size();
  for (std::size_t i = 0; identical && i < projected.size(); ++i) {
    identical = projected[i].size() == kTarget &&
                std::memcmp(projected[i].data(), again[i].data(), kTarget * sizeof(float)) == 0;
  }
  f.check(identical, "rerun is not byte-identical");
  // The single-vector path uses the same G.
  const auto single = random_projection(Descriptor{vecs[17]}, cfg);
  f.check(std::memcmp(single.values.data(), projected[17].data(), kTarget * sizeof(float)) == 0,
          "single-vector projection differs from the batch");
  return f.outcome(fmt::format("{} pairs {}->{}: mean distortion {:.4f} (max {:.4f}), {:.2f} s, byte-identical",
                               kPairs, kSource, kTarget, mean, worst, elapsed));
}

// ---- 9 and 10 -----------------------------------------------------------

struct EndToEnd {
  double dense_recall = 0.0;
  double baseline_recall = 0.0;
  double elapsed = 0.0;
  StageTimer timer;
  std::size_t errors = 0;
  bool ran = false;
};

EndToEnd& end_to_end() {
  static EndToEnd e = [] {
    EndToEnd r;
    const auto start = Clock::now();
    synthetic::TempDir dir("lmvpr-accept");
    synthetic::PlaceDatasetConfig data_cfg;  // 20 places, 10-20% shift
    const auto manifest = load_manifest(
        synthetic::write_place_dataset(synthetic::make_place_dataset(data_cfg), dir.path(), 0));

    auto dense = cli::to_pipeline(cli::load_run_config(fixture("default.json")));
    auto baseline = cli::to_pipeline(cli::load_run_config(fixture("full_image_baseline.json")));
    dense.threads = baseline.threads = 1;
    const auto grid = uniform_thresholds(101);
    auto run = run_pipeline(manifest, dense);
    r.dense_recall = recall_at_full_precision(pr_curve(run.matrix, manifest.ground_truth, grid));
    r.timer = run.timer;
    r.errors = run.errors.size();
    const auto base = run_pipeline(manifest, baseline);
    r.baseline_recall = recall_at_full_precision(pr_curve(base.matrix, manifest.ground_truth, grid));
    r.errors += base.errors.size();
    r.elapsed = seconds_since(start);
    r.ran = true;
    return r;
  }();
  return e;
}

Outcome synthetic_end_to_end() {
  Failures f;
  const auto& e = end_to_end();
  f.check(e.errors == 0, fmt::format("{} image errors", e.errors));
  f.check(e.dense_recall >= kEndToEndRecall, fmt::format("dense recall {}", e.dense_recall));
  f.check(e.dense_recall > e.baseline_recall,
          fmt::format("dense {} does not beat baseline {}", e.dense_recall, e.baseline_recall));
  f.check(e.elapsed < kEndToEndBudgetSeconds, fmt::format("{:.1f} s", e.elapsed));
  return f.outcome(fmt::format("recall at precision 1: dense {:.2f}, full-image baseline {:.2f}, {:.1f} s",
                               e.dense_recall, e.baseline_recall, e.elapsed));
}

Outcome timing_harness() {
  Failures f;
  const auto& t = end_to_end().timer;
  const double lm = t.mean_seconds(Stage::kLandmarks);
  const double desc = t.mean_seconds(Stage::kDescriptors);
  f.check(t.units(Stage::kLandmarks) == 40 && t.units(Stage::kDescriptors) == 40, "stage unit counts");
  f.check(lm > 0.0, "landmark stage not timed");
  f.check(desc >= kStageSpeedup * lm, fmt::format("descriptors only {:.1f}x slower", desc / lm));
  const auto table = format_cost_table(t, "dense");
  const auto nl = table.find('\n');
  f.check(table.substr(0, nl) == "method,extract_landmarks_s,compute_features_s,remaining_steps_s",
          "cost table header");
  const auto row = table.substr(nl + 1);
  f.check(std::count(row.begin(), row.end(), ',') == 3, "cost table row shape");
  std::fputs(table.c_str(), stdout);
  return f.outcome(fmt::format("landmarks {:.3g} s/image, descriptors {:.3g} s/image ({:.0f}x)", lm, desc,
                               desc / lm));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"dense sampling contract", dense_sampling_contract},
      {"level grid configs", level_grid_configs},
      {"matching oracle", matching_oracle},
      {"similarity arithmetic", similarity_arithmetic},
      {"selection schemes", selection_schemes},
      {"soft-nms", soft_nms},
      {"pr evaluator", pr_evaluator},
      {"random projection", random_projection_check},
      {"synthetic end-to-end", synthetic_end_to_end},
      {"timing harness", timing_harness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
