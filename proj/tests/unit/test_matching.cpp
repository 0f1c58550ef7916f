// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "lmvpr/error.hpp"
#include "lmvpr/matching.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace lmvpr {
namespace {

TEST(ReciprocalMatches, IdentityBlockMatchesItself) {
  std::mt19937_64 rng(1);
  const auto a = synthetic::random_block(rng, 12, 6);
  const auto m = reciprocal_matches(a, a);
  ASSERT_EQ(m.size(), 12u);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(m[i].query_idx, i);
    EXPECT_EQ(m[i].ref_idx, i);
    EXPECT_NEAR(m[i].d, 0.0, 1e-12);
  }
}

TEST(ReciprocalMatches, SingleLandmarksAlwaysPair) {
  std::mt19937_64 rng(2);
  const auto a = synthetic::random_block(rng, 1, 4);
  const auto b = synthetic::random_block(rng, 1, 4);
  EXPECT_EQ(reciprocal_matches(a, b).size(), 1u);
}

TEST(ReciprocalMatches, DimMismatchThrows) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(reciprocal_matches(synthetic::random_block(rng, 3, 4), synthetic::random_block(rng, 3, 5)),
               DataError);
}

TEST(ReciprocalMatches, TiesGoToLowestIndex) {
  // Two identical reference rows: the query's NN is the first.
  const auto qs = make_landmark_set("q", {10, 10}, {{0, 0, 1, 1}});
  const auto rs = make_landmark_set("r", {10, 10}, {{0, 0, 1, 1}, {1, 1, 1, 1}});
  const DescriptorBlock q(qs, 2, {1, 0});
  const DescriptorBlock r(rs, 2, {1, 0, 1, 0});
  const auto m = reciprocal_matches(q, r);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].ref_idx, 0u);
}

TEST(ReciprocalMatches, EqualsBruteForceOracle) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto a = synthetic::random_block(rng, 8, 8, "a");
    const auto b = synthetic::random_block(rng, 8, 8, "b");
    EXPECT_EQ(reciprocal_matches(a, b), oracle::mutual_nn(a, b));
  }
}

TEST(ReciprocalMatches, InjectiveAndSubsetOfOneWayNN) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t na = 1 + rng() % 20;
    const std::size_t dim = 1 + rng() % 8;
    const auto a = synthetic::random_block(rng, na, dim, "a");
    const std::size_t nb = 1 + rng() % 20;
    const auto b = synthetic::random_block(rng, nb, dim, "b");
    const auto m = reciprocal_matches(a, b);
    const auto dist = distance_matrix(a, b);
    std::set<std::size_t> qs, rs;
    for (const auto& c : m) {
      EXPECT_TRUE(qs.insert(c.query_idx).second);
      EXPECT_TRUE(rs.insert(c.ref_idx).second);
      for (std::size_t j = 0; j < b.size(); ++j) EXPECT_LE(c.d, dist.at(c.query_idx, j));
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(c.d, dist.at(i, c.ref_idx));
    }
  }
}

TEST(ShapeSimilarity, Arithmetic) {
  const BoundingBox a{0, 0, 100, 100};
  EXPECT_DOUBLE_EQ(shape_similarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(shape_similarity(a, a, ShapeExponentSign::kPositiveAsPrinted), 1.0);
  EXPECT_NEAR(shape_similarity(a, {0, 0, 50, 100}), std::exp(-0.25), 1e-12);
  EXPECT_NEAR(shape_similarity(a, {0, 0, 50, 100}), 0.7788007830714049, 1e-12);
  EXPECT_NEAR(shape_similarity(a, {0, 0, 50, 100}, ShapeExponentSign::kPositiveAsPrinted),
              1.2840254166877414, 1e-12);
}

TEST(ImageSimilarity, Arithmetic) {
  EXPECT_NEAR(image_similarity({{0, 0, 0.2, 1.0, 0.8}}, 100, 100), 0.008, 1e-12);
  EXPECT_DOUBLE_EQ(image_similarity({}, 100, 100), 0.0);
  EXPECT_THROW(image_similarity({}, 0, 100), DataError);
}

TEST(ImageSimilarity, NegativeContributionsAreKept) {
  const std::vector<MatchPair> m{{0, 0, 1.5, 1.0, 1.0 - 1.5}};
  EXPECT_DOUBLE_EQ(image_similarity(m, 1, 1), -0.5);
}

TEST(ImageSimilarity, AddingPositiveMatchIncreases) {
  std::vector<MatchPair> m{{0, 0, 0.3, 0.9, 1 - 0.27}};
  const double before = image_similarity(m, 50, 60);
  m.push_back({1, 1, 0.5, 0.8, 0.6});
  EXPECT_GT(image_similarity(m, 50, 60), before);
}

TEST(CompareImages, SelfSimilarityIsOne) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng() % 50;
    const auto a = synthetic::random_block(rng, n, 16);
    EXPECT_NEAR(compare_images(a, a, {}).similarity, 1.0, 1e-9);
  }
}

TEST(CompareImages, Symmetric) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const std::size_t na = 1 + rng() % 30;
    const auto a = synthetic::random_block(rng, na, 8, "a");
    const std::size_t nb = 1 + rng() % 30;
    const auto b = synthetic::random_block(rng, nb, 8, "b");
    EXPECT_NEAR(compare_images(a, b, {}).similarity, compare_images(b, a, {}).similarity, 1e-12);
  }
}

TEST(SoftNms, DisjointBoxesUnchanged) {
  const auto set = make_landmark_set("q", {100, 100}, {{0, 0, 10, 10}, {20, 0, 10, 10}, {40, 40, 5, 5}});
  std::vector<MatchPair> m{{0, 0, 0, 1, 0.9}, {1, 1, 0, 1, 0.8}, {2, 2, 0, 1, 0.95}};
  const auto out = soft_nms_rescore(m, set, {0.3, 0.5});
  EXPECT_EQ(out, m);
}

TEST(SoftNms, TwoMatchesHandArithmetic) {
  // Boxes with IoU exactly 0.5: [0,60)x[0,10) vs [20,80)x[0,10) = 40/80.
  const auto set = make_landmark_set("q", {100, 100}, {{0, 0, 60, 10}, {20, 0, 60, 10}});
  ASSERT_DOUBLE_EQ(iou(set.landmarks[0].box, set.landmarks[1].box), 0.5);
  const std::vector<MatchPair> m{{0, 0, 0, 1, 0.9}, {1, 1, 0, 1, 0.8}};
  const auto out = soft_nms_rescore(m, set, {0.3, 0.5});
  EXPECT_DOUBLE_EQ(out[0].score, 0.9);
  EXPECT_NEAR(out[1].score, 0.8 * std::exp(-0.25 / 0.5), 1e-12);
  EXPECT_NEAR(out[1].score, 0.4852245277701325, 1e-12);
}

TEST(SoftNms, ReferenceSideUsesReferenceBoxes) {
  const auto refs = make_landmark_set("r", {100, 100}, {{0, 0, 60, 10}, {20, 0, 60, 10}});
  const std::vector<MatchPair> m{{5, 0, 0, 1, 0.9}, {9, 1, 0, 1, 0.8}};
  SoftNmsConfig cfg{0.3, 0.5, BoxSide::kReference};
  EXPECT_LT(soft_nms_rescore(m, refs, cfg)[1].score, 0.8);
}

TEST(SoftNms, MatchesLiteralTraceAndProperties) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pos(0, 40), len(10, 60);
  std::uniform_real_distribution<double> sc(0.1, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<BoundingBox> boxes;
    std::vector<MatchPair> m;
    std::vector<double> scores;
    for (std::size_t i = 0; i < n; ++i) {
      boxes.push_back({pos(rng), pos(rng), len(rng), len(rng)});
      scores.push_back(sc(rng));
      m.push_back({i, i, 0.0, 1.0, scores.back()});
    }
    const auto set = make_landmark_set("q", {100, 100}, boxes);
    const double t_iou = 0.3;
    const auto out = soft_nms_rescore(m, set, {t_iou, 0.5});
    const auto expected = oracle::soft_nms_trace(boxes, scores, t_iou, 0.5);
    double max_in = 0, max_out = 0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(out[i].score, expected[i], 1e-12);
      EXPECT_LE(out[i].score, scores[i]);
      EXPECT_EQ(out[i].query_idx, m[i].query_idx);
      max_in = std::max(max_in, scores[i]);
      max_out = std::max(max_out, out[i].score);
      // Untouched when no higher-scored match overlaps beyond t.
      bool overlapped = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && scores[j] >= scores[i] && iou(boxes[i], boxes[j]) > t_iou) overlapped = true;
      }
      if (!overlapped) EXPECT_DOUBLE_EQ(out[i].score, scores[i]);
    }
    EXPECT_DOUBLE_EQ(max_in, max_out);
  }
}

TEST(SoftNms, ConfigValidation) {
  const auto set = make_landmark_set("q", {10, 10}, {{0, 0, 1, 1}});
  EXPECT_THROW(soft_nms_rescore({}, set, {0.3, 0.0}), ConfigError);
  EXPECT_THROW(soft_nms_rescore({}, set, {1.5, 0.5}), ConfigError);
}

TEST(CompareImages, SoftNmsLowersOrKeepsSimilarity) {
  std::mt19937_64 rng(9);
  const GrayImage img = synthetic::smooth_image(120, 90, 3);
  const auto set = dense_sample(img.dims(), ScaleSpec::default_spec(), "a");
  const auto block = describe_landmarks(img, set);
  MatchConfig plain;
  MatchConfig soft;
  soft.soft_nms = SoftNmsConfig{0.3, 0.5};
  const double s_plain = compare_images(block, block, plain).similarity;
  const double s_soft = compare_images(block, block, soft).similarity;
  EXPECT_LT(s_soft, s_plain);
  EXPECT_GT(s_soft, 0.0);
}

}  // namespace
}  // namespace lmvpr
