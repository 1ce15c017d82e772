// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tod/errors.hpp"
#include "tod/metrics.hpp"

namespace tod {
namespace {

constexpr double kTol = 1e-12;

Box random_box(std::mt19937_64& rng, double span = 200.0, double max_side = 150.0) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> side(0.5, max_side);
  return Box(pos(rng), pos(rng), side(rng), side(rng));
}

TEST(MetricsTest, IoUShiftedBox) {
  const Box a(2.5, 4, 5, 8);
  EXPECT_NEAR(iou(a, Box(3.5, 5, 5, 8)), 28.0 / 52.0, kTol);
  EXPECT_NEAR(iou(a, Box(5.5, 7, 5, 8)), 10.0 / 70.0, kTol);
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, Box(100, 100, 5, 8)), 0.0);
}

TEST(MetricsTest, GeneralizedIoUFamily) {
  const Box a(1, 1, 2, 2);
  const Box b(5, 1, 2, 2);
  EXPECT_NEAR(giou(a, b), -1.0 / 3.0, kTol);
  EXPECT_NEAR(diou(a, b), -0.4, kTol);
  EXPECT_EQ(giou(a, a), 1.0);
  EXPECT_EQ(diou(a, a), 1.0);
  EXPECT_EQ(ciou(a, a), 1.0);

  const Box inner(10, 10, 4, 4);
  const Box outer(11, 10, 8, 6);
  EXPECT_NEAR(giou(inner, outer), iou(inner, outer), kTol);

  const Box big(10, 10, 12, 12);
  EXPECT_NEAR(diou(inner, big), iou(inner, big), kTol);
  // Same aspect ratio: the CIoU penalty vanishes.
  EXPECT_NEAR(ciou(inner, Box(13, 11, 8, 8)), diou(inner, Box(13, 11, 8, 8)), kTol);
}

TEST(MetricsTest, CIoUMatchesScalarScript) {
  // Evaluated independently: iou 1/3, rho 0, diag^2 32, v = 4/pi^2 (atan 2 - atan 0.5)^2.
  EXPECT_NEAR(ciou(Box(0, 0, 2, 4), Box(0, 0, 4, 2)), 0.29958166492265276, kTol);
}

TEST(MetricsTest, WassersteinExamples) {
  EXPECT_EQ(wasserstein_sq(to_gaussian(Box(10, 10, 8, 8)), to_gaussian(Box(11, 11, 8, 8))), 2.0);
  EXPECT_EQ(wasserstein_sq(to_gaussian(Box(0, 0, 4, 4)), to_gaussian(Box(0, 0, 8, 8))), 8.0);
  EXPECT_EQ(wasserstein_sq(to_gaussian(Box(3, 4, 5, 6)), to_gaussian(Box(3, 4, 5, 6))), 0.0);
  EXPECT_NEAR(gwd(Box(10, 10, 8, 8), Box(11, 11, 8, 8)), std::sqrt(2.0), kTol);
  EXPECT_NEAR(gwd(Box(0, 0, 4, 4), Box(0, 0, 8, 8)), std::sqrt(8.0), kTol);
  EXPECT_EQ(gwd(Box(1, 2, 3, 4), Box(1, 2, 3, 4)), 0.0);
}

TEST(MetricsTest, NwdExamples) {
  EXPECT_EQ(nwd(Box(1, 2, 3, 4), Box(1, 2, 3, 4), 12.7), 1.0);
  EXPECT_EQ(nwd(Box(1, 2, 3, 4), Box(1, 2, 3, 4), 0.001), 1.0);
  EXPECT_NEAR(nwd(Box(10, 10, 8, 8), Box(11, 11, 8, 8), 12.7), 0.894620745452132, kTol);
  EXPECT_THROW(nwd(Box(0, 0, 1, 1), Box(0, 0, 1, 1), 0.0), InvalidParameter);
  EXPECT_THROW(nwd(Box(0, 0, 1, 1), Box(0, 0, 1, 1), -3.0), InvalidParameter);
  EXPECT_THROW(nwd(Box(0, 0, 1, 1), Box(0, 0, 1, 1), INFINITY), InvalidParameter);
}

TEST(MetricsTest, NwdCoincidesAcrossScales) {
  for (int d = 0; d <= 30; ++d)
    EXPECT_EQ(nwd(Box(0, 0, 4, 4), Box(d, d, 4, 4), 12.7), nwd(Box(0, 0, 128, 128), Box(d, d, 128, 128), 12.7));
}

TEST(MetricsTest, ParseKind) {
  EXPECT_EQ(parse_metric_kind("NWD"), MetricKind::NWD);
  EXPECT_EQ(parse_metric_kind("giou"), MetricKind::GIoU);
  EXPECT_FALSE(parse_metric_kind("kld").has_value());
  for (auto kind : {MetricKind::IoU, MetricKind::GIoU, MetricKind::DIoU, MetricKind::CIoU, MetricKind::GWD,
                    MetricKind::NWD})
    EXPECT_EQ(parse_metric_kind(to_string(kind)), kind);
  EXPECT_FALSE(is_similarity(MetricKind::GWD));
  EXPECT_TRUE(is_similarity(MetricKind::NWD));
}

TEST(MetricsTest, PairwiseShapesAndValues) {
  const std::vector<Box> one{Box(5, 5, 4, 6)};
  const auto m1 = pairwise({MetricKind::IoU, 0}, one, one);
  ASSERT_EQ(m1.rows, 1u);
  ASSERT_EQ(m1.cols, 1u);
  EXPECT_EQ(m1.at(0, 0), 1.0);

  const std::vector<Box> gts{Box(0, 0, 4, 4), Box(10, 3, 6, 2)};
  const std::vector<Box> anchors{Box(1, 1, 8, 8), Box(9, 2, 4, 4), Box(-5, 7, 2, 9)};
  const auto m2 = pairwise({MetricKind::NWD, 12.7}, gts, anchors);
  ASSERT_EQ(m2.values.size(), 6u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m2.at(i, j), nwd(gts[i], anchors[j], 12.7));

  const auto m0 = pairwise({MetricKind::NWD, 12.7}, {}, anchors);
  EXPECT_EQ(m0.rows, 0u);
  EXPECT_TRUE(m0.values.empty());
}

TEST(MetricsProperty, Symmetry) {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 20000; ++n) {
    const Box a = random_box(rng);
    const Box b = random_box(rng);
    EXPECT_NEAR(iou(a, b), iou(b, a), kTol);
    EXPECT_NEAR(giou(a, b), giou(b, a), kTol);
    EXPECT_NEAR(diou(a, b), diou(b, a), kTol);
    EXPECT_NEAR(ciou(a, b), ciou(b, a), kTol);
    EXPECT_NEAR(gwd(a, b), gwd(b, a), kTol);
    EXPECT_NEAR(nwd(a, b, 12.7), nwd(b, a, 12.7), kTol);
  }
}

TEST(MetricsProperty, IdentityIsExact) {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 20000; ++n) {
    const Box a = random_box(rng, 1e4, 1e3);
    EXPECT_EQ(iou(a, a), 1.0);
    EXPECT_EQ(giou(a, a), 1.0);
    EXPECT_EQ(diou(a, a), 1.0);
    EXPECT_EQ(ciou(a, a), 1.0);
    EXPECT_EQ(gwd(a, a), 0.0);
    EXPECT_EQ(nwd(a, a, 12.7), 1.0);
  }
}

TEST(MetricsProperty, Ranges) {
  std::mt19937_64 rng(23);
  std::size_t bad = 0;
  for (int n = 0; n < 100000; ++n) {
    const Box a = random_box(rng, 50.0, 60.0);
    const Box b = random_box(rng, 50.0, 60.0);
    const double i = iou(a, b);
    const double g = giou(a, b);
    const double w = nwd(a, b, 12.7);
    if (!(i >= 0.0 && i <= 1.0)) ++bad;
    if (!(g > -1.0 && g <= 1.0)) ++bad;
    if (!(w > 0.0 && w <= 1.0)) ++bad;
  }
  EXPECT_EQ(bad, 0u);
}

TEST(MetricsProperty, GwdIsAMetric) {
  std::mt19937_64 rng(24);
  for (int n = 0; n < 20000; ++n) {
    const Box a = random_box(rng);
    const Box b = random_box(rng);
    const Box c = random_box(rng);
    EXPECT_GE(gwd(a, b), 0.0);
    EXPECT_GT(gwd(a, b), 0.0);  // distinct with probability 1
    EXPECT_LE(gwd(a, c), gwd(a, b) + gwd(b, c) + 1e-9);
  }
}

TEST(MetricsProperty, ClosedFormMatchesMatrixSquareRoot) {
  std::mt19937_64 rng(25);
  for (int n = 0; n < 5000; ++n) {
    const Box a = random_box(rng);
    const Box b = random_box(rng);
    const double expect = oracle::w2_sq_general({a.cx(), a.cy(), a.w(), a.h()}, {b.cx(), b.cy(), b.w(), b.h()});
    EXPECT_NEAR(wasserstein_sq(to_gaussian(a), to_gaussian(b)), expect, 1e-9 * std::max(1.0, expect));
  }
}

TEST(MetricsProperty, NwdScaleBalance) {
  for (double s : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0})
    for (int dx = 0; dx <= 30; ++dx)
      for (int dy = 0; dy <= 30; dy += 3) {
        const double ref = nwd(Box(0, 0, 4, 4), Box(dx, dy, 4, 4), 12.7);
        EXPECT_NEAR(nwd(Box(0, 0, s, s), Box(dx, dy, s, s), 12.7), ref, kTol);
        EXPECT_NEAR(nwd(Box(50, -20, s, s / 2), Box(50 + dx, -20 + dy, s, s / 2), 12.7), ref, kTol);
      }
}

TEST(MetricsProperty, MonotoneInCenterDistance) {
  for (double s : {2.0, 6.0, 16.0, 48.0})
    for (double dir : {0.0, 0.4, 1.1}) {
      double prev_nwd = 2.0;
      double prev_iou = 2.0;
      for (int step = 0; step <= 200; ++step) {
        const double r = step * 0.5;
        const Box b(r * std::cos(dir), r * std::sin(dir), s, s);
        const double v = nwd(Box(0, 0, s, s), b, 12.7);
        const double o = iou(Box(0, 0, s, s), b);
        EXPECT_LT(v, prev_nwd);
        EXPECT_LE(o, prev_iou);
        prev_nwd = v;
        prev_iou = o;
      }
    }
}

TEST(MetricsProperty, NonOverlapDiscrimination) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> side(1.0, 20.0);
  std::uniform_real_distribution<double> gap(0.1, 40.0);
  for (int n = 0; n < 5000; ++n) {
    const double s = side(rng);
    const double g1 = gap(rng);
    const double g2 = g1 + gap(rng);
    const Box a(0, 0, s, s);
    const Box near(s + g1, 0, s, s);
    const Box far(s + g2, 0, s, s);
    EXPECT_EQ(iou(a, near), 0.0);
    EXPECT_EQ(iou(a, far), 0.0);
    EXPECT_GT(nwd(a, near, 12.7), nwd(a, far, 12.7));
  }
}

TEST(MetricsProperty, PairwiseBitIdenticalToScalar) {
  std::mt19937_64 rng(27);
  std::vector<Box> gts;
  std::vector<Box> anchors;
  for (int i = 0; i < 7; ++i) gts.push_back(random_box(rng));
  for (int j = 0; j < 53; ++j) anchors.push_back(random_box(rng));
  for (auto kind : {MetricKind::IoU, MetricKind::GIoU, MetricKind::DIoU, MetricKind::CIoU, MetricKind::GWD,
                    MetricKind::NWD}) {
    const Metric metric{kind, 9.5};
    const auto m = pairwise(metric, gts, anchors);
    for (std::size_t i = 0; i < gts.size(); ++i)
      for (std::size_t j = 0; j < anchors.size(); ++j) EXPECT_EQ(m.at(i, j), evaluate(metric, gts[i], anchors[j]));
  }
}

TEST(MetricsProperty, IoUAgreesWithRectOracle) {
  std::mt19937_64 rng(28);
  for (int n = 0; n < 20000; ++n) {
    const Box a = random_box(rng, 30.0, 40.0);
    const Box b = random_box(rng, 30.0, 40.0);
    const double expect = oracle::rect_iou(oracle::rect_from_center(a.cx(), a.cy(), a.w(), a.h()),
                                           oracle::rect_from_center(b.cx(), b.cy(), b.w(), b.h()));
    EXPECT_NEAR(iou(a, b), expect, kTol);
  }
}

}  // namespace
}  // namespace tod
