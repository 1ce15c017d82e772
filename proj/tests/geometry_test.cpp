// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tod/errors.hpp"
#include "tod/geometry.hpp"

namespace tod {
namespace {

TEST(BoxTest, RejectsDegenerateAndNonFinite) {
  EXPECT_THROW(Box(0, 0, 0, 1), InvalidBox);
  EXPECT_THROW(Box(0, 0, 1, -2), InvalidBox);
  EXPECT_THROW(Box(std::nan(""), 0, 1, 1), InvalidBox);
  EXPECT_THROW(Box(0, 0, INFINITY, 1), InvalidBox);
  EXPECT_NO_THROW(Box(-5, -5, 1e-9, 1e-9));
}

TEST(BoxTest, ToGaussian) {
  const auto g1 = to_gaussian(Box(4, 4, 8, 8));
  EXPECT_EQ(g1.mu, (std::array<double, 2>{4, 4}));
  EXPECT_EQ(g1.sigma, (std::array<double, 2>{4, 4}));

  const auto g2 = to_gaussian(Box(0, 0, 2, 2));
  EXPECT_EQ(g2.mu, (std::array<double, 2>{0, 0}));
  EXPECT_EQ(g2.sigma, (std::array<double, 2>{1, 1}));

  const auto g3 = to_gaussian(Box(10, 20, 5, 8));
  EXPECT_EQ(g3.mu, (std::array<double, 2>{10, 20}));
  EXPECT_EQ(g3.sigma, (std::array<double, 2>{2.5, 4.0}));

  const auto cov = g3.covariance();
  EXPECT_EQ(cov[0][0], 6.25);
  EXPECT_EQ(cov[1][1], 16.0);
  EXPECT_EQ(cov[0][1], 0.0);
  EXPECT_EQ(cov[1][0], 0.0);
}

TEST(BoxTest, CornerConversions) {
  EXPECT_EQ(corners_to_center(0, 0, 2, 2), Box(1, 1, 2, 2));
  EXPECT_EQ(corners_to_center(0, 0, 8, 8), Box(4, 4, 8, 8));
  EXPECT_EQ(corners_to_center(3, 5, 8, 13), Box(5.5, 9, 5, 8));

  EXPECT_EQ(center_to_corners(Box(1, 1, 2, 2)), (Corners{0, 0, 2, 2}));
  EXPECT_EQ(center_to_corners(Box(4, 4, 8, 8)), (Corners{0, 0, 8, 8}));
  EXPECT_EQ(center_to_corners(Box(5.5, 9, 5, 8)), (Corners{3, 5, 8, 13}));

  EXPECT_THROW(corners_to_center(1, 1, 1, 5), InvalidBox);
  EXPECT_THROW(corners_to_center(0, 4, 3, 2), InvalidBox);
}

TEST(BoxTest, AbsoluteSize) {
  EXPECT_EQ(absolute_size(Box(0, 0, 8, 8)), 8.0);
  EXPECT_EQ(absolute_size(Box(0, 0, 4, 16)), 8.0);
  EXPECT_EQ(absolute_size(Box(0, 0, 2, 2)), 2.0);
}

TEST(BoxProperty, CornerRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-1000, 1000);
  std::uniform_real_distribution<double> side(0.01, 500);
  for (int n = 0; n < 10000; ++n) {
    const double x1 = pos(rng);
    const double y1 = pos(rng);
    const double x2 = x1 + side(rng);
    const double y2 = y1 + side(rng);
    const Corners c = center_to_corners(corners_to_center(x1, y1, x2, y2));
    const double scale = std::max({std::abs(x1), std::abs(y1), std::abs(x2), std::abs(y2), 1.0});
    EXPECT_NEAR(c.x1, x1, 1e-12 * scale);
    EXPECT_NEAR(c.y1, y1, 1e-12 * scale);
    EXPECT_NEAR(c.x2, x2, 1e-12 * scale);
    EXPECT_NEAR(c.y2, y2, 1e-12 * scale);
  }
}

TEST(BoxProperty, GaussianReconstructsBox) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-1000, 1000);
  std::uniform_real_distribution<double> side(0.01, 500);
  for (int n = 0; n < 10000; ++n) {
    const Box b(pos(rng), pos(rng), side(rng), side(rng));
    EXPECT_EQ(from_gaussian(to_gaussian(b)), b);
  }
}

TEST(BoxProperty, AbsoluteSizeScaleCovariant) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> side(0.1, 300);
  std::uniform_real_distribution<double> alpha(0.01, 20);
  for (int n = 0; n < 10000; ++n) {
    const double w = side(rng);
    const double h = side(rng);
    const double a = alpha(rng);
    const double expect = a * absolute_size(Box(0, 0, w, h));
    EXPECT_NEAR(absolute_size(Box(0, 0, a * w, a * h)), expect, 1e-12 * expect);
  }
}

TEST(BoxTest, CocoXywh) {
  const Box b = from_xywh(3, 5, 5, 8);
  EXPECT_EQ(b, Box(5.5, 9, 5, 8));
  EXPECT_EQ(to_xywh(b), (std::array<double, 4>{3, 5, 5, 8}));
}

}  // namespace
}  // namespace tod
