// SPDX-License-Identifier: Apache-2.0
//
// Axis-aligned boxes in center form and their 2D Gaussian model.
#pragma once

#include <array>

namespace tod {

/// Axis-aligned rectangle in center form, in pixels.
///
/// Width and height are strictly positive and every field is finite; the
/// constructor throws InvalidBox otherwise, so downstream metric code never
/// sees a degenerate box.
class Box {
 public:
  Box(double cx, double cy, double w, double h);

  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  double w() const noexcept { return w_; }
  double h() const noexcept { return h_; }

  double x1() const noexcept { return cx_ - w_ / 2.0; }
  double y1() const noexcept { return cy_ - h_ / 2.0; }
  double x2() const noexcept { return cx_ + w_ / 2.0; }
  double y2() const noexcept { return cy_ + h_ / 2.0; }
  double area() const noexcept { return w_ * h_; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double cx_;
  double cy_;
  double w_;
  double h_;
};

struct Corners {
  double x1;
  double y1;
  double x2;
  double y2;

  friend bool operator==(const Corners&, const Corners&) = default;
};

/// Throws InvalidBox when x2 <= x1 or y2 <= y1.
Box corners_to_center(double x1, double y1, double x2, double y2);
Corners center_to_corners(const Box& box) noexcept;

/// COCO [x, y, w, h] with (x, y) the top-left corner.
Box from_xywh(double x, double y, double w, double h);
std::array<double, 4> to_xywh(const Box& box) noexcept;

/// sqrt(w * h): the geometric mean of the sides.
double absolute_size(const Box& box) noexcept;

/// 2D Gaussian with diagonal covariance diag(sigma_x^2, sigma_y^2).
struct GaussianBox {
  std::array<double, 2> mu;
  std::array<double, 2> sigma;

  std::array<std::array<double, 2>, 2> covariance() const noexcept {
    return {{{sigma[0] * sigma[0], 0.0}, {0.0, sigma[1] * sigma[1]}}};
  }
};

/// Mean at the box center, semi-axes of the inscribed ellipse as standard
/// deviations: mu = (cx, cy), sigma = (w/2, h/2).
GaussianBox to_gaussian(const Box& box) noexcept;

/// Inverse of to_gaussian. Throws InvalidBox for non-positive sigma.
Box from_gaussian(const GaussianBox& g);

}  // namespace tod
