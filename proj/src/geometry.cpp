// SPDX-License-Identifier: Apache-2.0
#include "tod/geometry.hpp"

#include <cmath>
#include <sstream>

#include "tod/errors.hpp"

namespace tod {

Box::Box(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h) ||
      !(w > 0.0) || !(h > 0.0)) {
    std::ostringstream msg;
    msg << "invalid box (cx=" << cx << ", cy=" << cy << ", w=" << w << ", h=" << h
        << "): width and height must be positive and all fields finite";
    throw InvalidBox(msg.str());
  }
}

Box corners_to_center(double x1, double y1, double x2, double y2) {
  return Box((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1);
}

Corners center_to_corners(const Box& box) noexcept {
  return {box.x1(), box.y1(), box.x2(), box.y2()};
}

Box from_xywh(double x, double y, double w, double h) {
  return Box(x + w / 2.0, y + h / 2.0, w, h);
}

std::array<double, 4> to_xywh(const Box& box) noexcept {
  return {box.x1(), box.y1(), box.w(), box.h()};
}

double absolute_size(const Box& box) noexcept { return std::sqrt(box.w() * box.h()); }

GaussianBox to_gaussian(const Box& box) noexcept {
  return {{box.cx(), box.cy()}, {box.w() / 2.0, box.h() / 2.0}};
}

Box from_gaussian(const GaussianBox& g) {
  return Box(g.mu[0], g.mu[1], 2.0 * g.sigma[0], 2.0 * g.sigma[1]);
}

}  // namespace tod
