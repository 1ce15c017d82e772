// SPDX-License-Identifier: Apache-2.0
#include "tod/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "tod/errors.hpp"

namespace tod {

namespace {

struct Overlap {
  double inter;
  double uni;
};

Overlap overlap(const Box& a, const Box& b) noexcept {
  const double iw = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1()));
  const double ih = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1()));
  const double inter = iw * ih;
  // Areas from the same corner arithmetic as the intersection, so that
  // identical boxes give inter == union exactly.
  const double area_a = (a.x2() - a.x1()) * (a.y2() - a.y1());
  const double area_b = (b.x2() - b.x1()) * (b.y2() - b.y1());
  return {inter, area_a + area_b - inter};
}

Corners enclosing(const Box& a, const Box& b) noexcept {
  return {std::min(a.x1(), b.x1()), std::min(a.y1(), b.y1()), std::max(a.x2(), b.x2()),
          std::max(a.y2(), b.y2())};
}

void check_constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidParameter("NWD normalization constant must be positive and finite, got " +
                           std::to_string(c));
  }
}

}  // namespace

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::IoU: return "iou";
    case MetricKind::GIoU: return "giou";
    case MetricKind::DIoU: return "diou";
    case MetricKind::CIoU: return "ciou";
    case MetricKind::GWD: return "gwd";
    case MetricKind::NWD: return "nwd";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (auto kind : {MetricKind::IoU, MetricKind::GIoU, MetricKind::DIoU, MetricKind::CIoU,
                    MetricKind::GWD, MetricKind::NWD}) {
    if (lower == to_string(kind)) return kind;
  }
  return std::nullopt;
}

bool is_similarity(MetricKind kind) noexcept { return kind != MetricKind::GWD; }

double iou(const Box& a, const Box& b) noexcept {
  const auto [inter, uni] = overlap(a, b);
  return inter / uni;
}

double giou(const Box& a, const Box& b) noexcept {
  const auto [inter, uni] = overlap(a, b);
  const Corners c = enclosing(a, b);
  const double hull = (c.x2 - c.x1) * (c.y2 - c.y1);
  return inter / uni - (hull - uni) / hull;
}

double diou(const Box& a, const Box& b) noexcept {
  const auto [inter, uni] = overlap(a, b);
  const Corners c = enclosing(a, b);
  const double dx = a.cx() - b.cx();
  const double dy = a.cy() - b.cy();
  const double cw = c.x2 - c.x1;
  const double ch = c.y2 - c.y1;
  return inter / uni - (dx * dx + dy * dy) / (cw * cw + ch * ch);
}

double ciou(const Box& a, const Box& b) noexcept {
  const double base_iou = iou(a, b);
  const double dt = std::atan(a.w() / a.h()) - std::atan(b.w() / b.h());
  const double v = 4.0 / (std::numbers::pi * std::numbers::pi) * dt * dt;
  // alpha is 0 when the aspect terms agree; this also covers IoU == 1.
  const double alpha = v == 0.0 ? 0.0 : v / ((1.0 - base_iou) + v);
  return diou(a, b) - alpha * v;
}

double wasserstein_sq(const GaussianBox& a, const GaussianBox& b) noexcept {
  const double d0 = a.mu[0] - b.mu[0];
  const double d1 = a.mu[1] - b.mu[1];
  const double d2 = a.sigma[0] - b.sigma[0];
  const double d3 = a.sigma[1] - b.sigma[1];
  return d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
}

double gwd(const Box& a, const Box& b) noexcept {
  return std::sqrt(wasserstein_sq(to_gaussian(a), to_gaussian(b)));
}

double nwd(const Box& a, const Box& b, double c) {
  check_constant(c);
  return std::exp(-gwd(a, b) / c);
}

double evaluate(const Metric& metric, const Box& a, const Box& b) {
  switch (metric.kind) {
    case MetricKind::IoU: return iou(a, b);
    case MetricKind::GIoU: return giou(a, b);
    case MetricKind::DIoU: return diou(a, b);
    case MetricKind::CIoU: return ciou(a, b);
    case MetricKind::GWD: return gwd(a, b);
    case MetricKind::NWD: return nwd(a, b, metric.nwd_constant);
  }
  throw InvalidParameter("unknown metric kind");
}

MetricMatrix pairwise(const Metric& metric, std::span<const Box> gts, std::span<const Box> anchors) {
  if (metric.kind == MetricKind::NWD) check_constant(metric.nwd_constant);
  MetricMatrix out;
  out.rows = gts.size();
  out.cols = anchors.size();
  out.values.resize(out.rows * out.cols);
  for (std::size_t i = 0; i < out.rows; ++i) {
    double* row = out.values.data() + i * out.cols;
    for (std::size_t j = 0; j < out.cols; ++j) row[j] = evaluate(metric, gts[i], anchors[j]);
  }
  return out;
}

}  // namespace tod
