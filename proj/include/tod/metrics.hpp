// SPDX-License-Identifier: Apache-2.0
//
// Pairwise box similarity and distance measures: the IoU family, the
// closed-form Gaussian Wasserstein distance, and its exponentially
// normalized form (NWD). All arithmetic is double precision.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tod/geometry.hpp"

namespace tod {

enum class MetricKind { IoU, GIoU, DIoU, CIoU, GWD, NWD };

/// Normalization constant presets for NWD, in pixels.
inline constexpr double kNwdConstantDefault = 12.7;
inline constexpr double kNwdConstantRounded = 12.0;

/// A metric kind plus its parameters. Only NWD reads nwd_constant.
struct Metric {
  MetricKind kind = MetricKind::NWD;
  double nwd_constant = kNwdConstantDefault;
};

std::string_view to_string(MetricKind kind) noexcept;
/// Case-insensitive; accepts "iou", "giou", "diou", "ciou", "gwd", "nwd".
std::optional<MetricKind> parse_metric_kind(std::string_view name);

/// True for kinds where larger values mean more similar (all but GWD).
bool is_similarity(MetricKind kind) noexcept;

double iou(const Box& a, const Box& b) noexcept;
double giou(const Box& a, const Box& b) noexcept;
double diou(const Box& a, const Box& b) noexcept;
double ciou(const Box& a, const Box& b) noexcept;

/// Squared 2-Wasserstein distance between diagonal Gaussians:
/// ||mu_a - mu_b||^2 + ||sigma_a - sigma_b||^2.
double wasserstein_sq(const GaussianBox& a, const GaussianBox& b) noexcept;

/// Unnormalized Gaussian Wasserstein distance between the boxes' Gaussians.
double gwd(const Box& a, const Box& b) noexcept;

/// exp(-gwd(a, b) / c). Throws InvalidParameter unless c > 0 and finite.
double nwd(const Box& a, const Box& b, double c);

/// Scalar dispatch on metric.kind.
double evaluate(const Metric& metric, const Box& a, const Box& b);

/// Dense gt x anchor matrix, row-major.
struct MetricMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
};

/// Entry (i, j) is evaluate(metric, gts[i], anchors[j]), bit-identical to the
/// scalar call. Empty inputs give a matrix with zero rows or columns.
MetricMatrix pairwise(const Metric& metric, std::span<const Box> gts, std::span<const Box> anchors);

}  // namespace tod
