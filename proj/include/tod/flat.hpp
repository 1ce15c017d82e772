// SPDX-License-Identifier: Apache-2.0
//
// Flat-array entry points for foreign callers (n x 4 center-form boxes,
// row-major). Inputs are copied into Box values; outputs are plain arrays.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tod/assignment.hpp"
#include "tod/metrics.hpp"

namespace tod {

/// Throws InvalidInput when the length is not a multiple of 4, and
/// InvalidBox (prefixed with the box index) for a degenerate row.
std::vector<Box> boxes_from_flat(std::span<const double> flat);
std::vector<double> boxes_to_flat(std::span<const Box> boxes);

/// Row-major n_gt x n_anchor values, identical to pairwise().values.
std::vector<double> pairwise_flat(const Metric& metric, std::span<const double> gts,
                                  std::span<const double> anchors);

/// Per-anchor gt index, -1 for negative (and -2 for ignore, which the
/// ranking assigner never emits).
std::vector<std::int64_t> label_codes(const AssignmentResult& result);

std::vector<std::int64_t> assign_rka_flat(std::span<const double> gts, std::span<const double> anchors,
                                          std::size_t k, double nwd_constant);

}  // namespace tod
