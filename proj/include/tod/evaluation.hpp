// SPDX-License-Identifier: Apache-2.0
//
// Detection post-processing and COCO-style, scale-stratified AP/AR.
//
// Matching follows the COCO protocol: per image and category, detections
// are visited by descending score and take the unmatched gt of highest IoU
// at or above the threshold. Crowd gts absorb any number of matches
// without TP credit. Under a size stratum, gts outside the stratum are
// ignored, as are unmatched detections outside it. AP uses 101-point
// max-interpolated precision.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tod/geometry.hpp"
#include "tod/scale_bucket.hpp"

namespace tod {

struct Detection {
  std::int64_t image_id;
  std::int64_t category_id;
  Box box;
  double score;
};

struct GroundTruth {
  std::int64_t image_id;
  std::int64_t category_id;
  Box box;
  bool iscrowd = false;
};

/// Greedy NMS in (score desc, index asc) order. Detections on different
/// images never suppress each other; with per_category they must also share
/// a category. A box is suppressed when its IoU with a kept box exceeds
/// iou_thresh. Survivors are returned in visiting order.
std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh = 0.5,
                           bool per_category = true);

/// Drops detections scoring below min_score, then keeps the max_per_image
/// highest-scoring survivors of every image. Input order is preserved.
std::vector<Detection> score_filter(std::span<const Detection> dets, double min_score = 0.05,
                                    std::size_t max_per_image = 3000);

/// One image's matching. `dets` must be sorted by descending score.
/// Returns a TP flag per detection; category mismatches never match and
/// each non-crowd gt matches at most once.
std::vector<bool> match(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                        double iou_thresh);

struct RankedOutcome {
  double score;
  bool tp;
};

/// 101-point interpolated AP of one PR curve. Outcomes are ranked by
/// descending score (stable). nullopt when num_gt is 0.
std::optional<double> average_precision(std::span<const RankedOutcome> outcomes, std::size_t num_gt);

struct NamedRange {
  std::string name;
  SizeRange range;
};

struct EvalParams {
  std::vector<double> iou_thresholds{0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
  /// Per image and category, as in COCO.
  std::size_t max_det = 1500;
  std::vector<NamedRange> strata{{"very_tiny", bucket_range(ScaleBucket::VeryTiny)},
                                 {"tiny", bucket_range(ScaleBucket::Tiny)},
                                 {"small", bucket_range(ScaleBucket::Small)},
                                 {"medium", bucket_range(ScaleBucket::Medium)}};
};

/// Every value is absent when its stratum has no (non-crowd) gts.
struct EvalReport {
  std::optional<double> ap;
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::optional<double> ap_vt;
  std::optional<double> ap_t;
  std::optional<double> ap_s;
  std::optional<double> ap_m;
  std::optional<double> ar;
  std::size_t max_det = 0;
  std::map<std::string, std::optional<double>> strata_ap;
  std::map<std::int64_t, std::optional<double>> per_category_ap;
  /// Detections whose category is not among the evaluated categories. They
  /// can never be TPs and enter no category's curve.
  std::size_t unknown_category_detections = 0;
};

EvalReport evaluate(std::span<const GroundTruth> gts, std::span<const std::int64_t> category_ids,
                    std::span<const Detection> dets, const EvalParams& params = {});

/// The aligned one-line-per-column table (AP, AP50, AP75, AP_vt, AP_t,
/// AP_s, AP_m, AR@max_det), absent values shown as "-".
std::string format_report_table(const EvalReport& report);

}  // namespace tod
