// SPDX-License-Identifier: Apache-2.0
//
// Analysis artifacts for metric behaviour and assignment balance:
// metric-vs-deviation curves, mean positives per gt by scale bucket, and
// pos/neg totals over a dataset pass.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tod/assignment.hpp"
#include "tod/data_io.hpp"
#include "tod/geometry.hpp"
#include "tod/metrics.hpp"
#include "tod/scale_bucket.hpp"

namespace tod {

struct CurvePoint {
  int deviation;
  double value;
};

struct DeviationCurve {
  Metric metric;
  double box_scale;
  double size_ratio;
  std::vector<CurvePoint> points;  ///< ascending deviation
};

/// Box A is a square of side `scale` centered at the origin, B a square of
/// side scale * size_ratio centered at (d, d); one point per d = 0..max_dev.
DeviationCurve deviation_curve(const Metric& metric, double scale, double size_ratio, int max_dev);

struct BucketMean {
  std::size_t gts = 0;
  std::size_t positives = 0;
  double mean() const noexcept {
    return gts == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(gts);
  }
};

/// Empty buckets are absent from the map. Gts smaller than 2 px fall in no
/// bucket and are only counted in `unbucketed`.
struct PositiveStats {
  std::map<ScaleBucket, BucketMean> buckets;
  std::size_t unbucketed = 0;

  void add(const AssignmentResult& result, std::span<const Box> gts);
  /// max/min of bucket means; +inf when some bucket mean is 0 and another
  /// is not, 1 when every bucket mean is 0, NaN when no bucket is present.
  double imbalance_ratio() const;
};

/// Throws InvalidInput when result.pos_count_per_gt and gts differ in length.
PositiveStats per_gt_positive_stats(const AssignmentResult& result, std::span<const Box> gts);

struct PosNegTotals {
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  std::uint64_t ignored = 0;

  void add(const AssignmentResult& result);
};

PosNegTotals pos_neg_totals(std::span<const AssignmentResult> results);

/// One row per curve point, columns (deviation, value).
CsvTable curve_table(const DeviationCurve& curve);

struct DatasetAssignment {
  std::size_t images = 0;
  std::size_t gts = 0;
  PositiveStats stats;
  PosNegTotals totals;
  /// labels_digest chained over images in file order.
  std::uint64_t digest = 14695981039346656037ULL;
};

/// Assigns every image of `ann` against anchors generated for its size.
/// Crowd annotations are not assignment targets.
DatasetAssignment assign_dataset(const AnnotationSet& ann, const AssignerConfig& assigner,
                                 const AnchorConfig& anchors);

}  // namespace tod
