// SPDX-License-Identifier: Apache-2.0
#include "tod/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tod/errors.hpp"

namespace tod {

DeviationCurve deviation_curve(const Metric& metric, double scale, double size_ratio, int max_dev) {
  if (!(scale > 0.0)) throw InvalidParameter("curve scale must be positive");
  if (!(size_ratio > 0.0)) throw InvalidParameter("curve size ratio must be positive");
  if (max_dev < 0) throw InvalidParameter("curve max deviation must be non-negative");

  const Box a(0.0, 0.0, scale, scale);
  const double side_b = scale * size_ratio;
  DeviationCurve curve{metric, scale, size_ratio, {}};
  curve.points.reserve(static_cast<std::size_t>(max_dev) + 1);
  for (int d = 0; d <= max_dev; ++d) {
    const Box b(d, d, side_b, side_b);
    curve.points.push_back({d, evaluate(metric, a, b)});
  }
  return curve;
}

void PositiveStats::add(const AssignmentResult& result, std::span<const Box> gts) {
  if (result.pos_count_per_gt.size() != gts.size()) {
    throw InvalidInput("assignment result covers " + std::to_string(result.pos_count_per_gt.size()) +
                       " gts but " + std::to_string(gts.size()) + " gts were given");
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const auto bucket = bucket_of(absolute_size(gts[i]));
    if (!bucket) {
      ++unbucketed;
      continue;
    }
    auto& entry = buckets[*bucket];
    ++entry.gts;
    entry.positives += result.pos_count_per_gt[i];
  }
}

double PositiveStats::imbalance_ratio() const {
  if (buckets.empty()) return std::numeric_limits<double>::quiet_NaN();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [bucket, entry] : buckets) {
    lo = std::min(lo, entry.mean());
    hi = std::max(hi, entry.mean());
  }
  if (hi == 0.0) return 1.0;
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

PositiveStats per_gt_positive_stats(const AssignmentResult& result, std::span<const Box> gts) {
  PositiveStats stats;
  stats.add(result, gts);
  return stats;
}

void PosNegTotals::add(const AssignmentResult& result) {
  for (const auto& label : result.labels) {
    if (label.is_positive()) ++positives;
    else if (label.is_negative()) ++negatives;
    else ++ignored;
  }
}

PosNegTotals pos_neg_totals(std::span<const AssignmentResult> results) {
  PosNegTotals totals;
  for (const auto& r : results) totals.add(r);
  return totals;
}


CsvTable curve_table(const DeviationCurve& curve) {
  CsvTable table{{"deviation", "value"}, {}};
  for (const auto& p : curve.points) table.rows.push_back({std::int64_t{p.deviation}, p.value});
  return table;
}

DatasetAssignment assign_dataset(const AnnotationSet& ann, const AssignerConfig& assigner,
                                 const AnchorConfig& anchors) {
  assigner.validate();
  anchors.validate();
  std::map<std::int64_t, std::vector<Box>> boxes_by_image;
  for (const auto& a : ann.annotations)
    if (!a.iscrowd) boxes_by_image[a.image_id].push_back(a.box);

  DatasetAssignment out;
  std::map<std::pair<double, double>, std::vector<Box>> anchor_cache;
  for (const auto& img : ann.images) {
    auto key = std::make_pair(img.width, img.height);
    auto it = anchor_cache.find(key);
    if (it == anchor_cache.end())
      it = anchor_cache.emplace(key, generate_anchors(anchors, img.width, img.height)).first;
    const auto& gts = boxes_by_image[img.id];
    const auto result = assign(assigner, gts, it->second);
    out.stats.add(result, gts);
    out.totals.add(result);
    out.digest = labels_digest(result.labels, out.digest);
    ++out.images;
    out.gts += gts.size();
  }
  return out;
}

}  // namespace tod
