// SPDX-License-Identifier: Apache-2.0
#include "tod/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "tod/errors.hpp"
#include "tod/metrics.hpp"

namespace tod {

namespace {

constexpr std::size_t kRecallPoints = 101;

std::vector<std::size_t> by_score_desc(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

// Crowd regions are scored by the fraction of the detection they cover.
double match_overlap(const Box& det, const GroundTruth& gt) {
  if (!gt.iscrowd) return iou(det, gt.box);
  const double iw = std::max(0.0, std::min(det.x2(), gt.box.x2()) - std::max(det.x1(), gt.box.x1()));
  const double ih = std::max(0.0, std::min(det.y2(), gt.box.y2()) - std::max(det.y1(), gt.box.y1()));
  return iw * ih / det.area();
}

struct ImageMatch {
  std::vector<char> matched;  // per detection
  std::vector<char> ignored;  // per detection
};

// COCO greedy matching for one image and category at one threshold.
// `gt_order` lists non-ignored gts first. overlaps[d][g] is indexed by the
// original gt position.
ImageMatch greedy_match(std::size_t num_dets, std::span<const GroundTruth* const> gts,
                        std::span<const std::size_t> gt_order, const std::vector<char>& gt_ignored,
                        const std::vector<std::vector<double>>& overlaps, double threshold) {
  ImageMatch out{std::vector<char>(num_dets, 0), std::vector<char>(num_dets, 0)};
  std::vector<char> gt_taken(gts.size(), 0);
  for (std::size_t d = 0; d < num_dets; ++d) {
    double best = std::min(threshold, 1.0 - 1e-10);
    std::ptrdiff_t m = -1;
    for (std::size_t g : gt_order) {
      if (gt_taken[g] && !gts[g]->iscrowd) continue;
      // Once a regular gt is matched, ignored gts cannot take over.
      if (m >= 0 && !gt_ignored[static_cast<std::size_t>(m)] && gt_ignored[g]) break;
      if (overlaps[d][g] < best) continue;
      best = overlaps[d][g];
      m = static_cast<std::ptrdiff_t>(g);
    }
    if (m < 0) continue;
    out.matched[d] = 1;
    out.ignored[d] = gt_ignored[static_cast<std::size_t>(m)];
    gt_taken[static_cast<std::size_t>(m)] = 1;
  }
  return out;
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh, bool per_category) {
  const auto order = by_score_desc(dets);
  std::vector<char> suppressed(dets.size(), 0);
  std::vector<Detection> kept;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    if (suppressed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t s = r + 1; s < order.size(); ++s) {
      const std::size_t j = order[s];
      if (suppressed[j] || dets[j].image_id != dets[i].image_id) continue;
      if (per_category && dets[j].category_id != dets[i].category_id) continue;
      if (iou(dets[i].box, dets[j].box) > iou_thresh) suppressed[j] = 1;
    }
  }
  return kept;
}

std::vector<Detection> score_filter(std::span<const Detection> dets, double min_score,
                                    std::size_t max_per_image) {
  std::vector<char> keep(dets.size(), 0);
  std::map<std::int64_t, std::size_t> taken;
  for (std::size_t i : by_score_desc(dets)) {
    if (dets[i].score < min_score) continue;
    auto& n = taken[dets[i].image_id];
    if (n >= max_per_image) continue;
    ++n;
    keep[i] = 1;
  }
  std::vector<Detection> out;
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (keep[i]) out.push_back(dets[i]);
  return out;
}

std::vector<bool> match(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                        double iou_thresh) {
  std::vector<bool> tp(dets.size(), false);
  std::set<std::int64_t> categories;
  for (const auto& d : dets) categories.insert(d.category_id);
  for (std::int64_t cat : categories) {
    std::vector<std::size_t> det_idx;
    for (std::size_t d = 0; d < dets.size(); ++d)
      if (dets[d].category_id == cat) det_idx.push_back(d);
    std::vector<const GroundTruth*> cat_gts;
    for (const auto& g : gts)
      if (g.category_id == cat) cat_gts.push_back(&g);

    std::vector<char> ignored(cat_gts.size(), 0);
    for (std::size_t g = 0; g < cat_gts.size(); ++g) ignored[g] = cat_gts[g]->iscrowd ? 1 : 0;
    std::vector<std::size_t> order(cat_gts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ignored[a] < ignored[b]; });
    std::vector<std::vector<double>> overlaps(det_idx.size(), std::vector<double>(cat_gts.size()));
    for (std::size_t d = 0; d < det_idx.size(); ++d)
      for (std::size_t g = 0; g < cat_gts.size(); ++g)
        overlaps[d][g] = match_overlap(dets[det_idx[d]].box, *cat_gts[g]);

    const auto m = greedy_match(det_idx.size(), cat_gts, order, ignored, overlaps, iou_thresh);
    for (std::size_t d = 0; d < det_idx.size(); ++d) tp[det_idx[d]] = m.matched[d] && !m.ignored[d];
  }
  return tp;
}

std::optional<double> average_precision(std::span<const RankedOutcome> outcomes, std::size_t num_gt) {
  if (num_gt == 0) return std::nullopt;
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return outcomes[a].score > outcomes[b].score; });

  std::vector<double> recall(order.size());
  std::vector<double> precision(order.size());
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    (outcomes[order[r]].tp ? tp : fp) += 1.0;
    recall[r] = tp / static_cast<double>(num_gt);
    precision[r] = tp / (tp + fp);
  }
  // Monotone envelope from the right.
  for (std::size_t r = precision.size(); r-- > 1;)
    precision[r - 1] = std::max(precision[r - 1], precision[r]);

  double sum = 0.0;
  for (std::size_t p = 0; p < kRecallPoints; ++p) {
    const double threshold = static_cast<double>(p) * 0.01;
    const auto it = std::lower_bound(recall.begin(), recall.end(), threshold);
    if (it == recall.end()) break;
    sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / static_cast<double>(kRecallPoints);
}

EvalReport evaluate(std::span<const GroundTruth> gts, std::span<const std::int64_t> category_ids,
                    std::span<const Detection> dets, const EvalParams& params) {
  if (params.iou_thresholds.empty()) throw InvalidParameter("at least one IoU threshold is required");
  if (params.max_det == 0) throw InvalidParameter("max_det must be positive");

  const std::set<std::int64_t> categories(category_ids.begin(), category_ids.end());
  const std::size_t num_t = params.iou_thresholds.size();
  // Stratum 0 covers every size; the rest follow params.strata.
  std::vector<SizeRange> ranges{{0.0, std::numeric_limits<double>::infinity()}};
  for (const auto& s : params.strata) ranges.push_back(s.range);
  const std::size_t num_a = ranges.size();

  EvalReport report;
  report.max_det = params.max_det;

  using Key = std::pair<std::int64_t, std::int64_t>;  // (category, image)
  std::map<Key, std::vector<std::size_t>> gt_groups;
  std::map<Key, std::vector<std::size_t>> det_groups;
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (categories.count(gts[g].category_id)) gt_groups[{gts[g].category_id, gts[g].image_id}].push_back(g);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (!categories.count(dets[d].category_id)) {
      ++report.unknown_category_detections;
      continue;
    }
    det_groups[{dets[d].category_id, dets[d].image_id}].push_back(d);
  }
  std::set<Key> keys;
  for (const auto& [key, _] : gt_groups) keys.insert(key);
  for (const auto& [key, _] : det_groups) keys.insert(key);

  // outcomes[a][t] and gt counts[a] for the category being accumulated.
  struct CategoryAccum {
    std::vector<std::vector<std::vector<RankedOutcome>>> outcomes;
    std::vector<std::size_t> num_gt;
  };
  std::map<std::int64_t, CategoryAccum> accum;
  for (std::int64_t cat : categories) {
    accum[cat].outcomes.assign(num_a, std::vector<std::vector<RankedOutcome>>(num_t));
    accum[cat].num_gt.assign(num_a, 0);
  }

  for (const auto& key : keys) {
    auto& acc = accum[key.first];
    std::vector<const GroundTruth*> img_gts;
    if (auto it = gt_groups.find(key); it != gt_groups.end())
      for (std::size_t g : it->second) img_gts.push_back(&gts[g]);
    std::vector<Detection> img_dets;
    if (auto it = det_groups.find(key); it != det_groups.end())
      for (std::size_t d : it->second) img_dets.push_back(dets[d]);
    {
      const auto order = by_score_desc(img_dets);
      std::vector<Detection> sorted;
      sorted.reserve(std::min(order.size(), params.max_det));
      for (std::size_t r = 0; r < order.size() && r < params.max_det; ++r) sorted.push_back(img_dets[order[r]]);
      img_dets = std::move(sorted);
    }

    std::vector<std::vector<double>> overlaps(img_dets.size(), std::vector<double>(img_gts.size()));
    for (std::size_t d = 0; d < img_dets.size(); ++d)
      for (std::size_t g = 0; g < img_gts.size(); ++g) overlaps[d][g] = match_overlap(img_dets[d].box, *img_gts[g]);

    for (std::size_t a = 0; a < num_a; ++a) {
      std::vector<char> ignored(img_gts.size(), 0);
      for (std::size_t g = 0; g < img_gts.size(); ++g) {
        ignored[g] = img_gts[g]->iscrowd || !ranges[a].contains(absolute_size(img_gts[g]->box));
        if (!ignored[g]) ++acc.num_gt[a];
      }
      std::vector<std::size_t> order(img_gts.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return ignored[x] < ignored[y]; });

      for (std::size_t t = 0; t < num_t; ++t) {
        const auto m = greedy_match(img_dets.size(), img_gts, order, ignored, overlaps, params.iou_thresholds[t]);
        for (std::size_t d = 0; d < img_dets.size(); ++d) {
          const bool out_of_range = !ranges[a].contains(absolute_size(img_dets[d].box));
          if (m.ignored[d] || (!m.matched[d] && out_of_range)) continue;
          acc.outcomes[a][t].push_back({img_dets[d].score, m.matched[d] != 0});
        }
      }
    }
  }

  std::vector<std::vector<double>> stratum_aps(num_a);
  std::vector<std::vector<double>> per_threshold_aps(num_t);
  std::vector<double> recalls;
  for (const auto& [cat, acc] : accum) {
    std::vector<double> cat_aps;
    for (std::size_t a = 0; a < num_a; ++a) {
      if (acc.num_gt[a] == 0) continue;
      for (std::size_t t = 0; t < num_t; ++t) {
        const auto& outcomes = acc.outcomes[a][t];
        const double ap = *average_precision(outcomes, acc.num_gt[a]);
        stratum_aps[a].push_back(ap);
        if (a != 0) continue;
        cat_aps.push_back(ap);
        per_threshold_aps[t].push_back(ap);
        const auto tp = std::count_if(outcomes.begin(), outcomes.end(), [](const RankedOutcome& o) { return o.tp; });
        recalls.push_back(static_cast<double>(tp) / static_cast<double>(acc.num_gt[a]));
      }
    }
    report.per_category_ap[cat] = mean_of(cat_aps);
  }

  report.ap = mean_of(stratum_aps[0]);
  report.ar = mean_of(recalls);
  for (std::size_t t = 0; t < num_t; ++t) {
    if (params.iou_thresholds[t] == 0.50) report.ap50 = mean_of(per_threshold_aps[t]);
    if (params.iou_thresholds[t] == 0.75) report.ap75 = mean_of(per_threshold_aps[t]);
  }
  for (std::size_t s = 0; s < params.strata.size(); ++s) {
    const auto value = mean_of(stratum_aps[s + 1]);
    report.strata_ap[params.strata[s].name] = value;
    const auto& name = params.strata[s].name;
    if (name == "very_tiny") report.ap_vt = value;
    else if (name == "tiny") report.ap_t = value;
    else if (name == "small") report.ap_s = value;
    else if (name == "medium") report.ap_m = value;
  }
  return report;
}

std::string format_report_table(const EvalReport& report) {
  const std::string ar_name = "AR@" + std::to_string(report.max_det);
  const std::vector<std::pair<std::string, std::optional<double>>> cols{
      {"AP", report.ap},      {"AP50", report.ap50}, {"AP75", report.ap75}, {"AP_vt", report.ap_vt},
      {"AP_t", report.ap_t},  {"AP_s", report.ap_s}, {"AP_m", report.ap_m}, {ar_name, report.ar}};
  std::string header;
  std::string values;
  char cell[32];
  for (const auto& [name, value] : cols) {
    const int width = static_cast<int>(std::max<std::size_t>(name.size(), 6)) + 2;
    std::snprintf(cell, sizeof cell, "%*s", width, name.c_str());
    header += cell;
    if (value) std::snprintf(cell, sizeof cell, "%*.4f", width, *value);
    else std::snprintf(cell, sizeof cell, "%*s", width, "-");
    values += cell;
  }
  return header + "\n" + values + "\n";
}

}  // namespace tod
