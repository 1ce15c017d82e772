// SPDX-License-Identifier: Apache-2.0
#include "tod/reports.hpp"

#include <cstdio>

#include "json.hpp"

namespace tod {

namespace {

using ojson = nlohmann::ordered_json;

ojson optional_value(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson stats_object(const DatasetStats& s) {
  ojson o;
  o["images"] = s.images;
  o["instances"] = s.instances;
  o["size_mean"] = s.size_mean;
  o["size_std"] = s.size_std;
  o["bucket_percent"] = ojson::object();
  for (const auto& [bucket, pct] : s.bucket_percent) o["bucket_percent"][std::string(to_string(bucket))] = pct;
  o["below_range_percent"] = s.below_range_percent;
  o["per_category"] = ojson::object();
  for (const auto& [name, n] : s.per_category) o["per_category"][name] = n;
  o["instances_per_image"] = ojson::object();
  for (const auto& [n, images] : s.instances_per_image) o["instances_per_image"][std::to_string(n)] = images;
  return o;
}

}  // namespace

std::string hex_digest(std::uint64_t digest) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::string assignment_report_json(const DatasetAssignment& run, const AssignerConfig& assigner,
                                   const AnchorConfig& anchors) {
  ojson o;
  o["strategy"] = std::string(to_string(assigner.strategy));
  o["metric"] = std::string(to_string(assigner.metric.kind));
  o["k"] = assigner.k;
  o["C"] = assigner.metric.nwd_constant;
  o["theta_p"] = assigner.theta_p;
  o["theta_n"] = assigner.theta_n;
  o["min_pos_score"] = assigner.min_pos_score;
  o["anchor_scale"] = anchors.anchor_scale;
  o["strides"] = anchors.strides;
  o["ratios"] = anchors.ratios;
  o["clip_border"] = anchors.clip_border;
  o["images"] = run.images;
  o["gts"] = run.gts;
  o["buckets"] = ojson::object();
  for (const auto& [bucket, entry] : run.stats.buckets) {
    o["buckets"][std::string(to_string(bucket))] = {
        {"gts", entry.gts}, {"positives", entry.positives}, {"mean_positives", entry.mean()}};
  }
  o["unbucketed_gts"] = run.stats.unbucketed;
  o["total_pos"] = run.totals.positives;
  o["total_neg"] = run.totals.negatives;
  o["total_ignore"] = run.totals.ignored;
  o["labels_digest"] = hex_digest(run.digest);
  return o.dump(2) + "\n";
}

std::string eval_report_json(const EvalReport& report, std::size_t dropped_detections) {
  ojson o;
  o["ap"] = optional_value(report.ap);
  o["ap50"] = optional_value(report.ap50);
  o["ap75"] = optional_value(report.ap75);
  o["ap_vt"] = optional_value(report.ap_vt);
  o["ap_t"] = optional_value(report.ap_t);
  o["ap_s"] = optional_value(report.ap_s);
  o["ap_m"] = optional_value(report.ap_m);
  o["ar"] = optional_value(report.ar);
  o["max_det"] = report.max_det;
  o["strata"] = ojson::object();
  for (const auto& [name, v] : report.strata_ap) o["strata"][name] = optional_value(v);
  o["per_category"] = ojson::object();
  for (const auto& [id, v] : report.per_category_ap) o["per_category"][std::to_string(id)] = optional_value(v);
  o["unknown_category_detections"] = report.unknown_category_detections;
  o["dropped_detections"] = dropped_detections;
  return o.dump(2) + "\n";
}

std::string dataset_stats_json(const std::vector<std::string>& split_names,
                               const std::vector<DatasetStats>& splits, const DatasetStats& combined) {
  ojson o;
  o["splits"] = ojson::array();
  for (std::size_t i = 0; i < splits.size(); ++i) {
    ojson s = stats_object(splits[i]);
    s["name"] = split_names.at(i);
    o["splits"].push_back(std::move(s));
  }
  o["combined"] = stats_object(combined);
  return o.dump(2) + "\n";
}

}  // namespace tod
