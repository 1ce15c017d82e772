// SPDX-License-Identifier: Apache-2.0
#include "tod/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "tod/assignment.hpp"
#include "tod/data_io.hpp"
#include "tod/diagnostics.hpp"
#include "tod/errors.hpp"
#include "tod/evaluation.hpp"
#include "tod/kv_config.hpp"
#include "tod/reports.hpp"

namespace tod {

namespace {

const std::vector<std::string> kMetricNames{"iou", "giou", "diou", "ciou", "gwd", "nwd"};

struct AssignFlags {
  std::string ann;
  std::vector<std::size_t> synth;
  std::uint64_t seed = 0;
  double image_size = 800.0;
  std::string strategy = "rka";
  std::string metric = "auto";
  std::size_t k = 2;
  double c = kNwdConstantDefault;
  double theta_p = 0.7;
  double theta_n = 0.3;
  double min_pos_score = 0.0;
  double anchor_scale = 8.0;
  std::vector<double> strides{4, 8, 16, 32, 64};
  std::vector<double> ratios{0.5, 1, 2};
  bool clip_border = false;
};

void add_assign_flags(CLI::App* cmd, AssignFlags& f) {
  auto* ann = cmd->add_option("--ann", f.ann, "COCO annotation file");
  auto* synth = cmd->add_option("--synth", f.synth,
                                "Synthetic single-image scene instead of --ann: gt counts for "
                                "very_tiny,tiny,small,medium[,large]")
                    ->delimiter(',')
                    ->expected(1, 5)
                    ->excludes(ann);
  auto* seed = cmd->add_option("--seed", f.seed, "Seed for --synth (required with it)");
  synth->needs(seed);
  cmd->add_option("--image-size", f.image_size, "Side of the synthetic image in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--strategy", f.strategy, "Assigner: threshold (max-IoU rule) or rka (top-k ranking)")
      ->check(CLI::IsMember({"threshold", "rka"}))
      ->capture_default_str();
  cmd->add_option("--metric", f.metric, "Assignment metric; auto = nwd for rka, iou for threshold")
      ->check(CLI::IsMember({"auto", "iou", "giou", "diou", "ciou", "gwd", "nwd"}))
      ->capture_default_str();
  cmd->add_option("--k", f.k, "Positives per gt (rka)")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--C", f.c, "NWD normalization constant in pixels")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--theta-p", f.theta_p, "Positive threshold (threshold)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--theta-n", f.theta_n, "Negative threshold (threshold)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--min-pos-score", f.min_pos_score,
                  "Lowest best-anchor score that still gets a compensated positive (threshold); "
                  "Faster R-CNN's RPN uses 0.3")
      ->capture_default_str();
  cmd->add_option("--anchor-scale", f.anchor_scale, "Anchor side = anchor scale * stride")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--strides", f.strides, "Pyramid strides in pixels")->delimiter(',')->capture_default_str();
  cmd->add_option("--ratios", f.ratios, "Anchor aspect ratios w/h")->delimiter(',')->capture_default_str();
  cmd->add_flag("--clip-border", f.clip_border, "Clip anchors to the image")->capture_default_str();
}

std::pair<AssignerConfig, AnchorConfig> to_configs(const AssignFlags& f) {
  AssignerConfig a;
  a.strategy = f.strategy == "threshold" ? AssignStrategy::Threshold : AssignStrategy::Ranking;
  std::string metric = f.metric;
  if (metric == "auto") metric = a.strategy == AssignStrategy::Threshold ? "iou" : "nwd";
  a.metric = {*parse_metric_kind(metric), f.c};
  a.k = f.k;
  a.theta_p = f.theta_p;
  a.theta_n = f.theta_n;
  a.min_pos_score = f.min_pos_score;
  a.validate();
  AnchorConfig anchors;
  anchors.strides = f.strides;
  anchors.ratios = f.ratios;
  anchors.anchor_scale = f.anchor_scale;
  anchors.clip_border = f.clip_border;
  anchors.validate();
  return {a, anchors};
}

AnnotationSet load_source(const AssignFlags& f) {
  if (f.synth.empty()) {
    if (f.ann.empty()) throw InvalidParameter("one of --ann or --synth is required");
    return load_annotations(f.ann);
  }
  SceneSpec spec;
  for (std::size_t b = 0; b < f.synth.size(); ++b) spec.counts[kAllBuckets[b]] = f.synth[b];
  spec.image_w = f.image_size;
  spec.image_h = f.image_size;
  spec.seed = f.seed;
  return synth_scene(spec);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_file_atomic(path, text);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Turns "key = value" lines from --config into "--key=value" arguments for
// every key not already given on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string config_path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(name);
    if (name == "config") {
      if (eq != std::string::npos) config_path = a.substr(eq + 1);
      else if (i + 1 < args.size()) config_path = args[i + 1];
    }
  }
  if (config_path.empty() || args.empty()) return args;

  std::vector<std::string> merged{args.front()};
  for (const auto& [key, value] : load_key_value(config_path)) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "c") flag = "C";
    if (given.count(flag)) continue;
    merged.push_back("--" + flag + "=" + value);
  }
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Box similarity metrics, anchor assignment diagnostics and detection evaluation", "tod"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_path;
  const auto add_config = [&config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value file supplying defaults for any flag of this command");
  };

  // curve
  std::vector<std::string> curve_metrics;
  std::vector<double> curve_scales;
  double curve_ratio = 1.0;
  int curve_max_dev = 30;
  double curve_c = kNwdConstantDefault;
  std::string curve_out = ".";
  auto* curve = app.add_subcommand("curve", "Metric value vs. diagonal center deviation, one CSV per (metric, scale)");
  curve->add_option("--metric", curve_metrics, "Metric(s) to trace")->required()->check(CLI::IsMember(kMetricNames));
  curve->add_option("--scale", curve_scales, "Side length of box A in pixels (repeatable)")
      ->required()
      ->check(CLI::PositiveNumber);
  curve->add_option("--ratio", curve_ratio, "Side of B relative to A")->check(CLI::PositiveNumber)->capture_default_str();
  curve->add_option("--max-dev", curve_max_dev, "Largest deviation in pixels")->check(CLI::NonNegativeNumber)->capture_default_str();
  curve->add_option("--C", curve_c, "NWD normalization constant in pixels")->check(CLI::PositiveNumber)->capture_default_str();
  curve->add_option("--out", curve_out, "Output directory")->capture_default_str();
  add_config(curve);

  // assign-stats
  AssignFlags stats_flags;
  std::string stats_out;
  auto* stats = app.add_subcommand("assign-stats", "Mean positives per gt by scale bucket and pos/neg totals");
  add_assign_flags(stats, stats_flags);
  stats->add_option("--out", stats_out, "JSON report path (default: standard output)");
  add_config(stats);

  // evaluate
  std::string eval_ann;
  std::string eval_dets;
  std::size_t eval_max_det = 1500;
  std::string eval_out;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "COCO-style AP/AR with very tiny/tiny/small/medium strata");
  evaluate_cmd->add_option("--ann", eval_ann, "COCO annotation file")->required();
  evaluate_cmd->add_option("--dets", eval_dets, "COCO detection results file")->required();
  evaluate_cmd->add_option("--max-det", eval_max_det, "Max detections per image and category")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate_cmd->add_option("--out", eval_out, "JSON report path (the table always goes to standard output)");
  add_config(evaluate_cmd);

  // dataset-stats
  std::vector<std::string> ds_ann;
  std::string ds_out;
  auto* dataset = app.add_subcommand("dataset-stats", "Instance counts, absolute size mean/std and bucket shares");
  dataset->add_option("--ann", ds_ann, "COCO annotation file, one per split (repeatable)")->required();
  dataset->add_option("--out", ds_out, "JSON report path (default: standard output)");
  add_config(dataset);

  // sweep
  AssignFlags sweep_flags;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  std::string sweep_out = ".";
  auto* sweep = app.add_subcommand(
      "sweep",
      "Assignment statistics over a parameter sweep. Reports assignment-level counts only; "
      "it does not train or score a detector, so no detection AP is produced");
  add_assign_flags(sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "Swept parameter")->required()->check(CLI::IsMember({"C", "k", "anchor-scale"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output directory for per-value reports and the summary CSV")->capture_default_str();
  add_config(sweep);

  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (curve->parsed()) {
      std::filesystem::create_directories(curve_out);
      for (const auto& name : curve_metrics) {
        const Metric metric{*parse_metric_kind(name), curve_c};
        for (double scale : curve_scales) {
          const auto c = deviation_curve(metric, scale, curve_ratio, curve_max_dev);
          const std::string path = join_path(
              curve_out, "curve_" + name + "_s" + format_number(scale) + "_r" + format_number(curve_ratio) + ".csv");
          export_csv(curve_table(c), path);
          out << path << "\n";
        }
      }
    } else if (stats->parsed()) {
      const auto [assigner, anchors] = to_configs(stats_flags);
      const auto ann = load_source(stats_flags);
      const auto run = assign_dataset(ann, assigner, anchors);
      write_or_print(stats_out, assignment_report_json(run, assigner, anchors), out);
    } else if (evaluate_cmd->parsed()) {
      const auto ann = load_annotations(eval_ann);
      const auto dets = load_detections(eval_dets);
      check_detection_images(ann, dets.detections);
      EvalParams params;
      params.max_det = eval_max_det;
      const auto gts = ann.ground_truths();
      const auto cats = ann.category_ids();
      const auto report = evaluate(gts, cats, dets.detections, params);
      if (report.unknown_category_detections > 0)
        err << "warning: " << report.unknown_category_detections << " detection(s) with unknown category_id\n";
      if (dets.dropped_boxes > 0) err << "warning: dropped " << dets.dropped_boxes << " zero-area detection(s)\n";
      out << format_report_table(report);
      if (!eval_out.empty()) write_file_atomic(eval_out, eval_report_json(report, dets.dropped_boxes));
    } else if (dataset->parsed()) {
      std::vector<AnnotationSet> splits;
      std::vector<DatasetStats> per_split;
      for (const auto& path : ds_ann) {
        splits.push_back(load_annotations(path));
        if (splits.back().dropped_boxes > 0)
          err << "warning: " << path << ": dropped " << splits.back().dropped_boxes << " zero-area box(es)\n";
        per_split.push_back(compute_stats(splits.back()));
      }
      const auto combined = compute_stats(splits);
      write_or_print(ds_out, dataset_stats_json(ds_ann, per_split, combined), out);
    } else if (sweep->parsed()) {
      std::filesystem::create_directories(sweep_out);
      const auto ann = load_source(sweep_flags);
      CsvTable summary{{sweep_param, "total_pos", "total_neg", "total_ignore", "mean_very_tiny", "mean_tiny",
                        "mean_small", "mean_medium", "mean_large", "labels_digest"},
                       {}};
      for (const auto& value : sweep_values) {
        AssignFlags f = sweep_flags;
        try {
          if (sweep_param == "C") f.c = std::stod(value);
          else if (sweep_param == "anchor-scale") f.anchor_scale = std::stod(value);
          else f.k = static_cast<std::size_t>(std::stoul(value));
        } catch (const std::exception&) {
          throw InvalidParameter("sweep value '" + value + "' is not a number");
        }
        const auto [assigner, anchors] = to_configs(f);
        const auto run = assign_dataset(ann, assigner, anchors);
        write_file_atomic(join_path(sweep_out, "sweep_" + sweep_param + "_" + value + ".json"),
                          assignment_report_json(run, assigner, anchors));
        std::vector<CsvCell> row{value,
                                 static_cast<std::int64_t>(run.totals.positives),
                                 static_cast<std::int64_t>(run.totals.negatives),
                                 static_cast<std::int64_t>(run.totals.ignored)};
        for (auto bucket : kAllBuckets) {
          const auto it = run.stats.buckets.find(bucket);
          row.push_back(it == run.stats.buckets.end() ? CsvCell{} : CsvCell{it->second.mean()});
        }
        row.push_back(hex_digest(run.digest));
        summary.rows.push_back(std::move(row));
      }
      const std::string summary_path = join_path(sweep_out, "sweep_" + sweep_param + "_summary.csv");
      export_csv(summary, summary_path);
      out << summary_path << "\n";
    }
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace tod
