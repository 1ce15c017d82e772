// SPDX-License-Identifier: Apache-2.0
//
// COCO-format annotation and detection files, dataset statistics,
// synthetic scenes, and CSV/JSON output.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tod/evaluation.hpp"
#include "tod/geometry.hpp"
#include "tod/scale_bucket.hpp"

namespace tod {

struct ImageInfo {
  std::int64_t id;
  double width;
  double height;
  std::string file_name;
};

struct Annotation {
  std::int64_t id;
  std::int64_t image_id;
  std::int64_t category_id;
  Box box;
  bool iscrowd = false;
};

struct Category {
  std::int64_t id;
  std::string name;
};

struct AnnotationSet {
  std::vector<ImageInfo> images;
  std::vector<Annotation> annotations;
  std::vector<Category> categories;
  /// Zero-area boxes skipped while loading.
  std::size_t dropped_boxes = 0;

  std::vector<std::int64_t> category_ids() const;
  std::vector<GroundTruth> ground_truths() const;
};

/// Parses COCO annotation JSON. Throws ParseError (with byte offset) on
/// malformed JSON and SchemaError on missing fields, duplicate ids or
/// dangling image/category references.
AnnotationSet parse_annotations(std::string_view json_text);
AnnotationSet load_annotations(const std::string& path);
std::string serialize_annotations(const AnnotationSet& set);
void save_annotations(const AnnotationSet& set, const std::string& path);

struct DetectionSet {
  std::vector<Detection> detections;
  std::size_t dropped_boxes = 0;
};

/// A COCO results array of {image_id, category_id, bbox, score}.
DetectionSet parse_detections(std::string_view json_text);
DetectionSet load_detections(const std::string& path);
std::string serialize_detections(std::span<const Detection> dets);

/// Throws SchemaError naming the first detection whose image is unknown.
void check_detection_images(const AnnotationSet& ann, std::span<const Detection> dets);

struct DatasetStats {
  std::size_t images = 0;
  std::size_t instances = 0;
  std::map<std::string, std::size_t> per_category;
  /// Absolute size sqrt(w*h): mean and population standard deviation.
  double size_mean = 0.0;
  double size_std = 0.0;
  /// Share of instances per bucket, in percent. Sizes below 2 px are
  /// reported in below_range_percent.
  std::map<ScaleBucket, double> bucket_percent;
  double below_range_percent = 0.0;
  /// instances in an image -> number of images with that many.
  std::map<std::size_t, std::size_t> instances_per_image;
};

DatasetStats compute_stats(const AnnotationSet& ann);
/// Pooled statistics over several splits.
DatasetStats compute_stats(std::span<const AnnotationSet> splits);

struct SceneSpec {
  std::map<ScaleBucket, std::size_t> counts;
  double image_w = 800.0;
  double image_h = 800.0;
  std::uint64_t seed = 0;
};

/// Upper size bound used when sampling the open-ended large bucket.
inline constexpr double kSynthLargeMax = 128.0;

/// One image with counts[b] boxes per bucket. Absolute sizes are uniform
/// in the bucket range, aspect ratios log-uniform in [1/2, 2], centers
/// uniform over positions that keep the box inside the image. Boxes that
/// cannot fit are redrawn a bounded number of times, then clipped.
AnnotationSet synth_scene(const SceneSpec& spec);

using CsvCell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// Comma-separated, LF line endings, header row first, floats with six
/// significant digits, monostate as an empty cell.
std::string format_csv(const CsvTable& table);
void export_csv(const CsvTable& table, const std::string& path);

/// Writes to a sibling temp file and renames it over `path`. Throws IoError
/// carrying the path.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace tod
