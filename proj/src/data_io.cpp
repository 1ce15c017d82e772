// SPDX-License-Identifier: Apache-2.0
#include "tod/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "tod/errors.hpp"

namespace tod {

namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

const json& require(const json& obj, const char* field, const std::string& where) {
  if (!obj.is_object() || !obj.contains(field))
    throw SchemaError(where + ": missing field '" + field + "'");
  return obj.at(field);
}

std::int64_t require_id(const json& obj, const char* field, const std::string& where) {
  const json& v = require(obj, field, where);
  if (!v.is_number_integer()) throw SchemaError(where + ": field '" + field + "' must be an integer");
  return v.get<std::int64_t>();
}

double require_number(const json& obj, const char* field, const std::string& where) {
  const json& v = require(obj, field, where);
  if (!v.is_number()) throw SchemaError(where + ": field '" + field + "' must be a number");
  return v.get<double>();
}

std::array<double, 4> require_bbox(const json& obj, const std::string& where) {
  const json& v = require(obj, "bbox", where);
  if (!v.is_array() || v.size() != 4) throw SchemaError(where + ": 'bbox' must be an array of 4 numbers");
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw SchemaError(where + ": 'bbox' must be an array of 4 numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

const json& require_array(const json& root, const char* field) {
  const json& v = require(root, field, "annotation file");
  if (!v.is_array()) throw SchemaError(std::string("annotation file: '") + field + "' must be an array");
  return v;
}

bool usable(const std::array<double, 4>& bbox) {
  return std::isfinite(bbox[0]) && std::isfinite(bbox[1]) && bbox[2] > 0.0 && bbox[3] > 0.0 &&
         std::isfinite(bbox[2]) && std::isfinite(bbox[3]);
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::int64_t> AnnotationSet::category_ids() const {
  std::vector<std::int64_t> ids;
  for (const auto& c : categories) ids.push_back(c.id);
  return ids;
}

std::vector<GroundTruth> AnnotationSet::ground_truths() const {
  std::vector<GroundTruth> out;
  out.reserve(annotations.size());
  for (const auto& a : annotations) out.push_back({a.image_id, a.category_id, a.box, a.iscrowd});
  return out;
}

AnnotationSet parse_annotations(std::string_view json_text) {
  const json root = parse_json(json_text);
  if (!root.is_object()) throw SchemaError("annotation file: top level must be an object");

  AnnotationSet set;
  std::set<std::int64_t> image_ids;
  for (const auto& img : require_array(root, "images")) {
    const std::int64_t id = require_id(img, "id", "image");
    const std::string where = "image " + std::to_string(id);
    ImageInfo info{id, require_number(img, "width", where), require_number(img, "height", where), {}};
    if (img.contains("file_name") && img["file_name"].is_string()) info.file_name = img["file_name"].get<std::string>();
    if (!image_ids.insert(id).second) throw SchemaError("duplicate image id " + std::to_string(id));
    set.images.push_back(std::move(info));
  }

  std::set<std::int64_t> category_ids;
  for (const auto& cat : require_array(root, "categories")) {
    const std::int64_t id = require_id(cat, "id", "category");
    std::string name = std::to_string(id);
    if (cat.contains("name") && cat["name"].is_string()) name = cat["name"].get<std::string>();
    if (!category_ids.insert(id).second) throw SchemaError("duplicate category id " + std::to_string(id));
    set.categories.push_back({id, std::move(name)});
  }

  std::set<std::int64_t> annotation_ids;
  for (const auto& ann : require_array(root, "annotations")) {
    const std::int64_t id = require_id(ann, "id", "annotation");
    const std::string where = "annotation " + std::to_string(id);
    const std::int64_t image_id = require_id(ann, "image_id", where);
    const std::int64_t category_id = require_id(ann, "category_id", where);
    const auto bbox = require_bbox(ann, where);
    if (!annotation_ids.insert(id).second) throw SchemaError("duplicate annotation id " + std::to_string(id));
    if (!image_ids.count(image_id))
      throw SchemaError(where + " references unknown image_id " + std::to_string(image_id));
    if (!category_ids.count(category_id))
      throw SchemaError(where + " references unknown category_id " + std::to_string(category_id));
    if (!usable(bbox)) {
      ++set.dropped_boxes;
      continue;
    }
    bool crowd = false;
    if (ann.contains("iscrowd")) {
      const json& c = ann["iscrowd"];
      crowd = c.is_boolean() ? c.get<bool>() : (c.is_number() && c.get<double>() != 0.0);
    }
    set.annotations.push_back({id, image_id, category_id, from_xywh(bbox[0], bbox[1], bbox[2], bbox[3]), crowd});
  }
  return set;
}

AnnotationSet load_annotations(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_annotations(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.byte_offset());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string serialize_annotations(const AnnotationSet& set) {
  nlohmann::ordered_json root;
  root["images"] = nlohmann::ordered_json::array();
  for (const auto& img : set.images)
    root["images"].push_back({{"id", img.id}, {"width", img.width}, {"height", img.height}, {"file_name", img.file_name}});
  root["annotations"] = nlohmann::ordered_json::array();
  for (const auto& a : set.annotations) {
    const auto xywh = to_xywh(a.box);
    root["annotations"].push_back({{"id", a.id},
                                   {"image_id", a.image_id},
                                   {"category_id", a.category_id},
                                   {"bbox", {xywh[0], xywh[1], xywh[2], xywh[3]}},
                                   {"area", a.box.area()},
                                   {"iscrowd", a.iscrowd ? 1 : 0}});
  }
  root["categories"] = nlohmann::ordered_json::array();
  for (const auto& c : set.categories) root["categories"].push_back({{"id", c.id}, {"name", c.name}});
  return root.dump() + "\n";
}

void save_annotations(const AnnotationSet& set, const std::string& path) {
  write_file_atomic(path, serialize_annotations(set));
}

DetectionSet parse_detections(std::string_view json_text) {
  const json root = parse_json(json_text);
  if (!root.is_array()) throw SchemaError("detection file: top level must be an array");
  DetectionSet out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& d = root[i];
    const std::string where = "detection " + std::to_string(i);
    const std::int64_t image_id = require_id(d, "image_id", where);
    const std::int64_t category_id = require_id(d, "category_id", where);
    const auto bbox = require_bbox(d, where);
    const double score = require_number(d, "score", where);
    if (!std::isfinite(score)) throw SchemaError(where + ": score must be finite");
    if (!usable(bbox)) {
      ++out.dropped_boxes;
      continue;
    }
    out.detections.push_back({image_id, category_id, from_xywh(bbox[0], bbox[1], bbox[2], bbox[3]), score});
  }
  return out;
}

DetectionSet load_detections(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_detections(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.byte_offset());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string serialize_detections(std::span<const Detection> dets) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const auto& d : dets) {
    const auto xywh = to_xywh(d.box);
    root.push_back({{"image_id", d.image_id},
                    {"category_id", d.category_id},
                    {"bbox", {xywh[0], xywh[1], xywh[2], xywh[3]}},
                    {"score", d.score}});
  }
  return root.dump() + "\n";
}

void check_detection_images(const AnnotationSet& ann, std::span<const Detection> dets) {
  std::set<std::int64_t> ids;
  for (const auto& img : ann.images) ids.insert(img.id);
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (!ids.count(dets[i].image_id))
      throw SchemaError("detection " + std::to_string(i) + " references unknown image_id " +
                        std::to_string(dets[i].image_id));
}

DatasetStats compute_stats(const AnnotationSet& ann) { return compute_stats(std::span<const AnnotationSet>(&ann, 1)); }

DatasetStats compute_stats(std::span<const AnnotationSet> splits) {
  DatasetStats stats;
  std::vector<double> sizes;
  std::map<ScaleBucket, std::size_t> bucket_counts;
  std::size_t below = 0;
  for (const auto& ann : splits) {
    std::map<std::int64_t, std::string> names;
    for (const auto& c : ann.categories) names[c.id] = c.name;
    std::map<std::int64_t, std::size_t> per_image;
    for (const auto& img : ann.images) per_image[img.id] = 0;
    for (const auto& a : ann.annotations) {
      const double size = absolute_size(a.box);
      sizes.push_back(size);
      if (const auto bucket = bucket_of(size)) ++bucket_counts[*bucket];
      else ++below;
      ++stats.per_category[names.count(a.category_id) ? names[a.category_id] : std::to_string(a.category_id)];
      ++per_image[a.image_id];
    }
    stats.images += ann.images.size();
    for (const auto& [id, n] : per_image) ++stats.instances_per_image[n];
  }
  stats.instances = sizes.size();
  if (sizes.empty()) return stats;

  const double n = static_cast<double>(sizes.size());
  CompensatedSum sum;
  for (double s : sizes) sum.add(s);
  stats.size_mean = sum.value() / n;
  CompensatedSum sq;
  for (double s : sizes) sq.add((s - stats.size_mean) * (s - stats.size_mean));
  stats.size_std = std::sqrt(sq.value() / n);
  for (auto bucket : kAllBuckets)
    stats.bucket_percent[bucket] = 100.0 * static_cast<double>(bucket_counts[bucket]) / n;
  stats.below_range_percent = 100.0 * static_cast<double>(below) / n;
  return stats;
}

AnnotationSet synth_scene(const SceneSpec& spec) {
  if (!(spec.image_w > 0.0) || !(spec.image_h > 0.0))
    throw InvalidParameter("scene image dimensions must be positive");
  constexpr int kMaxRetries = 100;

  AnnotationSet set;
  set.images.push_back({1, spec.image_w, spec.image_h, "synthetic.png"});
  set.categories.push_back({1, "object"});
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> log_aspect(std::log(0.5), std::log(2.0));
  std::int64_t next_id = 1;

  for (auto bucket : kAllBuckets) {
    const auto it = spec.counts.find(bucket);
    if (it == spec.counts.end()) continue;
    const SizeRange range = bucket_range(bucket);
    std::uniform_real_distribution<double> size_dist(range.lo, std::isinf(range.hi) ? kSynthLargeMax : range.hi);
    for (std::size_t n = 0; n < it->second; ++n) {
      double w = 0.0;
      double h = 0.0;
      for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        const double s = size_dist(rng);
        const double root = std::sqrt(std::exp(log_aspect(rng)));
        w = s * root;
        h = s / root;
        if (w <= spec.image_w && h <= spec.image_h && bucket_of(std::sqrt(w * h)) == bucket) break;
      }
      w = std::min(w, spec.image_w);
      h = std::min(h, spec.image_h);
      const double cx = std::uniform_real_distribution<double>(w / 2.0, spec.image_w - w / 2.0)(rng);
      const double cy = std::uniform_real_distribution<double>(h / 2.0, spec.image_h - h / 2.0)(rng);
      set.annotations.push_back({next_id++, 1, 1, Box(cx, cy, w, h), false});
    }
  }
  return set;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
            else if constexpr (std::is_same_v<T, double>) out += format_float(v);
            else if constexpr (std::is_same_v<T, std::string>) out += csv_escape(v);
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

void export_csv(const CsvTable& table, const std::string& path) { write_file_atomic(path, format_csv(table)); }

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file", path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("failed writing file", path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot replace file (" + ec.message() + ")", path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file", path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace tod
