// SPDX-License-Identifier: Apache-2.0
#include "tod/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "tod/errors.hpp"

namespace tod {

namespace {

// Orientation-normalized score: larger is always better.
double rank_score(MetricKind kind, double value) noexcept {
  return is_similarity(kind) ? value : -value;
}

void score_row(const Metric& metric, const Box& gt, std::span<const Box> anchors,
               std::vector<double>& row) {
  row.resize(anchors.size());
  for (std::size_t j = 0; j < anchors.size(); ++j)
    row[j] = rank_score(metric.kind, evaluate(metric, gt, anchors[j]));
}

double raw_value(MetricKind kind, double score) noexcept { return is_similarity(kind) ? score : -score; }

void finalize_counts(AssignmentResult& result, std::size_t num_gts) {
  result.pos_count_per_gt.assign(num_gts, 0);
  for (const auto& label : result.labels)
    if (label.is_positive()) ++result.pos_count_per_gt[label.gt()];
}

}  // namespace

void AnchorConfig::validate() const {
  if (strides.empty()) throw InvalidParameter("anchor config needs at least one stride");
  for (std::size_t l = 0; l < strides.size(); ++l) {
    if (!(strides[l] > 0.0) || !std::isfinite(strides[l]))
      throw InvalidParameter("anchor strides must be positive");
    if (l > 0 && !(strides[l] > strides[l - 1]))
      throw InvalidParameter("anchor strides must be strictly increasing");
  }
  if (!(anchor_scale > 0.0) || !std::isfinite(anchor_scale))
    throw InvalidParameter("anchor scale must be positive");
  if (ratios.empty()) throw InvalidParameter("anchor config needs at least one ratio");
  for (double r : ratios)
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("anchor ratios must be positive");
}

std::vector<Box> generate_anchors(const AnchorConfig& config, double image_w, double image_h) {
  config.validate();
  if (!(image_w > 0.0) || !(image_h > 0.0))
    throw InvalidParameter("image dimensions must be positive");

  std::vector<Box> anchors;
  for (double stride : config.strides) {
    const auto cols = static_cast<std::size_t>(std::ceil(image_w / stride));
    const auto rows = static_cast<std::size_t>(std::ceil(image_h / stride));
    const double side = config.anchor_scale * stride;
    anchors.reserve(anchors.size() + rows * cols * config.ratios.size());
    for (std::size_t i = 0; i < rows; ++i) {
      const double cy = (static_cast<double>(i) + 0.5) * stride;
      for (std::size_t j = 0; j < cols; ++j) {
        const double cx = (static_cast<double>(j) + 0.5) * stride;
        for (double ratio : config.ratios) {
          const double w = side * std::sqrt(ratio);
          const double h = side / std::sqrt(ratio);
          if (!config.clip_border) {
            anchors.emplace_back(cx, cy, w, h);
            continue;
          }
          const double x1 = std::max(0.0, cx - w / 2.0);
          const double y1 = std::max(0.0, cy - h / 2.0);
          const double x2 = std::min(image_w, cx + w / 2.0);
          const double y2 = std::min(image_h, cy + h / 2.0);
          // Cells of a ceil-sized grid can sit past the image edge.
          if (x2 > x1 && y2 > y1) anchors.push_back(corners_to_center(x1, y1, x2, y2));
        }
      }
    }
  }
  return anchors;
}

std::string_view to_string(AssignStrategy strategy) noexcept {
  return strategy == AssignStrategy::Threshold ? "threshold" : "rka";
}

void AssignerConfig::validate() const {
  if (!(0.0 <= theta_n && theta_n <= theta_p && theta_p <= 1.0))
    throw InvalidParameter("thresholds must satisfy 0 <= theta_n <= theta_p <= 1");
  if (k < 1) throw InvalidParameter("k must be at least 1");
  if (!std::isfinite(min_pos_score)) throw InvalidParameter("min_pos_score must be finite");
  if (metric.kind == MetricKind::NWD &&
      (!(metric.nwd_constant > 0.0) || !std::isfinite(metric.nwd_constant)))
    throw InvalidParameter("NWD normalization constant must be positive and finite");
}

std::size_t AssignmentResult::num_positive() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const AnchorLabel& l) { return l.is_positive(); }));
}

std::size_t AssignmentResult::num_negative() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const AnchorLabel& l) { return l.is_negative(); }));
}

std::size_t AssignmentResult::num_ignore() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const AnchorLabel& l) { return l.is_ignore(); }));
}

AssignmentResult assign_threshold(const AssignerConfig& cfg, std::span<const Box> gts,
                                  std::span<const Box> anchors) {
  cfg.validate();
  if (!is_similarity(cfg.metric.kind))
    throw InvalidParameter("threshold assignment needs a similarity metric; gwd is a distance");

  const std::size_t num_anchors = anchors.size();
  constexpr double kNone = -std::numeric_limits<double>::infinity();

  // Streams one gt row at a time; strict '>' keeps the lowest index on ties.
  std::vector<double> anchor_best(num_anchors, kNone);
  std::vector<std::size_t> anchor_argmax(num_anchors, 0);
  std::vector<double> gt_best(gts.size(), kNone);
  std::vector<std::size_t> gt_argmax(gts.size(), 0);
  std::vector<double> row;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    score_row(cfg.metric, gts[i], anchors, row);
    for (std::size_t j = 0; j < num_anchors; ++j) {
      if (row[j] > anchor_best[j]) {
        anchor_best[j] = row[j];
        anchor_argmax[j] = i;
      }
      if (row[j] > gt_best[i]) {
        gt_best[i] = row[j];
        gt_argmax[i] = j;
      }
    }
  }

  AssignmentResult result;
  result.labels.assign(num_anchors, AnchorLabel::negative());
  if (!gts.empty()) {
    for (std::size_t j = 0; j < num_anchors; ++j) {
      if (anchor_best[j] >= cfg.theta_p)
        result.labels[j] = AnchorLabel::positive(anchor_argmax[j]);
      else if (anchor_best[j] >= cfg.theta_n)
        result.labels[j] = AnchorLabel::ignore();
    }
    if (num_anchors > 0) {
      for (std::size_t i = 0; i < gts.size(); ++i)
        if (gt_best[i] >= cfg.min_pos_score) result.labels[gt_argmax[i]] = AnchorLabel::positive(i);
    }
  }
  finalize_counts(result, gts.size());
  result.max_metric_per_gt = std::move(gt_best);
  return result;
}

AssignmentResult assign_rka(const AssignerConfig& cfg, std::span<const Box> gts,
                            std::span<const Box> anchors) {
  cfg.validate();
  const std::size_t num_anchors = anchors.size();
  const std::size_t top = std::min(cfg.k, num_anchors);
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  constexpr std::size_t kUnowned = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> owner(num_anchors, kUnowned);
  std::vector<double> owner_score(num_anchors, kNone);
  std::vector<double> gt_best(gts.size(), kNone);

  std::vector<double> row;
  std::vector<std::size_t> order(num_anchors);
  const auto better = [&row](std::size_t a, std::size_t b) {
    return row[a] > row[b] || (row[a] == row[b] && a < b);
  };

  for (std::size_t i = 0; i < gts.size(); ++i) {
    score_row(cfg.metric, gts[i], anchors, row);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(), better);
    if (top > 0) gt_best[i] = row[order[0]];
    for (std::size_t r = 0; r < top; ++r) {
      const std::size_t j = order[r];
      // Gts are visited in index order, so '>' leaves ties with the lower gt.
      if (owner[j] == kUnowned || row[j] > owner_score[j]) {
        owner[j] = i;
        owner_score[j] = row[j];
      }
    }
  }

  std::vector<std::size_t> count(gts.size(), 0);
  for (std::size_t j = 0; j < num_anchors; ++j)
    if (owner[j] != kUnowned) ++count[owner[j]];

  // Rescue pass for gts that lost every nomination to higher-scoring gts:
  // take the best free anchor, else the best one held by a gt with spares.
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (count[i] > 0 || top == 0) continue;
    score_row(cfg.metric, gts[i], anchors, row);
    std::size_t pick = kUnowned;
    for (std::size_t j = 0; j < num_anchors; ++j) {
      if (owner[j] != kUnowned) continue;
      if (pick == kUnowned || row[j] > row[pick]) pick = j;
    }
    if (pick == kUnowned) {
      for (std::size_t j = 0; j < num_anchors; ++j) {
        if (count[owner[j]] < 2) continue;
        if (pick == kUnowned || row[j] > row[pick]) pick = j;
      }
    }
    if (pick == kUnowned) continue;
    if (owner[pick] != kUnowned) --count[owner[pick]];
    owner[pick] = i;
    owner_score[pick] = row[pick];
    ++count[i];
  }

  AssignmentResult result;
  result.labels.reserve(num_anchors);
  for (std::size_t j = 0; j < num_anchors; ++j)
    result.labels.push_back(owner[j] == kUnowned ? AnchorLabel::negative() : AnchorLabel::positive(owner[j]));
  result.pos_count_per_gt = std::move(count);
  result.max_metric_per_gt.reserve(gts.size());
  for (double best : gt_best) result.max_metric_per_gt.push_back(raw_value(cfg.metric.kind, best));
  return result;
}

AssignmentResult assign(const AssignerConfig& cfg, std::span<const Box> gts,
                        std::span<const Box> anchors) {
  return cfg.strategy == AssignStrategy::Threshold ? assign_threshold(cfg, gts, anchors)
                                                   : assign_rka(cfg, gts, anchors);
}

SampledIndices sample(const AssignmentResult& result, std::size_t batch, double pos_fraction,
                      std::uint64_t seed) {
  if (!(pos_fraction >= 0.0 && pos_fraction <= 1.0))
    throw InvalidParameter("pos_fraction must lie in [0, 1]");

  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t j = 0; j < result.labels.size(); ++j) {
    if (result.labels[j].is_positive()) pos.push_back(j);
    else if (result.labels[j].is_negative()) neg.push_back(j);
  }

  const auto pos_quota = static_cast<std::size_t>(std::floor(static_cast<double>(batch) * pos_fraction));
  const std::size_t num_pos = std::min(pos_quota, pos.size());
  const std::size_t num_neg = std::min(batch - num_pos, neg.size());

  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n entries become a uniform sample.
  const auto draw = [&rng](std::vector<std::size_t>& pool, std::size_t n) {
    for (std::size_t t = 0; t < n; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
      std::swap(pool[t], pool[pick(rng)]);
    }
    pool.resize(n);
    std::sort(pool.begin(), pool.end());
  };
  draw(pos, num_pos);
  draw(neg, num_neg);
  return {std::move(pos), std::move(neg)};
}

std::uint64_t labels_digest(std::span<const AnchorLabel> labels, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (const auto& label : labels) {
    auto code = static_cast<std::uint64_t>(label.code());
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (code >> (8 * byte)) & 0xffU;
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

}  // namespace tod
