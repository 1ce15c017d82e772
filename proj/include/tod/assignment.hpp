// SPDX-License-Identifier: Apache-2.0
//
// Anchor generation over a feature pyramid and anchor label assignment:
// the max-IoU threshold assigner (with sample compensation) and the
// ranking-based assigner, which takes each gt's top-k anchors.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tod/geometry.hpp"
#include "tod/metrics.hpp"

namespace tod {

struct AnchorConfig {
  std::vector<double> strides{4.0, 8.0, 16.0, 32.0, 64.0};
  double anchor_scale = 8.0;
  /// Aspect ratios w/h. Anchors preserve area: w = s*sqrt(r), h = s/sqrt(r).
  std::vector<double> ratios{0.5, 1.0, 2.0};
  bool clip_border = false;

  /// Throws InvalidParameter on empty/non-increasing strides or
  /// non-positive scale or ratios.
  void validate() const;
};

/// Anchors for every pyramid level on a ceil(image / stride) grid. Cell
/// (row i, col j) of level l is centered at ((j + 0.5) * stride_l,
/// (i + 0.5) * stride_l). Ordering is level-major, row-major, ratio-minor.
std::vector<Box> generate_anchors(const AnchorConfig& config, double image_w, double image_h);

enum class AssignStrategy { Threshold, Ranking };

std::string_view to_string(AssignStrategy strategy) noexcept;

struct AssignerConfig {
  AssignStrategy strategy = AssignStrategy::Ranking;
  Metric metric{MetricKind::NWD, kNwdConstantDefault};
  double theta_p = 0.7;
  double theta_n = 0.3;
  /// Threshold assigner only: a gt's best anchor is forced positive when its
  /// score is at least this value. 0 compensates every gt; Faster R-CNN's
  /// RPN uses 0.3.
  double min_pos_score = 0.0;
  std::size_t k = 2;

  void validate() const;
};

/// Per-anchor label: a gt index, or one of the two negative sentinels.
class AnchorLabel {
 public:
  static constexpr std::int64_t kNegative = -1;
  static constexpr std::int64_t kIgnore = -2;

  static AnchorLabel positive(std::size_t gt) { return AnchorLabel(static_cast<std::int64_t>(gt)); }
  static AnchorLabel negative() { return AnchorLabel(kNegative); }
  static AnchorLabel ignore() { return AnchorLabel(kIgnore); }

  bool is_positive() const noexcept { return code_ >= 0; }
  bool is_negative() const noexcept { return code_ == kNegative; }
  bool is_ignore() const noexcept { return code_ == kIgnore; }
  std::size_t gt() const noexcept { return static_cast<std::size_t>(code_); }
  /// gt index, -1 for negative, -2 for ignore.
  std::int64_t code() const noexcept { return code_; }

  friend bool operator==(const AnchorLabel&, const AnchorLabel&) = default;

 private:
  explicit AnchorLabel(std::int64_t code) : code_(code) {}
  std::int64_t code_;
};

struct AssignmentResult {
  std::vector<AnchorLabel> labels;
  std::vector<std::size_t> pos_count_per_gt;
  /// Best raw metric value of each gt over all anchors (for GWD, the
  /// smallest distance). -inf/+inf when there are no anchors.
  std::vector<double> max_metric_per_gt;

  std::size_t num_positive() const;
  std::size_t num_negative() const;
  std::size_t num_ignore() const;
};

/// Classic max-IoU rule. An anchor whose best score reaches theta_p is
/// positive for its argmax gt, below theta_n it is negative, else ignored.
/// Then, gt by gt in index order, each gt's best anchor (lowest index on
/// ties) is forced positive for that gt if its score is >= min_pos_score;
/// a later gt overrides an earlier one on a shared best anchor.
/// Requires a similarity metric (GWD is rejected with InvalidParameter).
AssignmentResult assign_threshold(const AssignerConfig& cfg, std::span<const Box> gts,
                                  std::span<const Box> anchors);

/// Ranking-based assignment. Each gt nominates its k best anchors (ties to
/// the lower anchor index). A nominated anchor goes to the nominating gt
/// that scores it highest, ties to the lower gt index. A gt that loses all
/// its nominations then takes its best-ranked anchor still unassigned, or
/// failing that its best anchor held by a gt with two or more, so every gt
/// keeps a positive whenever anchors >= gts. Everything else is negative;
/// there is no ignore band. GWD ranks ascending.
AssignmentResult assign_rka(const AssignerConfig& cfg, std::span<const Box> gts,
                            std::span<const Box> anchors);

/// Dispatches on cfg.strategy.
AssignmentResult assign(const AssignerConfig& cfg, std::span<const Box> gts,
                        std::span<const Box> anchors);

struct SampledIndices {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
};

/// Uniform pos/neg sampling as in RPN training: up to
/// floor(batch * pos_fraction) positives, negatives fill the rest of the
/// batch. Index lists are returned in ascending order.
SampledIndices sample(const AssignmentResult& result, std::size_t batch, double pos_fraction,
                      std::uint64_t seed);

/// 64-bit FNV-1a over the label codes; equal digests mean equal labelings
/// with overwhelming probability.
std::uint64_t labels_digest(std::span<const AnchorLabel> labels, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace tod
