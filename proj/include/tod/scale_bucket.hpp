// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string_view>

namespace tod {

/// Absolute-size strata: very tiny [2,8), tiny [8,16), small [16,32),
/// medium [32,64) and large [64, inf). Sizes below 2 px are unbucketed.
enum class ScaleBucket { VeryTiny, Tiny, Small, Medium, Large };

inline constexpr std::array<ScaleBucket, 5> kAllBuckets{ScaleBucket::VeryTiny, ScaleBucket::Tiny,
                                                        ScaleBucket::Small, ScaleBucket::Medium,
                                                        ScaleBucket::Large};

struct SizeRange {
  double lo;
  double hi;  ///< exclusive

  bool contains(double size) const noexcept { return size >= lo && size < hi; }
};

constexpr SizeRange bucket_range(ScaleBucket bucket) noexcept {
  switch (bucket) {
    case ScaleBucket::VeryTiny: return {2.0, 8.0};
    case ScaleBucket::Tiny: return {8.0, 16.0};
    case ScaleBucket::Small: return {16.0, 32.0};
    case ScaleBucket::Medium: return {32.0, 64.0};
    case ScaleBucket::Large: return {64.0, std::numeric_limits<double>::infinity()};
  }
  return {0.0, 0.0};
}

constexpr std::string_view to_string(ScaleBucket bucket) noexcept {
  switch (bucket) {
    case ScaleBucket::VeryTiny: return "very_tiny";
    case ScaleBucket::Tiny: return "tiny";
    case ScaleBucket::Small: return "small";
    case ScaleBucket::Medium: return "medium";
    case ScaleBucket::Large: return "large";
  }
  return "unknown";
}

constexpr std::optional<ScaleBucket> bucket_of(double absolute_size) noexcept {
  for (auto bucket : kAllBuckets)
    if (bucket_range(bucket).contains(absolute_size)) return bucket;
  return std::nullopt;
}

}  // namespace tod
