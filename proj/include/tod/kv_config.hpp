// SPDX-License-Identifier: Apache-2.0
//
// Plain-text "key = value" configuration for anchors and assigners.
#pragma once

#include <map>
#include <string>
#include <string_view>

#include "tod/assignment.hpp"

namespace tod {

/// Keys are normalized to lower case with '-' mapped to '_'.
using KeyValueConfig = std::map<std::string, std::string>;

/// One "key = value" per line; blank lines and lines starting with '#' are
/// skipped. Throws InvalidParameter naming the offending line.
KeyValueConfig parse_key_value(std::string_view text);
KeyValueConfig load_key_value(const std::string& path);

/// Applies the recognized keys (strategy, metric, theta_p, theta_n, k, c,
/// min_pos_score, anchor_scale, strides, ratios, clip_border) on top of the
/// given configs. Recognized keys are erased from `config` when `consume`
/// is set, so callers can reject whatever is left over. Malformed values
/// throw InvalidParameter.
void apply_key_value(KeyValueConfig& config, AssignerConfig& assigner, AnchorConfig& anchors,
                     bool consume = true);

std::string normalize_key(std::string_view key);

}  // namespace tod
