// SPDX-License-Identifier: Apache-2.0
//
// JSON renderings of the library's reports. Absent values are null.
#pragma once

#include <string>

#include "tod/assignment.hpp"
#include "tod/data_io.hpp"
#include "tod/diagnostics.hpp"
#include "tod/evaluation.hpp"

namespace tod {

std::string assignment_report_json(const DatasetAssignment& run, const AssignerConfig& assigner,
                                   const AnchorConfig& anchors);
std::string eval_report_json(const EvalReport& report, std::size_t dropped_detections = 0);
std::string dataset_stats_json(const std::vector<std::string>& split_names,
                               const std::vector<DatasetStats>& splits, const DatasetStats& combined);

std::string hex_digest(std::uint64_t digest);

}  // namespace tod
