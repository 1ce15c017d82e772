// SPDX-License-Identifier: Apache-2.0
#include "tod/flat.hpp"

#include "tod/errors.hpp"

namespace tod {

std::vector<Box> boxes_from_flat(std::span<const double> flat) {
  if (flat.size() % 4 != 0)
    throw InvalidInput("flat box array length " + std::to_string(flat.size()) + " is not a multiple of 4");
  std::vector<Box> boxes;
  boxes.reserve(flat.size() / 4);
  for (std::size_t i = 0; i < flat.size(); i += 4) {
    try {
      boxes.emplace_back(flat[i], flat[i + 1], flat[i + 2], flat[i + 3]);
    } catch (const InvalidBox& e) {
      throw InvalidBox("box " + std::to_string(i / 4) + ": " + e.what());
    }
  }
  return boxes;
}

std::vector<double> boxes_to_flat(std::span<const Box> boxes) {
  std::vector<double> flat;
  flat.reserve(boxes.size() * 4);
  for (const auto& b : boxes) flat.insert(flat.end(), {b.cx(), b.cy(), b.w(), b.h()});
  return flat;
}

std::vector<double> pairwise_flat(const Metric& metric, std::span<const double> gts,
                                  std::span<const double> anchors) {
  const auto g = boxes_from_flat(gts);
  const auto a = boxes_from_flat(anchors);
  return pairwise(metric, g, a).values;
}

std::vector<std::int64_t> label_codes(const AssignmentResult& result) {
  std::vector<std::int64_t> codes;
  codes.reserve(result.labels.size());
  for (const auto& label : result.labels) codes.push_back(label.code());
  return codes;
}

std::vector<std::int64_t> assign_rka_flat(std::span<const double> gts, std::span<const double> anchors,
                                          std::size_t k, double nwd_constant) {
  AssignerConfig cfg;
  cfg.strategy = AssignStrategy::Ranking;
  cfg.metric = {MetricKind::NWD, nwd_constant};
  cfg.k = k;
  const auto g = boxes_from_flat(gts);
  const auto a = boxes_from_flat(anchors);
  return label_codes(assign_rka(cfg, g, a));
}

}  // namespace tod
