// SPDX-License-Identifier: Apache-2.0
#include "tod/kv_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "tod/errors.hpp"

namespace tod {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw InvalidParameter("config key '" + key + "': expected a number, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw InvalidParameter("config key '" + key + "': expected a boolean, got '" + value + "'");
}

}  // namespace

std::string normalize_key(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (char ch : key) out.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return out;
}

KeyValueConfig parse_key_value(std::string_view text) {
  KeyValueConfig out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidParameter("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = normalize_key(trim(std::string_view(line).substr(0, eq)));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty())
      throw InvalidParameter("config line " + std::to_string(line_no) + ": empty key");
    out[key] = value;
  }
  return out;
}

KeyValueConfig load_key_value(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file", path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_value(buffer.str());
}

void apply_key_value(KeyValueConfig& config, AssignerConfig& assigner, AnchorConfig& anchors,
                     bool consume) {
  std::vector<std::string> used;
  for (const auto& [key, value] : config) {
    if (key == "strategy") {
      if (value == "threshold") assigner.strategy = AssignStrategy::Threshold;
      else if (value == "rka") assigner.strategy = AssignStrategy::Ranking;
      else throw InvalidParameter("config key 'strategy': expected threshold or rka, got '" + value + "'");
    } else if (key == "metric") {
      const auto kind = parse_metric_kind(value);
      if (!kind) throw InvalidParameter("config key 'metric': unknown metric '" + value + "'");
      assigner.metric.kind = *kind;
    } else if (key == "theta_p") {
      assigner.theta_p = to_double(key, value);
    } else if (key == "theta_n") {
      assigner.theta_n = to_double(key, value);
    } else if (key == "k") {
      const double k = to_double(key, value);
      if (k < 1 || k != static_cast<double>(static_cast<std::size_t>(k)))
        throw InvalidParameter("config key 'k': expected a positive integer, got '" + value + "'");
      assigner.k = static_cast<std::size_t>(k);
    } else if (key == "c") {
      assigner.metric.nwd_constant = to_double(key, value);
    } else if (key == "min_pos_score") {
      assigner.min_pos_score = to_double(key, value);
    } else if (key == "anchor_scale") {
      anchors.anchor_scale = to_double(key, value);
    } else if (key == "strides") {
      anchors.strides = to_list(key, value);
    } else if (key == "ratios") {
      anchors.ratios = to_list(key, value);
    } else if (key == "clip_border") {
      anchors.clip_border = to_bool(key, value);
    } else {
      continue;
    }
    used.push_back(key);
  }
  if (consume)
    for (const auto& key : used) config.erase(key);
}

}  // namespace tod
