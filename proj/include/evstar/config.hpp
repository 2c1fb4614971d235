#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "evstar/hough_accumulator.hpp"
#include "evstar/motion_compensation.hpp"
#include "evstar/multires_tracker.hpp"
#include "evstar/rotation_averaging.hpp"

namespace evstar {

/// Every tunable in one place, settable from `key=value` config files.
struct Config {
  HtParams ht;
  std::vector<std::int64_t> resolutions_us = {400'000, 200'000, 100'000};
  std::int64_t dt_us = 50'000;
  double anchor_weight = 10.0;
  SolverOptions solver;
  CmOptions cm;

  BankConfig bank() const;
};

/// Applies one entry; throws std::invalid_argument on unknown keys or values
/// that fail a setting's validation.
void apply_config_entry(Config& config, const std::string& key, const std::string& value);

/// `key=value` lines; '#' starts a comment; blank lines ignored.
Config parse_config_file(const std::string& path);

/// The effective settings as ordered key/value text, for run manifests.
std::vector<std::pair<std::string, std::string>> config_snapshot(const Config& config);

}  // namespace evstar
