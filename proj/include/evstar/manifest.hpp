#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace evstar {

/// Record of one CLI run, written last into the output directory; re-running
/// the stored argv reproduces every deterministic output byte-for-byte.
struct RunManifest {
  std::string command;             // subcommand name
  std::vector<std::string> argv;   // full argument vector, excluding the program name
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // effective settings
  std::vector<std::string> inputs;   // files read
  std::vector<std::string> outputs;  // files written (manifest itself excluded)
  std::string version;
  double wall_time_s = 0.0;
};

void save_manifest(const std::string& path, const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);

}  // namespace evstar
