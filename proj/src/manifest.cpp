#include "evstar/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace evstar {

void save_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["argv"] = manifest.argv;
  j["seed"] = manifest.seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.config) config[key] = value;
  j["config"] = config;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["version"] = manifest.version;
  j["wall_time_s"] = manifest.wall_time_s;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + path + ": " + e.what());
  }
  RunManifest manifest;
  try {
    manifest.command = j.at("command").get<std::string>();
    manifest.argv = j.at("argv").get<std::vector<std::string>>();
    manifest.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [key, value] : j.at("config").items())
      manifest.config.emplace_back(key, value.get<std::string>());
    manifest.inputs = j.at("inputs").get<std::vector<std::string>>();
    manifest.outputs = j.at("outputs").get<std::vector<std::string>>();
    manifest.version = j.at("version").get<std::string>();
    manifest.wall_time_s = j.at("wall_time_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("manifest " + path + " is missing fields: " + e.what());
  }
  return manifest;
}

}  // namespace evstar
