#include "evstar/config.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include "evstar/errors.hpp"
#include "evstar/text_util.hpp"

namespace evstar {

BankConfig Config::bank() const {
  BankConfig bank;
  bank.resolutions_us = resolutions_us;
  bank.dt_us = dt_us;
  bank.ht = ht;
  return bank;
}

namespace {

int to_int(const std::string& value) {
  const std::int64_t v = parse_int_strict(value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::invalid_argument("value out of range: " + value);
  return static_cast<int>(v);
}

bool to_bool(const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw std::invalid_argument("expected a boolean (0/1/true/false), got '" + value + "'");
}

std::vector<std::int64_t> to_ms_list_us(const std::string& value) {
  std::vector<std::int64_t> out;
  for (const std::string_view part : split(value, ',')) {
    const std::int64_t ms = parse_int_strict(trim(part));
    if (ms <= 0) throw std::invalid_argument("durations must be positive");
    out.push_back(ms * 1000);
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list of durations");
  return out;
}

}  // namespace

void apply_config_entry(Config& config, const std::string& key, const std::string& value) {
  try {
    if (key == "subdivision_level") {
      config.ht.subdivision_level = to_int(value);
    } else if (key == "delta") {
      config.ht.delta = to_int(value);
      if (config.ht.delta < 2) throw std::invalid_argument("delta must be at least 2");
    } else if (key == "bin_size") {
      config.ht.bin_size = parse_double_strict(value);
      if (!(config.ht.bin_size > 0.0)) throw std::invalid_argument("bin_size must be positive");
    } else if (key == "time_scale_ms") {
      config.ht.time_scale_ms = parse_double_strict(value);
    } else if (key == "eps_dir") {
      config.ht.eps_dir = parse_double_strict(value);
      if (!(config.ht.eps_dir > 0.0)) throw std::invalid_argument("eps_dir must be positive");
    } else if (key == "max_track_slope") {
      config.ht.max_track_slope = parse_double_strict(value);
      if (!(config.ht.max_track_slope > 0.0))
        throw std::invalid_argument("max_track_slope must be positive");
    } else if (key == "threads") {
      config.ht.threads = to_int(value);
      if (config.ht.threads < 1) throw std::invalid_argument("threads must be at least 1");
    } else if (key == "resolutions_ms") {
      config.resolutions_us = to_ms_list_us(value);
    } else if (key == "dt_ms") {
      const std::int64_t ms = parse_int_strict(value);
      if (ms <= 0) throw std::invalid_argument("dt_ms must be positive");
      config.dt_us = ms * 1000;
    } else if (key == "anchor_weight") {
      config.anchor_weight = parse_double_strict(value);
      if (!(config.anchor_weight > 0.0))
        throw std::invalid_argument("anchor_weight must be positive");
    } else if (key == "solver_max_iters") {
      config.solver.max_iters = to_int(value);
      if (config.solver.max_iters < 1)
        throw std::invalid_argument("solver_max_iters must be at least 1");
    } else if (key == "solver_tol") {
      config.solver.tol = parse_double_strict(value);
      if (!(config.solver.tol > 0.0)) throw std::invalid_argument("solver_tol must be positive");
    } else if (key == "cm_max_iters") {
      config.cm.max_iters = to_int(value);
      if (config.cm.max_iters < 1) throw std::invalid_argument("cm_max_iters must be at least 1");
    } else if (key == "cm_step_tol") {
      config.cm.step_tol = parse_double_strict(value);
      if (!(config.cm.step_tol > 0.0)) throw std::invalid_argument("cm_step_tol must be positive");
    } else if (key == "cm_fd_step") {
      config.cm.fd_step = parse_double_strict(value);
      if (!(config.cm.fd_step > 0.0)) throw std::invalid_argument("cm_fd_step must be positive");
    } else if (key == "cm_initial_step") {
      config.cm.initial_step = parse_double_strict(value);
      if (!(config.cm.initial_step > 0.0))
        throw std::invalid_argument("cm_initial_step must be positive");
    } else if (key == "kernel_sigma") {
      config.cm.kernel_sigma = parse_double_strict(value);
      if (!(config.cm.kernel_sigma > 0.0))
        throw std::invalid_argument("kernel_sigma must be positive");
    } else if (key == "cm_use_polarity") {
      config.cm.use_polarity = to_bool(value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad value for '" + key + "': " + e.what());
  }
  if (key == "subdivision_level" &&
      (config.ht.subdivision_level < 0 || config.ht.subdivision_level > 7))
    throw std::invalid_argument("subdivision_level must be between 0 and 7");
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  Config config;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t{trim(line)};
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    try {
      apply_config_entry(config, std::string(trim(t.substr(0, eq))),
                         std::string(trim(t.substr(eq + 1))));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return config;
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const Config& config) {
  std::vector<std::pair<std::string, std::string>> snap;
  snap.emplace_back("subdivision_level", std::to_string(config.ht.subdivision_level));
  snap.emplace_back("delta", std::to_string(config.ht.delta));
  snap.emplace_back("bin_size", format_double(config.ht.bin_size));
  snap.emplace_back("time_scale_ms", format_double(config.ht.time_scale_ms));
  snap.emplace_back("eps_dir", format_double(config.ht.eps_dir));
  snap.emplace_back("max_track_slope", format_double(config.ht.max_track_slope));
  snap.emplace_back("threads", std::to_string(config.ht.threads));
  std::string resolutions;
  for (const std::int64_t r : config.resolutions_us) {
    if (!resolutions.empty()) resolutions += ',';
    resolutions += std::to_string(r / 1000);
  }
  snap.emplace_back("resolutions_ms", resolutions);
  snap.emplace_back("dt_ms", std::to_string(config.dt_us / 1000));
  snap.emplace_back("anchor_weight", format_double(config.anchor_weight));
  snap.emplace_back("solver_max_iters", std::to_string(config.solver.max_iters));
  snap.emplace_back("solver_tol", format_double(config.solver.tol));
  snap.emplace_back("cm_max_iters", std::to_string(config.cm.max_iters));
  snap.emplace_back("cm_step_tol", format_double(config.cm.step_tol));
  snap.emplace_back("cm_fd_step", format_double(config.cm.fd_step));
  snap.emplace_back("cm_initial_step", format_double(config.cm.initial_step));
  snap.emplace_back("kernel_sigma", format_double(config.cm.kernel_sigma));
  snap.emplace_back("cm_use_polarity", config.cm.use_polarity ? "1" : "0");
  return snap;
}

}  // namespace evstar
