#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evstar/config.hpp"
#include "evstar/csv_io.hpp"
#include "evstar/errors.hpp"
#include "evstar/event_io.hpp"
#include "evstar/manifest.hpp"
#include "evstar/metrics.hpp"
#include "evstar/motion_compensation.hpp"
#include "evstar/multires_tracker.hpp"
#include "evstar/rotation_averaging.hpp"
#include "evstar/star_simulator.hpp"
#include "evstar/text_util.hpp"
#include "evstar/version.hpp"

namespace fs = std::filesystem;

namespace evstar {

namespace {

struct CommonOpts {
  std::string out = "out";
  std::string config_path;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("-o,--out", opts.out, "Output directory")->capture_default_str();
  sub->add_option("--config", opts.config_path, "key=value settings file");
  sub->add_option("--seed", opts.seed, "Random seed")->capture_default_str();
}

Config load_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) return Config{};
  if (!fs::exists(opts.config_path))
    throw std::invalid_argument("config file not found: " + opts.config_path);
  return parse_config_file(opts.config_path);
}

void require_readable(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw std::invalid_argument(std::string(what) + " not found: " + path);
}

fs::path prepare_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::invalid_argument("cannot create output directory " + out + ": " + ec.message());
  return fs::path(out);
}

Vec3 parse_vec3(const std::string& text, const char* what) {
  const std::vector<std::string_view> parts = split(text, ',');
  if (parts.size() != 3)
    throw std::invalid_argument(std::string(what) + " must be three comma-separated numbers");
  return Vec3(parse_double_strict(trim(parts[0])), parse_double_strict(trim(parts[1])),
              parse_double_strict(trim(parts[2])));
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command, const std::vector<std::string>& argv, const fs::path& dir)
      : dir_(dir), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.argv = argv;
    manifest_.version = kVersion;
  }

  void set_seed(std::uint64_t seed) { manifest_.seed = seed; }
  void set_config(const Config& config) { manifest_.config = config_snapshot(config); }
  void add_config(const std::string& key, const std::string& value) {
    manifest_.config.emplace_back(key, value);
  }
  void add_input(const std::string& path) { manifest_.inputs.push_back(path); }
  std::string out_path(const std::string& name) {
    manifest_.outputs.push_back(name);
    return (dir_ / name).string();
  }

  /// Written last so a manifest's presence implies the outputs are complete.
  void finish() {
    manifest_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    save_manifest((dir_ / "manifest.json").string(), manifest_);
  }

 private:
  RunManifest manifest_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
};

std::int64_t grid_ceil(std::int64_t t_us, std::int64_t dt_us) {
  return ((t_us + dt_us - 1) / dt_us) * dt_us;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  CommonOpts common;
  int stars = 20;
  double fov_deg = 30.0;
  double brightness_min = 1.0;
  double brightness_max = 1.0;
  double omega_deg_s = 4.0;
  std::string axis = "0,0,1";
  std::vector<std::string> segments;  // "dur_s:wx,wy,wz" in deg/s
  double duration_s = 45.0;
  double rate_hz = 200.0;
  double noise_px = 0.5;
  double outlier_ratio = 0.05;
  int width = 240;
  int height = 180;
  double fx = 300.0, fy = 300.0;
  double cx = 119.5, cy = 89.5;
  int gt_dt_ms = 50;
  int n_anchors = 5;
};

int cmd_simulate(const SimulateOpts& opts, const std::vector<std::string>& argv) {
  const fs::path dir = prepare_out_dir(opts.common.out);
  ManifestWriter manifest("simulate", argv, dir);
  manifest.set_seed(opts.common.seed);

  const CameraIntrinsics k{opts.fx, opts.fy, opts.cx, opts.cy};
  const SensorSize sensor{opts.width, opts.height};
  const auto duration_us = static_cast<std::int64_t>(std::llround(opts.duration_s * 1e6));

  MotionProfile profile;
  if (opts.segments.empty()) {
    const Vec3 axis = parse_vec3(opts.axis, "--axis");
    if (!(axis.norm() > 0.0)) throw std::invalid_argument("--axis must be non-zero");
    profile = MotionProfile::constant(duration_us,
                                      deg_to_rad(opts.omega_deg_s) * axis.normalized());
  } else {
    for (const std::string& text : opts.segments) {
      const std::size_t colon = text.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("--segment expects dur_s:wx,wy,wz (deg/s)");
      const double dur_s = parse_double_strict(trim(text.substr(0, colon)));
      if (!(dur_s > 0.0)) throw std::invalid_argument("segment duration must be positive");
      const Vec3 omega_deg = parse_vec3(text.substr(colon + 1), "--segment rate");
      profile.segments.push_back(
          MotionSegment{static_cast<std::int64_t>(std::llround(dur_s * 1e6)),
                        deg_to_rad(1.0) * omega_deg});
    }
    if (profile.total_duration_us() < duration_us)
      throw std::invalid_argument("--segment durations must cover --duration-s");
  }

  const StarScene scene =
      generate_scene(opts.stars, opts.fov_deg, {opts.brightness_min, opts.brightness_max},
                     opts.common.seed, k, sensor);
  SimParams params;
  params.duration_s = opts.duration_s;
  params.event_rate_per_star_hz = opts.rate_hz;
  params.pixel_noise_sigma = opts.noise_px;
  params.outlier_ratio = opts.outlier_ratio;
  params.gt_dt_us = static_cast<std::int64_t>(opts.gt_dt_ms) * 1000;
  const SimOutput sim = generate_events(scene, profile, params, opts.common.seed + 1);

  save_event_stream(manifest.out_path("events.csv"), sim.events, sensor);
  write_attitude_csv(manifest.out_path("groundtruth.csv"), sample_ground_truth(sim.gt));
  save_intrinsics(manifest.out_path("intrinsics.txt"), k);

  if (opts.n_anchors > 0) {
    std::vector<AttitudeAnchor> anchors;
    const std::int64_t span = sim.gt.sample_times_us.back();
    for (int i = 0; i < opts.n_anchors; ++i) {
      const std::int64_t raw =
          opts.n_anchors == 1 ? 0 : span * i / (opts.n_anchors - 1);
      const std::int64_t t = (raw / params.gt_dt_us) * params.gt_dt_us;  // snap to grid
      if (!anchors.empty() && anchors.back().t_us == t) continue;
      anchors.push_back(AttitudeAnchor{t, sim.gt.attitude_at(t)});
    }
    write_anchors_csv(manifest.out_path("anchors.csv"), anchors);
  }

  manifest.add_config("sim_stars", std::to_string(opts.stars));
  manifest.add_config("sim_fov_deg", format_double(opts.fov_deg));
  manifest.add_config("sim_duration_s", format_double(opts.duration_s));
  manifest.add_config("sim_rate_hz", format_double(opts.rate_hz));
  manifest.add_config("sim_noise_px", format_double(opts.noise_px));
  manifest.add_config("sim_outlier_ratio", format_double(opts.outlier_ratio));
  manifest.finish();

  std::cout << "simulate: " << sim.events.size() << " events (" << sim.n_signal << " star, "
            << sim.n_outliers << " outlier) over " << format_double(opts.duration_s)
            << " s -> " << dir.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------- track

struct TrackOpts {
  CommonOpts common;
  std::string events_path;
  std::string intrinsics_path;
  std::string method = "ht";
  std::int64_t duration_ms = 0;  // 0: infer from the stream
};

int cmd_track(const TrackOpts& opts, const std::vector<std::string>& argv) {
  require_readable(opts.events_path, "event file");
  require_readable(opts.intrinsics_path, "intrinsics file");
  const Config config = load_config(opts.common);
  const fs::path dir = prepare_out_dir(opts.common.out);
  ManifestWriter manifest("track", argv, dir);
  manifest.set_config(config);
  manifest.add_config("method", opts.method);
  manifest.add_input(opts.events_path);
  manifest.add_input(opts.intrinsics_path);

  const ParsedStream stream = load_event_stream(opts.events_path);
  for (const std::string& w : stream.warnings) std::cerr << "warning: " << w << "\n";
  const CameraIntrinsics k = load_intrinsics(opts.intrinsics_path);
  if (stream.events.empty()) throw std::invalid_argument("event stream is empty");

  const std::int64_t duration_us =
      opts.duration_ms > 0 ? opts.duration_ms * 1000
                           : grid_ceil(stream.events.back().t_us, config.dt_us);
  const BankConfig bank = config.bank();

  std::vector<WindowRecord> records;
  if (opts.method == "ht") {
    records = track_stream(stream.events, stream.sensor, k, bank, duration_us);
  } else {
    const InstancePlan plan = plan_instances(duration_us, bank);
    for (const std::string& w : plan.warnings) std::cerr << "warning: " << w << "\n";
    for (const WindowPlanEntry& entry : plan.windows) {
      WindowRecord rec;
      rec.window = entry.window;
      rec.resolution_us = entry.resolution_us;
      rec.lane = entry.lane;
      const EventChunk chunk = chunk_stream(stream.events, entry.window.alpha_us,
                                            entry.window.beta_us, stream.sensor);
      rec.n_events = static_cast<std::int64_t>(chunk.events.size());
      if (chunk.empty()) {
        rec.error = "no events in window";
      } else {
        try {
          rec.r = cm_estimate(chunk, k, config.cm).rel.r;
          rec.ok = true;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
      }
      records.push_back(std::move(rec));
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const WindowRecord& a, const WindowRecord& b) {
                       if (a.window.alpha_us != b.window.alpha_us)
                         return a.window.alpha_us < b.window.alpha_us;
                       return a.resolution_us < b.resolution_us;
                     });
  }

  write_window_records_csv(manifest.out_path("windows.csv"), records);
  const EdgeSet edges = collect_edges(records);  // throws DisconnectedGraph with gaps
  write_edges_csv(manifest.out_path("edges.csv"), edges);
  manifest.finish();

  const auto n_ok = std::count_if(records.begin(), records.end(),
                                  [](const WindowRecord& r) { return r.ok; });
  std::cout << "track: " << n_ok << "/" << records.size() << " windows -> "
            << edges.edges.size() << " edges (" << opts.method << ") -> " << dir.string()
            << "\n";
  return 0;
}

// ----------------------------------------------------------------- average

struct AverageOpts {
  CommonOpts common;
  std::string edges_path;
  std::string anchors_path;
};

int cmd_average(const AverageOpts& opts, const std::vector<std::string>& argv) {
  require_readable(opts.edges_path, "edges file");
  if (!opts.anchors_path.empty()) require_readable(opts.anchors_path, "anchors file");
  const Config config = load_config(opts.common);
  const fs::path dir = prepare_out_dir(opts.common.out);
  ManifestWriter manifest("average", argv, dir);
  manifest.set_config(config);
  manifest.add_input(opts.edges_path);

  const EdgeSet edges = read_edges_csv(opts.edges_path);
  std::vector<AttitudeAnchor> anchors;
  if (!opts.anchors_path.empty()) {
    anchors = read_anchors_csv(opts.anchors_path);
    manifest.add_input(opts.anchors_path);
  }

  const AttitudeGraph graph = build_graph(edges, anchors, config.dt_us, config.anchor_weight);
  for (const std::string& w : graph.warnings) std::cerr << "warning: " << w << "\n";
  const AttitudeSolution solution = solve(graph, config.solver);
  if (!solution.converged)
    std::cerr << "warning: solver hit max_iters=" << config.solver.max_iters
              << " before reaching tol\n";

  write_solution_csv(manifest.out_path("attitudes.csv"), solution);
  write_residuals_csv(manifest.out_path("residuals.csv"), edges, solution);
  manifest.finish();

  std::cout << "average: " << solution.times.size() << " attitudes, " << solution.iterations
            << " sweeps, objective " << format_double(solution.objective) << " -> "
            << dir.string() << "\n";
  return 0;
}

// -------------------------------------------------------------- compensate

struct CompensateOpts {
  CommonOpts common;
  std::string events_path;
  std::string intrinsics_path;
  std::int64_t from_ms = 0;
  std::int64_t to_ms = 0;
  std::string method = "ht";  // ht | cm | none (zero-motion baseline only)
  bool use_polarity = false;
};

int cmd_compensate(const CompensateOpts& opts, const std::vector<std::string>& argv) {
  require_readable(opts.events_path, "event file");
  require_readable(opts.intrinsics_path, "intrinsics file");
  if (opts.to_ms <= opts.from_ms)
    throw std::invalid_argument("--to-ms must be greater than --from-ms");
  const Config config = load_config(opts.common);
  const fs::path dir = prepare_out_dir(opts.common.out);
  ManifestWriter manifest("compensate", argv, dir);
  manifest.set_config(config);
  manifest.add_config("method", opts.method);
  manifest.add_input(opts.events_path);
  manifest.add_input(opts.intrinsics_path);

  const ParsedStream stream = load_event_stream(opts.events_path);
  const CameraIntrinsics k = load_intrinsics(opts.intrinsics_path);
  const EventChunk chunk =
      chunk_stream(stream.events, opts.from_ms * 1000, opts.to_ms * 1000, stream.sensor);
  if (chunk.empty()) throw std::invalid_argument("selected window contains no events");

  Mat3 estimate = Mat3::Identity();
  if (opts.method == "ht") {
    estimate = run_chunk(chunk, k, config.ht).r;
  } else if (opts.method == "cm") {
    estimate = cm_estimate(chunk, k, config.cm).rel.r;
  } else if (opts.method != "none") {
    throw std::invalid_argument("--method must be ht, cm, or none");
  }

  const AxisAngle rot = log_rotation(estimate);
  WarpParams zero{0.0, Vec3::UnitZ(), chunk.window};
  WarpParams warped{rot.angle, rot.axis, chunk.window};
  const CompensatedImage before =
      render_h_image(chunk, zero, k, config.cm.kernel_sigma, opts.use_polarity);
  const CompensatedImage after =
      render_h_image(chunk, warped, k, config.cm.kernel_sigma, opts.use_polarity);
  const double var_before = variance_contrast(before);
  const double var_after = variance_contrast(after);

  write_pgm16(manifest.out_path("before.pgm"), manifest.out_path("before_scale.txt"), before);
  write_pgm16(manifest.out_path("after.pgm"), manifest.out_path("after_scale.txt"), after);
  {
    std::ofstream summary(dir / "contrast.txt");
    summary << "variance_before=" << format_double(var_before) << "\n"
            << "variance_after=" << format_double(var_after) << "\n"
            << "rotation_deg=" << format_double(rad_to_deg(rot.angle)) << "\n";
    manifest.out_path("contrast.txt");
  }
  manifest.finish();

  std::cout << "compensate: variance " << format_double(var_before) << " -> "
            << format_double(var_after) << " (" << opts.method << ", "
            << format_double(rad_to_deg(rot.angle)) << " deg) -> " << dir.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkOpts {
  CommonOpts common;
  std::string events_path;
  std::string intrinsics_path;
  std::string durations_ms = "100,200,400";
  int chunks_per_duration = 5;
  std::string method = "both";
};

int cmd_benchmark(const BenchmarkOpts& opts, const std::vector<std::string>& argv) {
  require_readable(opts.events_path, "event file");
  require_readable(opts.intrinsics_path, "intrinsics file");
  if (opts.chunks_per_duration < 1)
    throw std::invalid_argument("--chunks-per-duration must be at least 1");
  if (opts.method != "both" && opts.method != "ht" && opts.method != "cm")
    throw std::invalid_argument("--method must be ht, cm, or both");
  const Config config = load_config(opts.common);
  const fs::path dir = prepare_out_dir(opts.common.out);
  ManifestWriter manifest("benchmark", argv, dir);
  manifest.set_config(config);
  manifest.add_input(opts.events_path);
  manifest.add_input(opts.intrinsics_path);

  const ParsedStream stream = load_event_stream(opts.events_path);
  const CameraIntrinsics k = load_intrinsics(opts.intrinsics_path);

  std::vector<EventChunk> chunks;
  for (const std::string_view part : split(opts.durations_ms, ',')) {
    const std::int64_t d_us = parse_int_strict(trim(part)) * 1000;
    if (d_us <= 0) throw std::invalid_argument("durations must be positive");
    for (int i = 0; i < opts.chunks_per_duration; ++i) {
      const std::int64_t alpha = static_cast<std::int64_t>(i) * d_us;
      EventChunk chunk = chunk_stream(stream.events, alpha, alpha + d_us, stream.sensor);
      if (chunk.empty())
        throw std::invalid_argument("stream too short for " + std::to_string(d_us / 1000) +
                                    "ms benchmark chunk " + std::to_string(i));
      chunks.push_back(std::move(chunk));
    }
  }

  std::vector<BenchmarkRow> rows;
  for (const Method method : {Method::ht, Method::cm}) {
    if (opts.method != "both" && opts.method != method_name(method)) continue;
    const std::vector<ChunkTiming> timings =
        benchmark_chunks(method, chunks, k, config.ht, config.cm);
    const std::vector<BenchmarkRow> summary = summarize_benchmark(method, timings);
    rows.insert(rows.end(), summary.begin(), summary.end());
  }

  write_benchmark_csv(manifest.out_path("benchmark.csv"), rows);
  manifest.finish();

  for (const BenchmarkRow& row : rows)
    std::cout << "benchmark: " << method_name(row.method) << " " << row.duration_us / 1000
              << "ms chunks: mean " << format_double(row.mean_median_s) << " s over "
              << row.n_chunks << " chunks\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
  CommonOpts common;
  std::string gt_path;
  std::string edges_path;
  std::string solution_path;
};

int cmd_evaluate(const EvaluateOpts& opts, const std::vector<std::string>& argv) {
  require_readable(opts.gt_path, "ground-truth file");
  if (opts.edges_path.empty() && opts.solution_path.empty())
    throw std::invalid_argument("nothing to evaluate: pass --edges and/or --solution");
  if (!opts.edges_path.empty()) require_readable(opts.edges_path, "edges file");
  if (!opts.solution_path.empty()) require_readable(opts.solution_path, "solution file");
  const fs::path dir = prepare_out_dir(opts.common.out);
  ManifestWriter manifest("evaluate", argv, dir);
  manifest.add_input(opts.gt_path);

  const AttitudeTable gt = read_attitude_csv(opts.gt_path);
  std::string summary_text;

  if (!opts.edges_path.empty()) {
    manifest.add_input(opts.edges_path);
    const EdgeSet edges = read_edges_csv(opts.edges_path);
    const RelativeEvalReport report = eval_relative(edges, gt);
    write_relative_summary_csv(manifest.out_path("relative_summary.csv"), report);
    write_relative_errors_csv(manifest.out_path("relative_errors.csv"), edges, report);
    summary_text += "relative: overall rms " + format_double(report.overall_rms_deg) +
                    " deg over " + std::to_string(report.n_edges) + " edges\n";
    for (const GroupStats& g : report.groups)
      summary_text += "relative " + std::to_string(g.duration_us / 1000) +
                      "ms: rms " + format_double(g.rms_deg) + " deg (n=" +
                      std::to_string(g.errors_deg.size()) + ")\n";
  }
  if (!opts.solution_path.empty()) {
    manifest.add_input(opts.solution_path);
    const AttitudeSolution solution = read_solution_csv(opts.solution_path);
    const AbsoluteEvalReport report = eval_absolute(solution, gt);
    write_absolute_errors_csv(manifest.out_path("absolute_errors.csv"), report);
    summary_text += "absolute: rms " + format_double(report.rms_deg) + " deg over " +
                    std::to_string(report.times_us.size()) + " attitudes\n";
  }

  {
    std::ofstream summary(dir / "summary.txt");
    summary << summary_text;
    manifest.out_path("summary.txt");
  }
  manifest.finish();
  std::cout << summary_text;
  return 0;
}

// ------------------------------------------------------------------- rerun

int cmd_rerun(const std::string& manifest_path) {
  require_readable(manifest_path, "manifest");
  const RunManifest manifest = load_manifest(manifest_path);
  if (manifest.command == "rerun") throw std::invalid_argument("refusing to rerun a rerun");
  std::cout << "rerun: evstar";
  for (const std::string& arg : manifest.argv) std::cout << ' ' << arg;
  std::cout << "\n";
  return run_cli(manifest.argv);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Event-based star tracking: simulation, window-bank rotation estimation, "
               "rotation averaging, and evaluation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic star event stream");
  add_common(simulate, sim.common);
  simulate->add_option("--stars", sim.stars, "Number of stars")->capture_default_str();
  simulate->add_option("--fov-deg", sim.fov_deg, "Star cap full angle, degrees")
      ->check(CLI::Range(1e-6, 90.0))
      ->capture_default_str();
  simulate->add_option("--brightness-min", sim.brightness_min)->capture_default_str();
  simulate->add_option("--brightness-max", sim.brightness_max)->capture_default_str();
  simulate->add_option("--omega-deg-s", sim.omega_deg_s, "Angular rate, deg/s")
      ->capture_default_str();
  simulate->add_option("--axis", sim.axis, "Rotation axis x,y,z")->capture_default_str();
  simulate->add_option("--segment", sim.segments,
                       "Piecewise motion dur_s:wx,wy,wz in deg/s (repeatable; overrides "
                       "--omega-deg-s/--axis)");
  simulate->add_option("--duration-s", sim.duration_s)->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--rate-hz", sim.rate_hz, "Events per star per second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--noise-px", sim.noise_px, "Pixel noise sigma")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--outlier-ratio", sim.outlier_ratio)
      ->check(CLI::Range(0.0, 0.999))
      ->capture_default_str();
  simulate->add_option("--width", sim.width)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--height", sim.height)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--fx", sim.fx)->capture_default_str();
  simulate->add_option("--fy", sim.fy)->capture_default_str();
  simulate->add_option("--cx", sim.cx)->capture_default_str();
  simulate->add_option("--cy", sim.cy)->capture_default_str();
  simulate->add_option("--gt-dt-ms", sim.gt_dt_ms, "Ground-truth sample spacing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--anchors", sim.n_anchors, "Uniform anchor count (0 disables)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  TrackOpts track;
  CLI::App* track_cmd =
      app.add_subcommand("track", "Estimate relative rotations over the window bank");
  add_common(track_cmd, track.common);
  track_cmd->add_option("--events", track.events_path, "Event stream file")->required();
  track_cmd->add_option("--intrinsics", track.intrinsics_path, "Intrinsics file")->required();
  track_cmd->add_option("--method", track.method, "ht or cm")
      ->check(CLI::IsMember({"ht", "cm"}))
      ->capture_default_str();
  track_cmd->add_option("--duration-ms", track.duration_ms,
                        "Stream duration override (default: last event, grid-rounded)");

  AverageOpts average;
  CLI::App* average_cmd =
      app.add_subcommand("average", "Fuse relative rotations into absolute attitudes");
  add_common(average_cmd, average.common);
  average_cmd->add_option("--edges", average.edges_path, "Edges CSV")->required();
  average_cmd->add_option("--anchors", average.anchors_path, "Anchors CSV (optional)");

  CompensateOpts compensate;
  CLI::App* compensate_cmd =
      app.add_subcommand("compensate", "Render motion-compensated before/after images");
  add_common(compensate_cmd, compensate.common);
  compensate_cmd->add_option("--events", compensate.events_path)->required();
  compensate_cmd->add_option("--intrinsics", compensate.intrinsics_path)->required();
  compensate_cmd->add_option("--from-ms", compensate.from_ms)->required();
  compensate_cmd->add_option("--to-ms", compensate.to_ms)->required();
  compensate_cmd->add_option("--method", compensate.method, "ht, cm, or none")
      ->capture_default_str();
  compensate_cmd->add_flag("--use-polarity", compensate.use_polarity,
                           "Signed accumulation in the rendered images");

  BenchmarkOpts benchmark;
  CLI::App* benchmark_cmd =
      app.add_subcommand("benchmark", "Time the window estimators on stream chunks");
  add_common(benchmark_cmd, benchmark.common);
  benchmark_cmd->add_option("--events", benchmark.events_path)->required();
  benchmark_cmd->add_option("--intrinsics", benchmark.intrinsics_path)->required();
  benchmark_cmd->add_option("--durations-ms", benchmark.durations_ms)->capture_default_str();
  benchmark_cmd->add_option("--chunks-per-duration", benchmark.chunks_per_duration)
      ->capture_default_str();
  benchmark_cmd->add_option("--method", benchmark.method, "ht, cm, or both")
      ->capture_default_str();

  EvaluateOpts evaluate;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Compare estimates against ground truth");
  add_common(evaluate_cmd, evaluate.common);
  evaluate_cmd->add_option("--gt", evaluate.gt_path, "Ground-truth attitude CSV")->required();
  evaluate_cmd->add_option("--edges", evaluate.edges_path, "Edges CSV to evaluate");
  evaluate_cmd->add_option("--solution", evaluate.solution_path, "Solved attitudes CSV");

  std::string rerun_path;
  CLI::App* rerun_cmd = app.add_subcommand("rerun", "Replay a run from its manifest");
  rerun_cmd->add_option("manifest", rerun_path, "manifest.json of a previous run")->required();

  std::vector<std::string> argv_vec = args;
  try {
    std::vector<std::string> reversed(argv_vec.rbegin(), argv_vec.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(sim, argv_vec);
    if (*track_cmd) return cmd_track(track, argv_vec);
    if (*average_cmd) return cmd_average(average, argv_vec);
    if (*compensate_cmd) return cmd_compensate(compensate, argv_vec);
    if (*benchmark_cmd) return cmd_benchmark(benchmark, argv_vec);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, argv_vec);
    if (*rerun_cmd) return cmd_rerun(rerun_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}

}  // namespace evstar
