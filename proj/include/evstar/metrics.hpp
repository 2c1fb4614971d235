#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evstar/events.hpp"
#include "evstar/geometry.hpp"
#include "evstar/hough_accumulator.hpp"
#include "evstar/motion_compensation.hpp"
#include "evstar/multires_tracker.hpp"
#include "evstar/rotation_averaging.hpp"
#include "evstar/star_simulator.hpp"

namespace evstar {

/// Absolute attitudes on a discrete time grid (ground truth samples or a
/// solved series); lookups require an exact timestamp match.
struct AttitudeTable {
  std::vector<std::int64_t> times_us;  // sorted ascending
  std::vector<Mat3> attitudes;

  bool contains(std::int64_t t_us) const;
  /// Throws std::out_of_range when the timestamp is not in the table.
  const Mat3& at(std::int64_t t_us) const;
};

AttitudeTable sample_ground_truth(const GroundTruth& gt);
AttitudeTable table_of(const AttitudeSolution& solution);

/// sqrt of the mean squared value; 0 for an empty list.
double rms_of(const std::vector<double>& values);

struct GroupStats {
  std::int64_t duration_us = 0;
  std::vector<double> errors_deg;  // one per edge, input order
  double rms_deg = 0.0;
  double root_sum_sq_deg = 0.0;  // unnormalized companion of the RMS
};

struct RelativeEvalReport {
  std::vector<GroupStats> groups;  // ascending duration; partition of the edges
  std::vector<double> per_edge_deg;  // aligned with the input edge order
  double overall_rms_deg = 0.0;
  std::int64_t n_edges = 0;
};

/// Angular distance between each edge rotation and the ground-truth relative
/// rotation over the same window, grouped by window duration.
RelativeEvalReport eval_relative(const EdgeSet& edges, const AttitudeTable& gt);

struct AbsoluteEvalReport {
  std::vector<std::int64_t> times_us;
  std::vector<double> errors_deg;
  double rms_deg = 0.0;
};

/// Per-node angular distance between solved and ground-truth attitudes; every
/// solved timestamp must exist in the table.
AbsoluteEvalReport eval_absolute(const AttitudeSolution& solution, const AttitudeTable& gt);

enum class Method { ht, cm };

struct ChunkTiming {
  TimeWindow window;
  std::int64_t n_events = 0;
  std::array<double, 3> runs_s{};
  double median_s = 0.0;
};

struct BenchmarkRow {
  Method method = Method::ht;
  std::int64_t duration_us = 0;
  int n_chunks = 0;
  double mean_median_s = 0.0;   // mean over chunks of per-chunk median-of-3
  double median_median_s = 0.0;
  std::int64_t total_events = 0;
};

/// Times the given estimator three times per chunk (after one untimed warm-up
/// on the first chunk) and reports the per-chunk median wall time.
std::vector<ChunkTiming> benchmark_chunks(Method method, const std::vector<EventChunk>& chunks,
                                          const CameraIntrinsics& k, const HtParams& ht_params,
                                          const CmOptions& cm_options);

/// Aggregates chunk timings into one row per (method, chunk duration).
std::vector<BenchmarkRow> summarize_benchmark(Method method,
                                              const std::vector<ChunkTiming>& timings);

const char* method_name(Method method);

}  // namespace evstar
