#include "evstar/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace evstar {

bool AttitudeTable::contains(std::int64_t t_us) const {
  return std::binary_search(times_us.begin(), times_us.end(), t_us);
}

const Mat3& AttitudeTable::at(std::int64_t t_us) const {
  const auto it = std::lower_bound(times_us.begin(), times_us.end(), t_us);
  if (it == times_us.end() || *it != t_us)
    throw std::out_of_range("no attitude recorded at t=" + std::to_string(t_us) + "us");
  return attitudes[static_cast<std::size_t>(it - times_us.begin())];
}

AttitudeTable sample_ground_truth(const GroundTruth& gt) {
  AttitudeTable table;
  table.times_us = gt.sample_times_us;
  table.attitudes.reserve(table.times_us.size());
  for (const std::int64_t t : table.times_us) table.attitudes.push_back(gt.attitude_at(t));
  return table;
}

AttitudeTable table_of(const AttitudeSolution& solution) {
  AttitudeTable table;
  table.times_us = solution.times;
  table.attitudes = solution.attitudes;
  return table;
}

double rms_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum_sq = 0.0;
  for (const double v : values) sum_sq += v * v;
  return std::sqrt(sum_sq / static_cast<double>(values.size()));
}

RelativeEvalReport eval_relative(const EdgeSet& edges, const AttitudeTable& gt) {
  if (edges.edges.empty()) throw std::invalid_argument("no edges to evaluate");
  RelativeEvalReport report;
  std::map<std::int64_t, GroupStats> groups;
  std::vector<double> all;
  for (const Edge& e : edges.edges) {
    const Mat3 truth = gt.at(e.alpha_us) * gt.at(e.beta_us).transpose();
    const double err_deg = rad_to_deg(angular_distance(e.r, truth));
    const std::int64_t duration = e.beta_us - e.alpha_us;
    auto& group = groups.try_emplace(duration).first->second;
    group.duration_us = duration;
    group.errors_deg.push_back(err_deg);
    report.per_edge_deg.push_back(err_deg);
    all.push_back(err_deg);
  }
  for (auto& [duration, group] : groups) {
    group.rms_deg = rms_of(group.errors_deg);
    double sum_sq = 0.0;
    for (const double v : group.errors_deg) sum_sq += v * v;
    group.root_sum_sq_deg = std::sqrt(sum_sq);
    report.groups.push_back(std::move(group));
  }
  report.overall_rms_deg = rms_of(all);
  report.n_edges = static_cast<std::int64_t>(edges.edges.size());
  return report;
}

AbsoluteEvalReport eval_absolute(const AttitudeSolution& solution, const AttitudeTable& gt) {
  if (solution.times.empty()) throw std::invalid_argument("no attitudes to evaluate");
  AbsoluteEvalReport report;
  report.times_us = solution.times;
  report.errors_deg.reserve(solution.times.size());
  for (std::size_t i = 0; i < solution.times.size(); ++i)
    report.errors_deg.push_back(
        rad_to_deg(angular_distance(solution.attitudes[i], gt.at(solution.times[i]))));
  report.rms_deg = rms_of(report.errors_deg);
  return report;
}

namespace {

double time_once(Method method, const EventChunk& chunk, const CameraIntrinsics& k,
                 const HtParams& ht_params, const CmOptions& cm_options,
                 const std::shared_ptr<const DirectionGrid>& grid) {
  const auto start = std::chrono::steady_clock::now();
  if (method == Method::ht) {
    (void)run_chunk(chunk, k, ht_params, grid);
  } else {
    (void)cm_estimate(chunk, k, cm_options);
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

std::vector<ChunkTiming> benchmark_chunks(Method method, const std::vector<EventChunk>& chunks,
                                          const CameraIntrinsics& k, const HtParams& ht_params,
                                          const CmOptions& cm_options) {
  if (chunks.empty()) throw std::invalid_argument("no chunks to benchmark");
  std::shared_ptr<const DirectionGrid> grid;
  if (method == Method::ht)
    grid = std::make_shared<DirectionGrid>(build_direction_grid(ht_params.subdivision_level));
  (void)time_once(method, chunks.front(), k, ht_params, cm_options, grid);  // warm-up

  std::vector<ChunkTiming> timings;
  timings.reserve(chunks.size());
  for (const EventChunk& chunk : chunks) {
    ChunkTiming t;
    t.window = chunk.window;
    t.n_events = static_cast<std::int64_t>(chunk.events.size());
    for (double& run : t.runs_s) run = time_once(method, chunk, k, ht_params, cm_options, grid);
    std::array<double, 3> sorted = t.runs_s;
    std::sort(sorted.begin(), sorted.end());
    t.median_s = sorted[1];
    timings.push_back(t);
  }
  return timings;
}

std::vector<BenchmarkRow> summarize_benchmark(Method method,
                                              const std::vector<ChunkTiming>& timings) {
  std::map<std::int64_t, std::vector<const ChunkTiming*>> by_duration;
  for (const ChunkTiming& t : timings) by_duration[t.window.duration_us()].push_back(&t);
  std::vector<BenchmarkRow> rows;
  for (const auto& [duration, group] : by_duration) {
    BenchmarkRow row;
    row.method = method;
    row.duration_us = duration;
    row.n_chunks = static_cast<int>(group.size());
    std::vector<double> medians;
    for (const ChunkTiming* t : group) {
      medians.push_back(t->median_s);
      row.mean_median_s += t->median_s;
      row.total_events += t->n_events;
    }
    row.mean_median_s /= static_cast<double>(group.size());
    std::sort(medians.begin(), medians.end());
    const std::size_t mid = medians.size() / 2;
    row.median_median_s = (medians.size() % 2 == 1)
                              ? medians[mid]
                              : 0.5 * (medians[mid - 1] + medians[mid]);
    rows.push_back(row);
  }
  return rows;
}

const char* method_name(Method method) { return method == Method::ht ? "ht" : "cm"; }

}  // namespace evstar
