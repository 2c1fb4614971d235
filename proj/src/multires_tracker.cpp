#include "evstar/multires_tracker.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "evstar/errors.hpp"

namespace evstar {

void BankConfig::validate() const {
  if (dt_us <= 0) throw std::invalid_argument("dt must be positive");
  if (resolutions_us.empty()) throw std::invalid_argument("need at least one resolution");
  for (const std::int64_t r : resolutions_us) {
    if (r <= 0) throw std::invalid_argument("resolutions must be positive");
    if (r % dt_us != 0)
      throw std::invalid_argument("resolution " + std::to_string(r) +
                                  "us is not a multiple of dt");
    if ((r / 2) % dt_us != 0)
      throw std::invalid_argument("lane stride " + std::to_string(r / 2) +
                                  "us is not a multiple of dt");
  }
}

InstancePlan plan_instances(std::int64_t stream_duration_us, const BankConfig& config) {
  config.validate();
  if (stream_duration_us <= 0) throw std::invalid_argument("stream duration must be positive");
  InstancePlan plan;
  for (const std::int64_t r : config.resolutions_us) {
    if (r > stream_duration_us) {
      plan.warnings.push_back("resolution " + std::to_string(r / 1000) +
                              "ms skipped: stream shorter than one window");
      continue;
    }
    for (int lane = 0; lane < 2; ++lane) {
      const std::int64_t offset = lane * (r / 2);
      for (std::int64_t alpha = offset; alpha + r <= stream_duration_us; alpha += r)
        plan.windows.push_back(WindowPlanEntry{TimeWindow{alpha, alpha + r}, r, lane});
    }
  }
  return plan;
}

EdgeSet collect_edges(const std::vector<WindowRecord>& records) {
  EdgeSet set;
  for (const WindowRecord& rec : records) {
    if (!rec.ok) continue;
    set.edges.push_back(Edge{rec.window.alpha_us, rec.window.beta_us, rec.r});
  }
  if (set.edges.empty()) throw DisconnectedGraph("no window produced a rotation");

  // Connectivity over the covered time span: every instant between the first
  // and last edge endpoint must lie inside some edge interval, otherwise the
  // grid nodes inside the hole cannot be related to the rest.
  std::vector<TimeWindow> intervals;
  intervals.reserve(set.edges.size());
  for (const Edge& e : set.edges) intervals.push_back(TimeWindow{e.alpha_us, e.beta_us});
  const std::vector<TimeWindow> gaps = coverage_gaps(std::move(intervals));
  if (!gaps.empty()) {
    std::string msg = "edge graph is disconnected: no edge covers";
    for (std::size_t i = 0; i < gaps.size() && i < 10; ++i) {
      msg += std::string(i == 0 ? " " : "; ") + "(" + std::to_string(gaps[i].alpha_us) +
             "us, " + std::to_string(gaps[i].beta_us) + "us)";
    }
    if (gaps.size() > 10) msg += "; ...";
    throw DisconnectedGraph(msg);
  }
  return set;
}

MultiresTracker::MultiresTracker(const SensorSize& sensor, const CameraIntrinsics& intrinsics,
                                 const BankConfig& config, std::int64_t stream_duration_us)
    : sensor_(sensor),
      intrinsics_(intrinsics),
      config_(config),
      plan_(plan_instances(stream_duration_us, config)),
      grid_(std::make_shared<DirectionGrid>(build_direction_grid(config.ht.subdivision_level))) {
  // Group the plan into lanes; plan order is (resolution, lane, time).
  for (const WindowPlanEntry& entry : plan_.windows) {
    if (lanes_.empty() || lanes_.back().resolution_us != entry.resolution_us ||
        lanes_.back().lane != entry.lane) {
      LaneState state;
      state.resolution_us = entry.resolution_us;
      state.lane = entry.lane;
      lanes_.push_back(std::move(state));
    }
    lanes_.back().windows.push_back(entry.window);
  }
}

void MultiresTracker::open_current(LaneState& state) {
  state.acc = std::make_unique<HoughAccumulator>(make_window_accumulator(
      grid_, state.windows[state.next_window], sensor_, intrinsics_, config_.ht));
  state.pending = std::move(state.boundary);
  state.boundary.clear();
}

void MultiresTracker::flush_pending(LaneState& state) {
  if (!state.acc || state.pending.empty()) return;
  state.acc->process_all(state.pending);
  state.pending.clear();
}

void MultiresTracker::finalize_current(LaneState& state) {
  flush_pending(state);
  WindowRecord rec;
  rec.window = state.windows[state.next_window];
  rec.resolution_us = state.resolution_us;
  rec.lane = state.lane;
  if (!state.acc) {
    rec.error = "no events in window";
  } else {
    const HtDiagnostics diag = state.acc->diagnostics();
    rec.n_events = diag.n_events;
    rec.n_cells_over_threshold = diag.n_cells_over_threshold;
    try {
      rec.r = state.acc->finalize().r;
      rec.ok = true;
    } catch (const InsufficientCorrespondences& err) {
      rec.error = err.what();
    }
  }
  records_.push_back(std::move(rec));
  state.acc.reset();
  ++state.next_window;
  if (state.next_window < state.windows.size()) {
    if (!state.boundary.empty()) open_current(state);
  } else {
    state.boundary.clear();
  }
}

void MultiresTracker::feed(const Event& e) {
  if (e.t_us < last_t_us_)
    throw std::invalid_argument("events must be fed in non-decreasing time order");
  last_t_us_ = e.t_us;
  bool used = false;
  for (LaneState& lane : lanes_) {
    while (lane.next_window < lane.windows.size() &&
           e.t_us > lane.windows[lane.next_window].beta_us)
      finalize_current(lane);
    if (lane.next_window >= lane.windows.size()) continue;
    const TimeWindow& w = lane.windows[lane.next_window];
    if (e.t_us < w.alpha_us) continue;
    if (!lane.acc) open_current(lane);
    lane.pending.push_back(e);
    if (lane.pending.size() >= 512) flush_pending(lane);
    used = true;
    if (e.t_us == w.beta_us) lane.boundary.push_back(e);
  }
  if (!used) ++n_dropped_;
}

void MultiresTracker::finish() {
  for (LaneState& lane : lanes_)
    while (lane.next_window < lane.windows.size()) finalize_current(lane);
}

std::vector<WindowRecord> track_stream(const std::vector<Event>& events,
                                       const SensorSize& sensor,
                                       const CameraIntrinsics& intrinsics,
                                       const BankConfig& config,
                                       std::int64_t stream_duration_us) {
  MultiresTracker tracker(sensor, intrinsics, config, stream_duration_us);
  for (const Event& e : events) tracker.feed(e);
  tracker.finish();
  std::vector<WindowRecord> records = tracker.records();
  std::stable_sort(records.begin(), records.end(),
                   [](const WindowRecord& a, const WindowRecord& b) {
                     if (a.window.alpha_us != b.window.alpha_us)
                       return a.window.alpha_us < b.window.alpha_us;
                     return a.resolution_us < b.resolution_us;
                   });
  return records;
}

}  // namespace evstar
