#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "evstar/events.hpp"
#include "evstar/geometry.hpp"
#include "evstar/hough_accumulator.hpp"

namespace evstar {

/// Bank of staggered fixed-duration windows: for each resolution r, two lanes
/// of back-to-back windows offset by r/2, all endpoints on the dt grid.
struct BankConfig {
  std::vector<std::int64_t> resolutions_us = {400'000, 200'000, 100'000};
  std::int64_t dt_us = 50'000;
  HtParams ht;

  /// Throws std::invalid_argument unless every resolution and every half
  /// resolution (the lane stride) is a positive multiple of dt.
  void validate() const;
};

struct WindowPlanEntry {
  TimeWindow window;
  std::int64_t resolution_us = 0;
  int lane = 0;  // 0: windows at k*r, 1: offset by r/2
};

struct InstancePlan {
  std::vector<WindowPlanEntry> windows;  // ordered by (resolution, lane, time)
  std::vector<std::string> warnings;     // resolutions skipped as longer than the stream
};

/// All windows [k*r + lane*r/2, (k+1)*r + lane*r/2] with end <= duration.
InstancePlan plan_instances(std::int64_t stream_duration_us, const BankConfig& config);

/// Outcome of one finalized window.
struct WindowRecord {
  TimeWindow window;
  std::int64_t resolution_us = 0;
  int lane = 0;
  bool ok = false;
  std::string error;
  Mat3 r = Mat3::Identity();
  std::int64_t n_events = 0;
  int n_cells_over_threshold = 0;
};

struct Edge {
  std::int64_t alpha_us = 0;
  std::int64_t beta_us = 0;
  Mat3 r = Mat3::Identity();  // maps rays seen at beta to rays seen at alpha
};

struct EdgeSet {
  std::vector<Edge> edges;
};

/// One edge per successful record; failed windows are omitted. Throws
/// DisconnectedGraph (listing the uncovered gaps) when the edges do not
/// connect all referenced grid times.
EdgeSet collect_edges(const std::vector<WindowRecord>& records);

/// Streams time-ordered events through the window bank, keeping one live
/// accumulator per lane (at most 2 x resolutions). Windows are closed
/// intervals, so an event at a shared boundary feeds both the closing and the
/// following window of a lane.
class MultiresTracker {
 public:
  MultiresTracker(const SensorSize& sensor, const CameraIntrinsics& intrinsics,
                  const BankConfig& config, std::int64_t stream_duration_us);

  /// Feed the next event; timestamps must be non-decreasing.
  void feed(const Event& e);
  /// Finalize every window still pending (including not-yet-opened ones).
  void finish();

  const std::vector<WindowRecord>& records() const { return records_; }
  const InstancePlan& plan() const { return plan_; }
  std::int64_t n_dropped() const { return n_dropped_; }

 private:
  struct LaneState {
    std::int64_t resolution_us = 0;
    int lane = 0;
    std::vector<TimeWindow> windows;
    std::size_t next_window = 0;  // index of the currently open window
    std::unique_ptr<HoughAccumulator> acc;
    std::vector<Event> boundary;  // events at the open window's end time
    std::vector<Event> pending;   // buffered for blocked processing
  };

  void open_current(LaneState& state);
  void flush_pending(LaneState& state);
  void finalize_current(LaneState& state);

  SensorSize sensor_;
  CameraIntrinsics intrinsics_;
  BankConfig config_;
  InstancePlan plan_;
  std::shared_ptr<const DirectionGrid> grid_;
  std::vector<LaneState> lanes_;
  std::vector<WindowRecord> records_;
  std::int64_t n_dropped_ = 0;
  std::int64_t last_t_us_ = std::numeric_limits<std::int64_t>::min();
};

/// Convenience wrapper: stream a whole sorted event vector and return the
/// records, sorted by (start time, duration).
std::vector<WindowRecord> track_stream(const std::vector<Event>& events,
                                       const SensorSize& sensor,
                                       const CameraIntrinsics& intrinsics,
                                       const BankConfig& config,
                                       std::int64_t stream_duration_us);

}  // namespace evstar
