#pragma once

#include <cstdint>
#include <vector>

#include "evstar/geometry.hpp"

namespace evstar {

/// Single sensor event. Timestamps are microseconds, polarity is +1 or -1.
struct Event {
  std::int64_t t_us = 0;
  double x = 0.0;
  double y = 0.0;
  int polarity = 1;
};

struct SensorSize {
  int width = 0;
  int height = 0;
};

/// Closed time interval [alpha_us, beta_us].
struct TimeWindow {
  std::int64_t alpha_us = 0;
  std::int64_t beta_us = 0;

  std::int64_t duration_us() const { return beta_us - alpha_us; }
  bool contains(std::int64_t t) const { return t >= alpha_us && t <= beta_us; }
};

struct EventChunk {
  std::vector<Event> events;
  TimeWindow window;
  SensorSize sensor;

  bool empty() const { return events.empty(); }
};

/// Recentred spatio-temporal points (x, y, scaled time). `centroid` is the
/// offset that was subtracted; adding it back restores window coordinates.
struct PointCloud {
  std::vector<Vec3> points;
  Vec3 centroid = Vec3::Zero();
  TimeWindow window;
  double time_scale = 0.0;  // scaled units per microsecond
};

/// Events of `stream` (sorted by t) falling in the closed window [alpha, beta].
/// Throws std::invalid_argument when alpha >= beta.
EventChunk chunk_stream(const std::vector<Event>& stream, std::int64_t alpha_us,
                        std::int64_t beta_us, SensorSize sensor);

/// Default scale: the window duration maps to 100 scaled time units.
double auto_time_scale(const TimeWindow& window);

/// Sub-intervals of [min alpha, max beta] not covered by any input window.
/// Windows that touch or overlap merge; an empty input yields no gaps.
std::vector<TimeWindow> coverage_gaps(std::vector<TimeWindow> windows);

/// Event -> (x, y, (t - alpha) * time_scale), before recentring.
Vec3 spatio_temporal_point(const Event& e, std::int64_t alpha_us, double time_scale);

/// Chunk as a recentred point cloud. Throws std::invalid_argument on an empty
/// chunk; pass time_scale <= 0 to use auto_time_scale.
PointCloud to_points(const EventChunk& chunk, double time_scale = 0.0);

}  // namespace evstar
