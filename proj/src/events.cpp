#include "evstar/events.hpp"

#include <algorithm>
#include <stdexcept>

namespace evstar {

EventChunk chunk_stream(const std::vector<Event>& stream, std::int64_t alpha_us,
                        std::int64_t beta_us, SensorSize sensor) {
  if (alpha_us >= beta_us) throw std::invalid_argument("chunk_stream: alpha >= beta");
  EventChunk chunk;
  chunk.window = {alpha_us, beta_us};
  chunk.sensor = sensor;
  const auto lo = std::lower_bound(stream.begin(), stream.end(), alpha_us,
                                   [](const Event& e, std::int64_t t) { return e.t_us < t; });
  const auto hi = std::upper_bound(stream.begin(), stream.end(), beta_us,
                                   [](std::int64_t t, const Event& e) { return t < e.t_us; });
  chunk.events.assign(lo, hi);
  return chunk;
}

double auto_time_scale(const TimeWindow& window) {
  return 100.0 / static_cast<double>(window.duration_us());
}

std::vector<TimeWindow> coverage_gaps(std::vector<TimeWindow> windows) {
  std::vector<TimeWindow> gaps;
  if (windows.empty()) return gaps;
  std::sort(windows.begin(), windows.end(), [](const TimeWindow& a, const TimeWindow& b) {
    return a.alpha_us != b.alpha_us ? a.alpha_us < b.alpha_us : a.beta_us < b.beta_us;
  });
  std::int64_t covered_to = windows.front().beta_us;
  for (const TimeWindow& w : windows) {
    if (w.alpha_us > covered_to) gaps.push_back(TimeWindow{covered_to, w.alpha_us});
    covered_to = std::max(covered_to, w.beta_us);
  }
  return gaps;
}

Vec3 spatio_temporal_point(const Event& e, std::int64_t alpha_us, double time_scale) {
  return Vec3(e.x, e.y, static_cast<double>(e.t_us - alpha_us) * time_scale);
}

PointCloud to_points(const EventChunk& chunk, double time_scale) {
  if (chunk.empty()) throw std::invalid_argument("to_points: empty chunk");
  PointCloud cloud;
  cloud.window = chunk.window;
  cloud.time_scale = time_scale > 0.0 ? time_scale : auto_time_scale(chunk.window);
  cloud.points.reserve(chunk.events.size());
  Vec3 sum = Vec3::Zero();
  for (const Event& e : chunk.events) {
    cloud.points.push_back(spatio_temporal_point(e, chunk.window.alpha_us, cloud.time_scale));
    sum += cloud.points.back();
  }
  cloud.centroid = sum / static_cast<double>(cloud.points.size());
  for (Vec3& p : cloud.points) p -= cloud.centroid;
  return cloud;
}

}  // namespace evstar
