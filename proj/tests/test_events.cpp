#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "evstar/events.hpp"

using namespace evstar;

namespace {

std::vector<Event> ladder(int n, std::int64_t step_us) {
  std::vector<Event> events;
  for (int i = 0; i < n; ++i)
    events.push_back(Event{i * step_us, static_cast<double>(i), 2.0 * i, i % 2 ? -1 : 1});
  return events;
}

}  // namespace

TEST_CASE("chunk_stream keeps the closed interval, both boundaries included") {
  const std::vector<Event> stream = ladder(11, 10);  // t = 0,10,...,100
  const EventChunk chunk = chunk_stream(stream, 20, 50, SensorSize{240, 180});
  REQUIRE(chunk.events.size() == 4);  // 20, 30, 40, 50
  CHECK(chunk.events.front().t_us == 20);
  CHECK(chunk.events.back().t_us == 50);
  CHECK(chunk.window.alpha_us == 20);
  CHECK(chunk.window.beta_us == 50);
  CHECK(chunk.sensor.width == 240);
  CHECK_FALSE(chunk.empty());
}

TEST_CASE("chunk_stream rejects empty and inverted windows") {
  const std::vector<Event> stream = ladder(3, 10);
  CHECK_THROWS_AS(chunk_stream(stream, 10, 10, SensorSize{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(chunk_stream(stream, 20, 10, SensorSize{1, 1}), std::invalid_argument);
}

TEST_CASE("auto_time_scale maps the window onto 100 scaled units") {
  const TimeWindow window{100, 100100};  // 100 ms
  const double scale = auto_time_scale(window);
  CHECK(scale * static_cast<double>(window.duration_us()) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("spatio_temporal_point hand value") {
  const Event e{2500, 7.0, -3.0, 1};
  const Vec3 p = spatio_temporal_point(e, 500, 0.01);
  CHECK(p.x() == 7.0);
  CHECK(p.y() == -3.0);
  CHECK(p.z() == doctest::Approx(20.0).epsilon(1e-15));  // (2500 - 500) * 0.01
}

TEST_CASE("to_points recentres on the centroid and the offset restores coordinates") {
  EventChunk chunk;
  chunk.window = TimeWindow{0, 1000};
  chunk.sensor = SensorSize{240, 180};
  chunk.events = {Event{0, 1.0, 2.0, 1}, Event{500, 3.0, 6.0, -1}, Event{1000, 5.0, 10.0, 1}};
  const PointCloud cloud = to_points(chunk);
  REQUIRE(cloud.points.size() == 3);

  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : cloud.points) mean += p;
  CHECK(mean.norm() < 1e-12);  // recentred

  // centroid + recentred point reproduces the raw spatio-temporal point.
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3 raw = spatio_temporal_point(chunk.events[i], chunk.window.alpha_us, cloud.time_scale);
    CHECK((cloud.points[i] + cloud.centroid - raw).norm() < 1e-12);
  }
  CHECK(cloud.time_scale == doctest::Approx(auto_time_scale(chunk.window)));
}

TEST_CASE("to_points honours an explicit time scale and rejects empty chunks") {
  EventChunk chunk;
  chunk.window = TimeWindow{0, 1000};
  chunk.events = {Event{1000, 0.0, 0.0, 1}};
  const PointCloud cloud = to_points(chunk, 0.5);
  CHECK(cloud.time_scale == 0.5);

  EventChunk empty;
  empty.window = TimeWindow{0, 1000};
  CHECK_THROWS_AS(to_points(empty), std::invalid_argument);
}

TEST_CASE("coverage_gaps finds uncovered sub-intervals") {
  CHECK(coverage_gaps({}).empty());
  CHECK(coverage_gaps({TimeWindow{0, 10}}).empty());

  // Touching windows merge, so no gap.
  CHECK(coverage_gaps({TimeWindow{0, 10}, TimeWindow{10, 20}}).empty());

  // A hole between covered spans is reported exactly.
  {
    const auto gaps = coverage_gaps({TimeWindow{0, 10}, TimeWindow{20, 30}});
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].alpha_us == 10);
    CHECK(gaps[0].beta_us == 20);
  }

  // Unsorted and nested inputs are handled.
  {
    const auto gaps =
        coverage_gaps({TimeWindow{40, 50}, TimeWindow{0, 30}, TimeWindow{5, 20}, TimeWindow{60, 70}});
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].alpha_us == 30);
    CHECK(gaps[0].beta_us == 40);
    CHECK(gaps[1].alpha_us == 50);
    CHECK(gaps[1].beta_us == 60);
  }
}
