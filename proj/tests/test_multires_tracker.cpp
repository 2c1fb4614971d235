#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "evstar/errors.hpp"
#include "evstar/geometry.hpp"
#include "evstar/multires_tracker.hpp"
#include "evstar/star_simulator.hpp"

using namespace evstar;

namespace {

const CameraIntrinsics kCam{300.0, 300.0, 120.0, 90.0};
const SensorSize kSensor{240, 180};

std::size_t count_windows(const InstancePlan& plan, std::int64_t resolution_us) {
  return static_cast<std::size_t>(
      std::count_if(plan.windows.begin(), plan.windows.end(),
                    [&](const WindowPlanEntry& w) { return w.resolution_us == resolution_us; }));
}

}  // namespace

TEST_CASE("a 45 second stream yields the full staggered window bank") {
  const InstancePlan plan = plan_instances(45'000'000, BankConfig{});
  CHECK(count_windows(plan, 400'000) == 224);
  CHECK(count_windows(plan, 200'000) == 449);
  CHECK(count_windows(plan, 100'000) == 899);
  CHECK(plan.windows.size() == 1572);
  CHECK(plan.warnings.empty());
}

TEST_CASE("planned windows are grouped by resolution and lane and gridded") {
  BankConfig config;
  config.resolutions_us = {400'000, 200'000};
  const InstancePlan plan = plan_instances(2'000'000, config);
  REQUIRE(!plan.windows.empty());
  for (std::size_t i = 1; i < plan.windows.size(); ++i) {
    const auto& a = plan.windows[i - 1];
    const auto& b = plan.windows[i];
    // Order: resolution in config order, then lane, then time.
    const bool same_group = a.resolution_us == b.resolution_us && a.lane == b.lane;
    if (same_group) {
      CHECK(b.window.alpha_us == a.window.beta_us);  // back-to-back within a lane
    } else if (a.resolution_us == b.resolution_us) {
      CHECK(a.lane == 0);
      CHECK(b.lane == 1);
    } else {
      CHECK(a.resolution_us == 400'000);
      CHECK(b.resolution_us == 200'000);
    }
  }
  for (const WindowPlanEntry& w : plan.windows) {
    CHECK(w.window.beta_us - w.window.alpha_us == w.resolution_us);
    CHECK(w.window.alpha_us % config.dt_us == 0);
    CHECK(w.window.beta_us % config.dt_us == 0);
    CHECK(w.window.alpha_us % w.resolution_us == w.lane * (w.resolution_us / 2));
    CHECK(w.window.beta_us <= 2'000'000);
  }
}

TEST_CASE("bank validation rejects resolutions off the staggering grid") {
  BankConfig config;
  config.dt_us = 50'000;
  config.resolutions_us = {250'000};  // half-resolution 125 ms is off-grid
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.resolutions_us = {130'000};  // not a multiple of dt at all
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.resolutions_us = {};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.resolutions_us = {200'000};
  config.dt_us = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.dt_us = 50'000;
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("resolutions longer than the stream are skipped with a warning") {
  const InstancePlan plan = plan_instances(150'000, BankConfig{});
  CHECK(plan.warnings.size() == 2);  // 400 ms and 200 ms do not fit
  REQUIRE(plan.windows.size() == 2);
  CHECK(plan.windows[0].window.alpha_us == 0);
  CHECK(plan.windows[0].window.beta_us == 100'000);
  CHECK(plan.windows[1].window.alpha_us == 50'000);
  CHECK(plan.windows[1].window.beta_us == 150'000);
}

TEST_CASE("an event on a shared lane boundary feeds both adjacent windows") {
  BankConfig config;
  config.resolutions_us = {100'000};
  MultiresTracker tracker(kSensor, kCam, config, 200'000);
  tracker.feed(Event{0, 10.0, 10.0, 1});
  tracker.feed(Event{100'000, 20.0, 20.0, 1});
  tracker.feed(Event{200'000, 30.0, 30.0, 1});
  tracker.finish();
  const auto& records = tracker.records();
  REQUIRE(records.size() == 3);  // lane 0: [0,100], [100,200]; lane 1: [50,150]
  CHECK(records[0].n_events == 2);  // t=0 and the boundary event
  CHECK(records[1].n_events == 2);  // the boundary event again plus t=200ms
  CHECK(records[2].n_events == 1);  // only t=100ms falls in [50,150]
  CHECK(tracker.n_dropped() == 0);
  for (const auto& rec : records) {
    CHECK_FALSE(rec.ok);  // three events cannot produce a rotation
    CHECK_FALSE(rec.error.empty());
  }
}

TEST_CASE("feeding events backwards in time is rejected") {
  BankConfig config;
  config.resolutions_us = {100'000};
  MultiresTracker tracker(kSensor, kCam, config, 200'000);
  tracker.feed(Event{50'000, 10.0, 10.0, 1});
  CHECK_THROWS_AS(tracker.feed(Event{40'000, 10.0, 10.0, 1}), std::invalid_argument);
}

TEST_CASE("edge collection keeps successes and demands covered time") {
  WindowRecord a;
  a.window = TimeWindow{0, 100'000};
  a.ok = true;
  a.r = exp_rotation(deg_to_rad(1.0), Vec3::UnitZ());
  WindowRecord b;
  b.window = TimeWindow{50'000, 150'000};
  b.ok = true;
  WindowRecord failed;
  failed.window = TimeWindow{100'000, 200'000};
  failed.ok = false;
  failed.error = "insufficient correspondences";

  const EdgeSet set = collect_edges({a, failed, b});
  REQUIRE(set.edges.size() == 2);
  CHECK(set.edges[0].alpha_us == 0);
  CHECK(set.edges[0].beta_us == 100'000);
  CHECK((set.edges[0].r - a.r).norm() < 1e-15);
  CHECK(set.edges[1].alpha_us == 50'000);

  WindowRecord far;
  far.window = TimeWindow{200'000, 300'000};
  far.ok = true;
  CHECK_THROWS_AS(collect_edges({a, far}), DisconnectedGraph);
  CHECK_THROWS_AS(collect_edges({failed}), DisconnectedGraph);
}

TEST_CASE("streaming a simulated second reproduces the motion in every lane") {
  StarScene scene = generate_scene(6, 20.0, {0.5, 1.0}, 11, kCam, kSensor);
  MotionProfile profile = MotionProfile::constant(1'000'000, deg_to_rad(4.0) * Vec3(0, 1, 0));
  SimParams sp;
  sp.duration_s = 1.0;
  sp.event_rate_per_star_hz = 2000.0;
  sp.pixel_noise_sigma = 0.3;
  sp.outlier_ratio = 0.02;
  const SimOutput sim = generate_events(scene, profile, sp, 12);

  BankConfig config;
  config.resolutions_us = {200'000, 100'000};
  config.ht.delta = 10;
  const auto records =
      track_stream(sim.events, kSensor, kCam, config, profile.total_duration_us());
  CHECK(records.size() == plan_instances(1'000'000, config).windows.size());
  for (std::size_t i = 1; i < records.size(); ++i) {
    const bool ordered =
        records[i - 1].window.alpha_us < records[i].window.alpha_us ||
        (records[i - 1].window.alpha_us == records[i].window.alpha_us &&
         records[i - 1].resolution_us <= records[i].resolution_us);
    CHECK(ordered);
  }
  std::size_t n_ok = 0;
  std::vector<double> errors;
  for (const WindowRecord& rec : records) {
    if (!rec.ok) continue;
    ++n_ok;
    const Mat3 truth = sim.gt.relative(rec.window.alpha_us, rec.window.beta_us);
    errors.push_back(angular_distance_deg(rec.r, truth));
  }
  REQUIRE(n_ok >= records.size() * 3 / 4);
  std::sort(errors.begin(), errors.end());
  CHECK(errors[errors.size() / 2] < 0.5);  // median window error
}
