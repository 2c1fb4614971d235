#include "evstar/hough_accumulator.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "evstar/errors.hpp"

namespace evstar {

PlaneGrid PlaneGrid::centered(double radius, double bin_size) {
  PlaneGrid g;
  g.bin_size = bin_size;
  g.u_min = g.v_min = -radius;
  g.u_max = g.v_max = radius;
  g.n_u = g.n_v = static_cast<int>(std::ceil((2.0 * radius) / bin_size));
  return g;
}

double HtParams::time_scale_for(const TimeWindow& window) const {
  return time_scale_ms > 0.0 ? time_scale_ms / 1000.0 : auto_time_scale(window);
}

Vec2 roberts_project(const Vec3& z, const Vec3& d) {
  const double w = 1.0 + d.z();
  const double u = (1.0 - d.x() * d.x() / w) * z.x() - (d.x() * d.y() / w) * z.y() - d.x() * z.z();
  const double v = -(d.x() * d.y() / w) * z.x() + (1.0 - d.y() * d.y() / w) * z.y() - d.y() * z.z();
  return Vec2(u, v);
}

bool try_cell_endpoints(const Vec3& mean, const Vec3& direction, const TimeWindow& window,
                        const Vec3& centroid, double time_scale, double eps_dir, Vec2& s_alpha,
                        Vec2& s_beta) {
  if (std::abs(direction.z()) <= eps_dir) return false;
  const Vec3 m = mean + centroid;
  const double tau_beta = static_cast<double>(window.duration_us()) * time_scale;
  const double la = (0.0 - m.z()) / direction.z();
  const double lb = (tau_beta - m.z()) / direction.z();
  s_alpha = m.head<2>() + la * direction.head<2>();
  s_beta = m.head<2>() + lb * direction.head<2>();
  return true;
}

std::pair<Vec2, Vec2> cell_line_endpoints(const Vec3& mean, const Vec3& direction,
                                          const TimeWindow& window, const Vec3& centroid,
                                          double time_scale, double eps_dir) {
  Vec2 sa, sb;
  if (!try_cell_endpoints(mean, direction, window, centroid, time_scale, eps_dir, sa, sb))
    throw DegenerateLine("cell line is orthogonal to the time axis");
  return {sa, sb};
}

namespace {

inline std::size_t hash_key(std::uint32_t key) {
  std::uint64_t h = static_cast<std::uint64_t>(key) * 0x9E3779B97F4A7C15ull;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

// Principal eigenvector of symmetric m2, warm-started at `seed`. Power
// iterations are accepted only when the eigenpair residual is at rounding
// level, so the result always matches the exact decomposition; otherwise fall
// back to it.
Vec3 refine_direction(const Mat3& m2, const Vec3& seed) {
  const double tr = m2.trace();
  if (tr > 0.0) {
    const double tol2 = (1e-13 * tr) * (1e-13 * tr);
    Vec3 v = seed;
    for (int it = 0; it < 6; ++it) {
      Vec3 w = m2 * v;
      const double n = w.norm();
      if (!(n > 0.0)) break;
      w /= n;
      const Vec3 mw = m2 * w;
      const double rho = w.dot(mw);
      if ((mw - rho * w).squaredNorm() <= tol2) return w;
      v = w;
    }
  }
  return eig_sym3(m2).vectors.col(0);
}

// Lines steeper than the maximum apparent track speed are not star tracks
// (slabs of unrelated events lying along the probe direction also collect
// votes; their fits point along that direction instead of along time).
inline bool track_like(const Vec3& dir, double max_slope) {
  return dir.head<2>().squaredNorm() <= max_slope * max_slope * dir.z() * dir.z();
}

}  // namespace

Mat3 extract_rotation(const Mat3& c, std::int64_t n_events, int n_cells) {
  Eigen::JacobiSVD<Mat3> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) <= 1e-8 * s(0))
    throw InsufficientCorrespondences("correspondence matrix has rank < 2", n_events, n_cells);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

HoughAccumulator::Cell& HoughAccumulator::DirBucket::cell_for(std::uint32_t key) {
  if (slots.empty()) slots.assign(64, 0);
  std::size_t mask = slots.size() - 1;
  std::size_t i = hash_key(key) & mask;
  while (true) {
    const std::uint64_t s = slots[i];
    if (s == 0) break;
    if (static_cast<std::uint32_t>(s >> 32) == key)
      return pool[static_cast<std::uint32_t>(s) - 1];
    i = (i + 1) & mask;
  }
  if ((pool.size() + 1) * 10 >= slots.size() * 7) {
    std::vector<std::uint64_t> bigger(slots.size() * 2, 0);
    const std::size_t bmask = bigger.size() - 1;
    for (const std::uint64_t s : slots) {
      if (s == 0) continue;
      std::size_t j = hash_key(static_cast<std::uint32_t>(s >> 32)) & bmask;
      while (bigger[j] != 0) j = (j + 1) & bmask;
      bigger[j] = s;
    }
    slots.swap(bigger);
    mask = slots.size() - 1;
    i = hash_key(key) & mask;
    while (slots[i] != 0) i = (i + 1) & mask;
  }
  pool.emplace_back();
  slots[i] = (static_cast<std::uint64_t>(key) << 32) | static_cast<std::uint64_t>(pool.size());
  return pool.back();
}

const HoughAccumulator::Cell* HoughAccumulator::DirBucket::find(std::uint32_t key) const {
  if (slots.empty()) return nullptr;
  const std::size_t mask = slots.size() - 1;
  std::size_t i = hash_key(key) & mask;
  while (true) {
    const std::uint64_t s = slots[i];
    if (s == 0) return nullptr;
    if (static_cast<std::uint32_t>(s >> 32) == key)
      return &pool[static_cast<std::uint32_t>(s) - 1];
    i = (i + 1) & mask;
  }
}

void HoughAccumulator::CompensatedMat3::add(const Mat3& x) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double a = sum(i, j);
      const double b = x(i, j);
      const double t = a + b;
      comp(i, j) += (std::abs(a) >= std::abs(b)) ? (a - t) + b : (b - t) + a;
      sum(i, j) = t;
    }
  }
}

HoughAccumulator::HoughAccumulator(std::shared_ptr<const DirectionGrid> grid,
                                   const PlaneGrid& plane, const TimeWindow& window,
                                   const CameraIntrinsics& k, const HtParams& params,
                                   const Vec3& recentre_offset)
    : grid_(std::move(grid)),
      plane_(plane),
      window_(window),
      k_(k),
      params_(params),
      offset_(recentre_offset),
      time_scale_(params.time_scale_for(window)),
      inv_bin_size_(1.0 / plane.bin_size) {
  if (!grid_) throw std::invalid_argument("HoughAccumulator: null direction grid");
  const int n = grid_->size();
  proj_u_.resize(n, 3);
  proj_v_.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    const Vec3& d = grid_->directions[i];
    const double w = 1.0 + d.z();
    proj_u_.row(i) << 1.0 - d.x() * d.x() / w, -d.x() * d.y() / w, -d.x();
    proj_v_.row(i) << -d.x() * d.y() / w, 1.0 - d.y() * d.y() / w, -d.y();
  }
  buckets_.resize(n);
  ubuf_.resize(n);
  vbuf_.resize(n);
}

Vec3 HoughAccumulator::recentred_point(const Event& e) const {
  return spatio_temporal_point(e, window_.alpha_us, time_scale_) - offset_;
}

void HoughAccumulator::step(int dir, const Vec3& z, double u, double v, Lane& lane) {
  if (u < plane_.u_min || v < plane_.v_min) {
    ++lane.diag.n_votes_skipped;
    return;
  }
  const int iu = static_cast<int>((u - plane_.u_min) * inv_bin_size_);
  const int iv = static_cast<int>((v - plane_.v_min) * inv_bin_size_);
  if (iu >= plane_.n_u || iv >= plane_.n_v) {
    ++lane.diag.n_votes_skipped;
    return;
  }
  DirBucket& bucket = buckets_[dir];
  const std::uint32_t key =
      static_cast<std::uint32_t>(iu) * static_cast<std::uint32_t>(plane_.n_v) +
      static_cast<std::uint32_t>(iv);
  Cell& cell = bucket.cell_for(key);
  cell.fit.add(z);
  ++lane.diag.n_pca_updates;
  if (cell.fit.votes < params_.delta) return;

  Vec2 sa, sb;
  if (cell.fit.votes == params_.delta) {
    lane.crossed.push_back({dir, key});
    cell.last_direction = cell.fit.direction();
    if (track_like(cell.last_direction, params_.max_track_slope) &&
        try_cell_endpoints(cell.fit.mean, cell.last_direction, window_, offset_, time_scale_,
                           params_.eps_dir, sa, sb)) {
      const Mat3 contrib = backproject(sa, k_) * backproject(sb, k_).transpose();
      lane.c.add(contrib);
      cell.contribution = static_cast<int>(bucket.contributions.size());
      bucket.contributions.push_back(contrib);
      ++bucket.n_contributing;
    } else {
      ++lane.diag.n_degenerate;
    }
    return;
  }

  if (cell.contribution >= 0) lane.c.sub(bucket.contributions[cell.contribution]);
  cell.last_direction = refine_direction(cell.fit.m2, cell.last_direction);
  if (track_like(cell.last_direction, params_.max_track_slope) &&
      try_cell_endpoints(cell.fit.mean, cell.last_direction, window_, offset_, time_scale_,
                         params_.eps_dir, sa, sb)) {
    const Mat3 contrib = backproject(sa, k_) * backproject(sb, k_).transpose();
    lane.c.add(contrib);
    if (cell.contribution >= 0) {
      bucket.contributions[cell.contribution] = contrib;
    } else {
      cell.contribution = static_cast<int>(bucket.contributions.size());
      bucket.contributions.push_back(contrib);
      ++bucket.n_contributing;
    }
  } else {
    if (cell.contribution >= 0) {
      cell.contribution = -1;
      --bucket.n_contributing;
    }
    ++lane.diag.n_degenerate;
  }
}

void HoughAccumulator::process(const Event& e) {
  if (!window_.contains(e.t_us))
    throw std::invalid_argument("HoughAccumulator::process: event outside window");
  const Vec3 z = recentred_point(e);
  ubuf_.noalias() = proj_u_ * z;
  vbuf_.noalias() = proj_v_ * z;
  const int n = grid_->size();
  for (int i = 0; i < n; ++i) step(i, z, ubuf_(i), vbuf_(i), main_);
  ++main_.diag.n_events;
  crossed_.insert(crossed_.end(), main_.crossed.begin(), main_.crossed.end());
  main_.crossed.clear();
}

void HoughAccumulator::process_all(const std::vector<Event>& events) {
  if (params_.threads <= 1) {
    // Blocked order: project a block of events, then sweep direction-by-
    // direction so each direction's cells stay cached across the block. Cell
    // updates still happen in timestamp order within every direction.
    constexpr int kBlock = 512;
    const int n = grid_->size();
    Eigen::Matrix<double, 3, Eigen::Dynamic> zs(3, kBlock);
    // Event-major rows so a direction's block is contiguous in the sweep.
    Eigen::MatrixXd us(kBlock, n), vs(kBlock, n);
    std::size_t done = 0;
    while (done < events.size()) {
      const int m = static_cast<int>(std::min<std::size_t>(kBlock, events.size() - done));
      for (int b = 0; b < m; ++b) {
        const Event& e = events[done + b];
        if (!window_.contains(e.t_us))
          throw std::invalid_argument("HoughAccumulator::process_all: event outside window");
        zs.col(b) = recentred_point(e);
      }
      us.topRows(m).noalias() = zs.leftCols(m).transpose() * proj_u_.transpose();
      vs.topRows(m).noalias() = zs.leftCols(m).transpose() * proj_v_.transpose();
      for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b) step(i, zs.col(b), us(b, i), vs(b, i), main_);
      done += m;
      main_.diag.n_events += m;
      crossed_.insert(crossed_.end(), main_.crossed.begin(), main_.crossed.end());
      main_.crossed.clear();
    }
    return;
  }
  const int n = grid_->size();
  const int n_lanes = std::min(params_.threads, n);
  std::vector<Lane> lanes(n_lanes);
  std::vector<std::thread> workers;
  workers.reserve(n_lanes);
  for (int lane_idx = 0; lane_idx < n_lanes; ++lane_idx) {
    const int lo = static_cast<int>(static_cast<std::int64_t>(n) * lane_idx / n_lanes);
    const int hi = static_cast<int>(static_cast<std::int64_t>(n) * (lane_idx + 1) / n_lanes);
    workers.emplace_back([this, &events, &lanes, lane_idx, lo, hi] {
      Lane& lane = lanes[lane_idx];
      Eigen::VectorXd us(hi - lo), vs(hi - lo);
      for (const Event& e : events) {
        const Vec3 z = recentred_point(e);
        us.noalias() = proj_u_.middleRows(lo, hi - lo) * z;
        vs.noalias() = proj_v_.middleRows(lo, hi - lo) * z;
        for (int i = lo; i < hi; ++i) step(i, z, us(i - lo), vs(i - lo), lane);
      }
    });
  }
  for (auto& w : workers) w.join();
  for (Lane& lane : lanes) {
    main_.c.add(lane.c.value());
    main_.diag.n_votes_skipped += lane.diag.n_votes_skipped;
    main_.diag.n_degenerate += lane.diag.n_degenerate;
    main_.diag.n_pca_updates += lane.diag.n_pca_updates;
    crossed_.insert(crossed_.end(), lane.crossed.begin(), lane.crossed.end());
  }
  main_.diag.n_events += static_cast<std::int64_t>(events.size());
}

Mat3 HoughAccumulator::correspondence_matrix() const { return main_.c.value(); }

const HoughAccumulator::Cell* HoughAccumulator::find_cell(int dir, std::uint32_t bin) const {
  return buckets_[dir].find(bin);
}

const Mat3* HoughAccumulator::contribution_of(const Cell& cell, int dir) const {
  if (cell.contribution < 0) return nullptr;
  return &buckets_[dir].contributions[cell.contribution];
}

int HoughAccumulator::contribution_count() const {
  int n = 0;
  for (const DirBucket& b : buckets_) n += b.n_contributing;
  return n;
}

HtDiagnostics HoughAccumulator::diagnostics() const {
  HtDiagnostics d = main_.diag;
  d.n_cells_over_threshold = static_cast<int>(crossed_.size());
  return d;
}

RelativeRotation HoughAccumulator::finalize() const {
  RelativeRotation rel;
  rel.window = window_;
  rel.diag = diagnostics();
  rel.n_correspondences = contribution_count();
  rel.r = extract_rotation(correspondence_matrix(), rel.diag.n_events,
                           rel.diag.n_cells_over_threshold);
  return rel;
}

HoughAccumulator make_window_accumulator(std::shared_ptr<const DirectionGrid> grid,
                                         const TimeWindow& window, SensorSize sensor,
                                         const CameraIntrinsics& k, const HtParams& params) {
  const double ts = params.time_scale_for(window);
  const double t_extent = static_cast<double>(window.duration_us()) * ts;
  const Vec3 offset(sensor.width / 2.0, sensor.height / 2.0, t_extent / 2.0);
  const double radius = Vec3(sensor.width, sensor.height, t_extent).norm();
  return HoughAccumulator(std::move(grid), PlaneGrid::centered(radius, params.bin_size), window,
                          k, params, offset);
}

RelativeRotation run_chunk(const EventChunk& chunk, const CameraIntrinsics& k,
                           const HtParams& params, std::shared_ptr<const DirectionGrid> grid) {
  if (chunk.empty()) throw std::invalid_argument("run_chunk: empty chunk");
  if (!grid) grid = std::make_shared<const DirectionGrid>(build_direction_grid(params.subdivision_level));

  const double ts = params.time_scale_for(chunk.window);
  Vec3 centroid = Vec3::Zero();
  for (const Event& e : chunk.events)
    centroid += spatio_temporal_point(e, chunk.window.alpha_us, ts);
  centroid /= static_cast<double>(chunk.events.size());

  const double t_extent = static_cast<double>(chunk.window.duration_us()) * ts;
  const double radius = Vec3(chunk.sensor.width, chunk.sensor.height, t_extent).norm();
  HoughAccumulator acc(std::move(grid), PlaneGrid::centered(radius, params.bin_size),
                       chunk.window, k, params, centroid);
  acc.process_all(chunk.events);
  return acc.finalize();
}

}  // namespace evstar
