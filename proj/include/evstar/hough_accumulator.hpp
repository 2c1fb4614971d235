#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "evstar/direction_grid.hpp"
#include "evstar/events.hpp"
#include "evstar/geometry.hpp"
#include "evstar/line_fit.hpp"

namespace evstar {

/// Regular binning of the plane orthogonal to a candidate direction.
struct PlaneGrid {
  double u_min = 0.0, u_max = 0.0;
  double v_min = 0.0, v_max = 0.0;
  double bin_size = 2.0;
  int n_u = 0, n_v = 0;

  static PlaneGrid centered(double radius, double bin_size);

  bool bin_of(double u, double v, int& iu, int& iv) const {
    if (u < u_min || v < v_min) return false;
    iu = static_cast<int>((u - u_min) / bin_size);
    iv = static_cast<int>((v - v_min) / bin_size);
    return iu < n_u && iv < n_v;
  }
};

struct HtParams {
  int subdivision_level = 4;
  int delta = 5;             // votes needed before a cell contributes
  double bin_size = 2.0;     // scaled units
  double time_scale_ms = 0.0;  // scaled units per millisecond; <= 0 selects auto
  double eps_dir = 1e-6;
  // A star track advances steadily in time, so its fitted line moves at most
  // this many pixels per scaled time unit. Cells whose line is steeper are
  // projection artifacts (event slabs lying along the probe direction) and
  // are excluded from the correspondence matrix.
  double max_track_slope = 0.15;
  int threads = 1;

  /// Scaled units per microsecond; auto maps the window to 100 units.
  double time_scale_for(const TimeWindow& window) const;
};

struct HtDiagnostics {
  std::int64_t n_events = 0;
  std::int64_t n_votes_skipped = 0;   // projections outside the plane grid
  std::int64_t n_degenerate = 0;      // endpoint evaluations skipped
  std::int64_t n_pca_updates = 0;
  int n_cells_over_threshold = 0;
};

struct RelativeRotation {
  Mat3 r = Mat3::Identity();
  TimeWindow window;
  int n_correspondences = 0;
  HtDiagnostics diag;
};

/// Coordinates of `z` in the plane orthogonal to unit direction `d`
/// (d must not point along -e3; the hemisphere convention guarantees d3 > 0).
/// The projection is invariant to sliding z along d.
Vec2 roberts_project(const Vec3& z, const Vec3& d);

/// Image-plane points where a fitted line crosses the window bounds. `mean`
/// and `direction` describe the line in recentred coordinates; `centroid` and
/// `time_scale` restore window coordinates. Throws DegenerateLine when the
/// direction's time component is within eps_dir of zero. Returns
/// {s_alpha, s_beta} in pixels.
std::pair<Vec2, Vec2> cell_line_endpoints(const Vec3& mean, const Vec3& direction,
                                          const TimeWindow& window, const Vec3& centroid,
                                          double time_scale, double eps_dir);

/// Non-throwing variant used on the hot path.
bool try_cell_endpoints(const Vec3& mean, const Vec3& direction, const TimeWindow& window,
                        const Vec3& centroid, double time_scale, double eps_dir, Vec2& s_alpha,
                        Vec2& s_beta);

/// Rotation taking end-of-window rays to start-of-window rays, from the
/// correspondence matrix C = sum of ray_alpha * ray_beta^T. Throws
/// InsufficientCorrespondences when rank(C) < 2.
Mat3 extract_rotation(const Mat3& c, std::int64_t n_events, int n_cells);

/// Streaming accumulator over one time window. Every event casts one vote per
/// grid direction into the plane cell its projection falls in; each cell keeps
/// an exact running line fit (mean + scatter), and once a cell has `delta`
/// votes its line's window-bound endpoints contribute a ray correspondence to
/// C. Later votes replace that cell's contribution (subtract old, add new), so
/// C always equals the sum over contributing cells of their current endpoint
/// rays.
class HoughAccumulator {
 public:
  struct CellRef {
    int dir;
    std::uint32_t bin;
  };

  /// Per-cell vote state. `last_direction` is the eigenvector the cell's
  /// current C contribution was computed with (refined in place on every hot
  /// vote); `contribution` indexes the stored outer product, -1 while the cell
  /// is below threshold or its line is degenerate.
  struct Cell {
    ScatterFit fit;
    Vec3 last_direction = Vec3::Zero();
    int contribution = -1;
  };

  HoughAccumulator(std::shared_ptr<const DirectionGrid> grid, const PlaneGrid& plane,
                   const TimeWindow& window, const CameraIntrinsics& k, const HtParams& params,
                   const Vec3& recentre_offset);

  /// Reference single-threaded path; events must arrive in timestamp order
  /// within [alpha, beta].
  void process(const Event& e);

  /// Processes a whole chunk; with params.threads > 1 the direction set is
  /// partitioned across worker threads, each keeping a partial C merged by
  /// summation afterwards.
  void process_all(const std::vector<Event>& events);

  Mat3 correspondence_matrix() const;
  RelativeRotation finalize() const;

  const std::vector<CellRef>& cells_over_threshold() const { return crossed_; }
  const Cell* find_cell(int dir, std::uint32_t bin) const;
  const Mat3* contribution_of(const Cell& cell, int dir) const;
  int contribution_count() const;
  HtDiagnostics diagnostics() const;

  const DirectionGrid& grid() const { return *grid_; }
  const PlaneGrid& plane() const { return plane_; }
  const TimeWindow& window() const { return window_; }
  const Vec3& recentre_offset() const { return offset_; }
  double time_scale() const { return time_scale_; }
  double eps_dir() const { return params_.eps_dir; }
  const CameraIntrinsics& intrinsics() const { return k_; }

 private:
  struct CompensatedMat3 {
    Mat3 sum = Mat3::Zero();
    Mat3 comp = Mat3::Zero();
    void add(const Mat3& x);
    void sub(const Mat3& x) { add(Mat3(-x)); }
    Mat3 value() const { return sum + comp; }
  };

  // Open-addressing bucket: `slots` maps cell key -> pool index (linear
  // probing, power-of-two capacity), `pool` holds cells in first-vote order.
  struct DirBucket {
    std::vector<std::uint64_t> slots;  // (key << 32) | (pool index + 1); 0 = vacant
    std::vector<Cell> pool;
    std::vector<Mat3> contributions;
    int n_contributing = 0;

    Cell& cell_for(std::uint32_t key);
    const Cell* find(std::uint32_t key) const;
  };

  struct Lane {
    CompensatedMat3 c;
    HtDiagnostics diag;
    std::vector<CellRef> crossed;
  };

  void step(int dir, const Vec3& z, double u, double v, Lane& lane);
  Vec3 recentred_point(const Event& e) const;

  std::shared_ptr<const DirectionGrid> grid_;
  PlaneGrid plane_;
  TimeWindow window_;
  CameraIntrinsics k_;
  HtParams params_;
  Vec3 offset_;
  double time_scale_;
  double inv_bin_size_;

  Eigen::Matrix<double, Eigen::Dynamic, 3> proj_u_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> proj_v_;
  std::vector<DirBucket> buckets_;
  Lane main_;
  std::vector<CellRef> crossed_;
  Eigen::VectorXd ubuf_, vbuf_;
};

/// Accumulator for a planned window fed event-by-event: the recentring offset
/// is the window's spatio-temporal volume centre (the data centroid is not
/// known up front in streaming use).
HoughAccumulator make_window_accumulator(std::shared_ptr<const DirectionGrid> grid,
                                         const TimeWindow& window, SensorSize sensor,
                                         const CameraIntrinsics& k, const HtParams& params);

/// Batch path: recentres on the chunk centroid, processes every event, and
/// extracts the window's relative rotation.
RelativeRotation run_chunk(const EventChunk& chunk, const CameraIntrinsics& k,
                           const HtParams& params,
                           std::shared_ptr<const DirectionGrid> grid = nullptr);

}  // namespace evstar
