#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evstar/events.hpp"
#include "evstar/geometry.hpp"
#include "evstar/hough_accumulator.hpp"

namespace evstar {

/// Constant angular rate over a window: an event at time t is rotated by
/// exp(((t - alpha) / (beta - alpha)) * angle * axis) back to the window start.
struct WarpParams {
  double angle = 0.0;      // radians, in [0, pi]
  Vec3 axis = Vec3::UnitZ();
  TimeWindow window;
};

struct CompensatedImage {
  Eigen::MatrixXd h;  // (height x width) accumulated event mass
  double kernel_sigma = 1.0;
  WarpParams params;
  bool polarity_weighted = true;
};

/// Pixel position of the event warped to the window start; nullopt when the
/// warped ray leaves the forward hemisphere.
std::optional<Vec2> warp_event(const Event& e, const WarpParams& params,
                               const CameraIntrinsics& k);

/// Accumulates warped events under a Gaussian kernel truncated at 3 sigma
/// (continuity-shifted so the kernel reaches zero at the truncation radius).
/// With use_polarity each event contributes its signed polarity, otherwise +1.
CompensatedImage render_h_image(const EventChunk& chunk, const WarpParams& params,
                                const CameraIntrinsics& k, double kernel_sigma = 1.0,
                                bool use_polarity = true);

/// Population variance of the image; adding a constant leaves it unchanged.
double variance_contrast(const CompensatedImage& image);

struct CmOptions {
  int max_iters = 200;
  double step_tol = 1e-7;     // radians; stop when no accepted step reaches this
  double fd_step = 1e-5;      // central-difference step, radians
  double initial_step = 1e-3; // radians
  double kernel_sigma = 1.0;
  // Unsigned accumulation by default: star events alternate polarity, so a
  // signed image cancels at the correct warp and inverts the objective.
  bool use_polarity = false;
};

struct CmResult {
  RelativeRotation rel;
  Vec3 rotvec = Vec3::Zero();
  int iterations = 0;
  bool hit_max_iters = false;
  std::vector<double> objective_history;  // accepted iterates, non-decreasing
};

/// Contrast maximisation over the rotation vector: gradient ascent with
/// central finite differences and a backtracking line search, started at zero
/// motion. Throws std::runtime_error when the objective turns non-finite.
CmResult cm_estimate(const EventChunk& chunk, const CameraIntrinsics& k,
                     const CmOptions& opts = {});

/// 16-bit binary PGM, affinely rescaled to [0, 65535]; the sidecar text file
/// records the affine map (min/max/scale) so values can be recovered.
void write_pgm16(const std::string& pgm_path, const std::string& sidecar_path,
                 const CompensatedImage& image);

}  // namespace evstar
