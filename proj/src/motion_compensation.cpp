#include "evstar/motion_compensation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "evstar/text_util.hpp"

namespace evstar {

namespace {

Mat3 warp_rotation(const WarpParams& params, double t_us) {
  const double span = static_cast<double>(params.window.duration_us());
  const double frac = (t_us - static_cast<double>(params.window.alpha_us)) / span;
  return rotation_from_rotvec(frac * params.angle * params.axis);
}

std::optional<Vec2> project_forward(const Vec3& ray, const CameraIntrinsics& k) {
  if (!(ray.z() > 0.0)) return std::nullopt;
  return Vec2(k.fx * ray.x() / ray.z() + k.cx, k.fy * ray.y() / ray.z() + k.cy);
}

// Gaussian bump truncated at 3*sigma and shifted down so it meets zero exactly
// at the truncation radius; without the shift the objective has O(e^-4.5)
// jumps that derail finite-difference gradients.
constexpr double kKernelFloor = 1.1108996538242306e-02;  // exp(-4.5)

void splat(Eigen::MatrixXd& h, const Vec2& p, double weight, double sigma) {
  const double radius = 3.0 * sigma;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  const int iy0 = std::max(0, static_cast<int>(std::ceil(p.y() - radius)));
  const int iy1 = std::min<int>(static_cast<int>(h.rows()) - 1,
                                static_cast<int>(std::floor(p.y() + radius)));
  const int ix0 = std::max(0, static_cast<int>(std::ceil(p.x() - radius)));
  const int ix1 = std::min<int>(static_cast<int>(h.cols()) - 1,
                                static_cast<int>(std::floor(p.x() + radius)));
  const double r2_max = radius * radius;
  for (int iy = iy0; iy <= iy1; ++iy) {
    const double dy = static_cast<double>(iy) - p.y();
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double dx = static_cast<double>(ix) - p.x();
      const double r2 = dx * dx + dy * dy;
      if (r2 > r2_max) continue;
      h(iy, ix) += weight * (std::exp(-r2 * inv_two_sigma2) - kKernelFloor);
    }
  }
}

// Event data in a warp-independent form so the optimiser does not redo
// back-projection on every objective evaluation.
struct WarpCache {
  std::vector<Vec3> rays;
  std::vector<double> frac;    // (t - alpha) / (beta - alpha)
  std::vector<double> weight;  // signed polarity or 1
  TimeWindow window;
  SensorSize sensor;
};

WarpCache build_cache(const EventChunk& chunk, const CameraIntrinsics& k,
                      bool use_polarity) {
  WarpCache cache;
  cache.window = chunk.window;
  cache.sensor = chunk.sensor;
  cache.rays.reserve(chunk.events.size());
  cache.frac.reserve(chunk.events.size());
  cache.weight.reserve(chunk.events.size());
  const double span = static_cast<double>(chunk.window.duration_us());
  for (const Event& e : chunk.events) {
    cache.rays.push_back(backproject(Vec2(e.x, e.y), k));
    cache.frac.push_back((static_cast<double>(e.t_us) -
                          static_cast<double>(chunk.window.alpha_us)) /
                         span);
    cache.weight.push_back(use_polarity ? static_cast<double>(e.polarity) : 1.0);
  }
  return cache;
}

double image_variance(const Eigen::MatrixXd& h) {
  const double mean = h.mean();
  return (h.array() - mean).square().sum() / static_cast<double>(h.size());
}

double cached_objective(const WarpCache& cache, const CameraIntrinsics& k,
                        const Vec3& rotvec, double sigma) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cache.sensor.height, cache.sensor.width);
  for (std::size_t i = 0; i < cache.rays.size(); ++i) {
    const Mat3 r = rotation_from_rotvec(cache.frac[i] * rotvec);
    const Vec3 warped = r * cache.rays[i];
    const std::optional<Vec2> p = project_forward(warped, k);
    if (!p) continue;
    splat(h, *p, cache.weight[i], sigma);
  }
  return image_variance(h);
}

}  // namespace

std::optional<Vec2> warp_event(const Event& e, const WarpParams& params,
                               const CameraIntrinsics& k) {
  const Vec3 ray = backproject(Vec2(e.x, e.y), k);
  const Vec3 warped = warp_rotation(params, static_cast<double>(e.t_us)) * ray;
  return project_forward(warped, k);
}

CompensatedImage render_h_image(const EventChunk& chunk, const WarpParams& params,
                                const CameraIntrinsics& k, double kernel_sigma,
                                bool use_polarity) {
  if (!(kernel_sigma > 0.0)) throw std::invalid_argument("kernel_sigma must be positive");
  CompensatedImage image;
  image.h = Eigen::MatrixXd::Zero(chunk.sensor.height, chunk.sensor.width);
  image.kernel_sigma = kernel_sigma;
  image.params = params;
  image.polarity_weighted = use_polarity;
  for (const Event& e : chunk.events) {
    const std::optional<Vec2> p = warp_event(e, params, k);
    if (!p) continue;
    const double w = use_polarity ? static_cast<double>(e.polarity) : 1.0;
    splat(image.h, *p, w, kernel_sigma);
  }
  return image;
}

double variance_contrast(const CompensatedImage& image) {
  if (image.h.size() == 0) throw std::invalid_argument("empty image");
  return image_variance(image.h);
}

CmResult cm_estimate(const EventChunk& chunk, const CameraIntrinsics& k,
                     const CmOptions& opts) {
  if (chunk.empty()) throw std::invalid_argument("cannot run contrast maximisation on an empty chunk");
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  const WarpCache cache = build_cache(chunk, k, opts.use_polarity);
  const auto objective = [&](const Vec3& v) {
    const double f = cached_objective(cache, k, v, opts.kernel_sigma);
    if (!std::isfinite(f)) throw std::runtime_error("contrast objective is not finite");
    return f;
  };

  CmResult result;
  Vec3 v = Vec3::Zero();
  double f = objective(v);
  result.objective_history.push_back(f);

  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    Vec3 grad;
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 vp = v, vm = v;
      vp[axis] += opts.fd_step;
      vm[axis] -= opts.fd_step;
      grad[axis] = (objective(vp) - objective(vm)) / (2.0 * opts.fd_step);
    }
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0)) break;
    const Vec3 dir = grad / gnorm;

    // Backtracking from the base step; a line search that exhausts the step
    // budget means no improvement is reachable above step_tol, so stop.
    bool accepted = false;
    for (double step = opts.initial_step; step >= opts.step_tol; step *= 0.5) {
      const Vec3 trial = v + step * dir;
      const double ft = objective(trial);
      if (ft > f) {
        v = trial;
        f = ft;
        result.objective_history.push_back(f);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  result.iterations = iter;
  result.hit_max_iters = (iter == opts.max_iters);

  result.rotvec = v;
  result.rel.r = rotation_from_rotvec(v);
  result.rel.window = chunk.window;
  result.rel.n_correspondences = 0;
  result.rel.diag.n_events = static_cast<std::int64_t>(chunk.events.size());
  return result;
}

void write_pgm16(const std::string& pgm_path, const std::string& sidecar_path,
                 const CompensatedImage& image) {
  const Eigen::MatrixXd& h = image.h;
  if (h.size() == 0) throw std::invalid_argument("empty image");
  const double lo = h.minCoeff();
  const double hi = h.maxCoeff();
  const double scale = (hi > lo) ? 65535.0 / (hi - lo) : 0.0;

  std::ofstream pgm(pgm_path, std::ios::binary);
  if (!pgm) throw std::runtime_error("cannot open " + pgm_path + " for writing");
  pgm << "P5\n" << h.cols() << " " << h.rows() << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(h.cols()) * 2);
  for (Eigen::Index y = 0; y < h.rows(); ++y) {
    for (Eigen::Index x = 0; x < h.cols(); ++x) {
      const double value = (h(y, x) - lo) * scale;
      const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(value, 0.0, 65535.0)));
      row[static_cast<std::size_t>(x) * 2] = static_cast<unsigned char>(q >> 8);
      row[static_cast<std::size_t>(x) * 2 + 1] = static_cast<unsigned char>(q & 0xff);
    }
    pgm.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!pgm) throw std::runtime_error("failed writing " + pgm_path);

  std::ofstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot open " + sidecar_path + " for writing");
  side << "min=" << format_double(lo) << "\n"
       << "max=" << format_double(hi) << "\n"
       << "scale=" << format_double(scale) << "\n"
       << "kernel_sigma=" << format_double(image.kernel_sigma) << "\n";
  if (!side) throw std::runtime_error("failed writing " + sidecar_path);
}

}  // namespace evstar
