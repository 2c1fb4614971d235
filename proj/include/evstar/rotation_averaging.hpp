#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evstar/geometry.hpp"
#include "evstar/multires_tracker.hpp"

namespace evstar {

/// Measured absolute attitude at a grid time (in the paper's setting these
/// come from star identification; here from simulator ground truth or a file).
struct AttitudeAnchor {
  std::int64_t t_us = 0;
  Mat3 r = Mat3::Identity();
};

struct AttitudeGraph {
  std::vector<std::int64_t> nodes;  // sorted unique referenced grid times
  EdgeSet edges;
  std::vector<AttitudeAnchor> anchors;
  double anchor_weight = 10.0;
  std::int64_t dt_us = 50'000;
  std::vector<std::string> warnings;
};

/// Validates grid alignment (every endpoint and anchor time a multiple of dt)
/// and connectivity of the node graph; no anchors is allowed but warned about
/// (the solution is then gauge-fixed to the first node instead).
AttitudeGraph build_graph(const EdgeSet& edges, const std::vector<AttitudeAnchor>& anchors,
                          std::int64_t dt_us, double anchor_weight);

struct AttitudeSolution {
  std::vector<std::int64_t> times;
  std::vector<Mat3> attitudes;
  Mat3 dummy = Mat3::Identity();  // the gauge variable; identity after re-orientation
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // squared-Frobenius objective per sweep
  double objective = 0.0;                 // final unsquared-Frobenius objective
  std::vector<double> edge_residuals;     // chordal error per edge, final attitudes
  std::vector<double> anchor_residuals;
};

struct SolverOptions {
  int max_iters = 500;
  double tol = 1e-6;  // radians; stop when the largest node update is smaller
};

/// Block-coordinate descent on the chordal cost
///   sum_edges ||R_a - R~_{a,b} R_b||_F^2 + w * sum_anchors ||R_g - R~_g G||_F^2:
/// nodes start on a dead-reckoned spanning tree rooted at each component's
/// first anchor (identity for unanchored components and the gauge variable G),
/// then each sweep replaces each node (in time order, G last) by the SO(3)
/// projection of the sum of its neighbours' predictions, which is that node's
/// exact minimizer, so the objective never increases. Afterwards the gauge
/// step re-orients the solution so G = I (or so the first node is I when
/// there are no anchors).
AttitudeSolution solve(const AttitudeGraph& graph, const SolverOptions& opts = {});

/// Right-multiplies every attitude by gauge^T (gauge defaults to the stored
/// dummy variable), leaving every residual unchanged.
void re_orient(AttitudeSolution& solution);

/// Dead-reckoning baseline: edges must form a contiguous chain; attitudes are
/// composed outward from the single anchor. Throws DisconnectedGraph on gaps.
AttitudeSolution chain_relatives(const EdgeSet& edges, const AttitudeAnchor& anchor);

}  // namespace evstar
