#include "evstar/rotation_averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "evstar/errors.hpp"

namespace evstar {

namespace {

void check_grid(std::int64_t t_us, std::int64_t dt_us, const char* what) {
  if (t_us % dt_us != 0)
    throw std::invalid_argument(std::string(what) + " time " + std::to_string(t_us) +
                                "us is not a multiple of the grid spacing");
}

}  // namespace

AttitudeGraph build_graph(const EdgeSet& edges, const std::vector<AttitudeAnchor>& anchors,
                          std::int64_t dt_us, double anchor_weight) {
  if (dt_us <= 0) throw std::invalid_argument("dt must be positive");
  if (!(anchor_weight > 0.0)) throw std::invalid_argument("anchor_weight must be positive");
  if (edges.edges.empty()) throw std::invalid_argument("graph needs at least one edge");

  AttitudeGraph graph;
  graph.edges = edges;
  graph.anchors = anchors;
  graph.anchor_weight = anchor_weight;
  graph.dt_us = dt_us;

  std::map<std::int64_t, std::size_t> index;
  for (const Edge& e : edges.edges) {
    check_grid(e.alpha_us, dt_us, "edge start");
    check_grid(e.beta_us, dt_us, "edge end");
    if (e.alpha_us >= e.beta_us) throw std::invalid_argument("edge must run forward in time");
    index.emplace(e.alpha_us, index.size());
    index.emplace(e.beta_us, index.size());
  }
  for (const AttitudeAnchor& a : anchors) {
    check_grid(a.t_us, dt_us, "anchor");
    if (!is_rotation(a.r)) throw std::invalid_argument("anchor attitude is not a rotation");
    if (index.find(a.t_us) == index.end())
      throw std::invalid_argument("anchor at t=" + std::to_string(a.t_us) +
                                  "us matches no edge endpoint");
  }

  // Connectivity over the covered time span: the edge intervals must cover
  // [first, last] without a hole, otherwise nodes inside the hole cannot be
  // related to the rest.
  {
    std::vector<TimeWindow> intervals;
    intervals.reserve(edges.edges.size());
    for (const Edge& e : edges.edges) intervals.push_back(TimeWindow{e.alpha_us, e.beta_us});
    const std::vector<TimeWindow> gaps = coverage_gaps(std::move(intervals));
    if (!gaps.empty()) {
      std::string msg = "attitude graph is disconnected: no edge covers";
      for (std::size_t i = 0; i < gaps.size() && i < 10; ++i)
        msg += std::string(i == 0 ? " " : "; ") + "(" + std::to_string(gaps[i].alpha_us) +
               "us, " + std::to_string(gaps[i].beta_us) + "us)";
      if (gaps.size() > 10) msg += "; ...";
      throw DisconnectedGraph(msg);
    }
  }

  // Staggered window banks interleave two families of grid nodes that no
  // single edge relates (every edge spans an even number of grid steps), so
  // the node graph may split into components even when the time span is fully
  // covered. Each component needs an anchor to pin it; without anchors the
  // gauge fix reaches only the first node's component.
  std::vector<std::size_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&parent](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (const Edge& e : edges.edges)
    parent[find(index.at(e.alpha_us))] = find(index.at(e.beta_us));
  std::map<std::size_t, bool> component_anchored;  // root -> has an anchor
  for (const auto& [t, i] : index) component_anchored.emplace(find(i), false);
  for (const AttitudeAnchor& a : anchors) component_anchored.at(find(index.at(a.t_us))) = true;
  if (component_anchored.size() > 1) {
    if (anchors.empty()) {
      throw DisconnectedGraph(
          "edges split the nodes into " + std::to_string(component_anchored.size()) +
          " unrelated groups and no anchors were supplied to pin them to a common frame");
    }
    for (const auto& [root, anchored] : component_anchored) {
      if (anchored) continue;
      std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0;
      for (const auto& [t, i] : index)
        if (find(i) == root) {
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
      throw DisconnectedGraph("nodes between t=" + std::to_string(lo) + "us and t=" +
                              std::to_string(hi) +
                              "us share no edge with any anchored node; add an anchor in "
                              "that group");
    }
  }

  for (const auto& [t, i] : index) graph.nodes.push_back(t);
  std::sort(graph.nodes.begin(), graph.nodes.end());
  if (anchors.empty())
    graph.warnings.push_back(
        "no anchors supplied: solution is gauge-fixed to the first node and is "
        "not tied to the reference frame");
  return graph;
}

namespace {

struct Incidence {
  // Prediction for this node from one incident term: weight * (rot * other).
  int other;     // node index, or -1 for the gauge variable
  Mat3 rot;      // applied to the other variable
  double weight;
};

double unsquared_objective(const AttitudeGraph& graph,
                           const std::map<std::int64_t, std::size_t>& index,
                           const std::vector<Mat3>& r, const Mat3& gauge) {
  double total = 0.0;
  for (const Edge& e : graph.edges.edges)
    total += (r[index.at(e.alpha_us)] - e.r * r[index.at(e.beta_us)]).norm();
  for (const AttitudeAnchor& a : graph.anchors)
    total += graph.anchor_weight * (r[index.at(a.t_us)] - a.r * gauge).norm();
  return total;
}

double squared_objective(const AttitudeGraph& graph,
                         const std::map<std::int64_t, std::size_t>& index,
                         const std::vector<Mat3>& r, const Mat3& gauge) {
  double total = 0.0;
  for (const Edge& e : graph.edges.edges)
    total += (r[index.at(e.alpha_us)] - e.r * r[index.at(e.beta_us)]).squaredNorm();
  for (const AttitudeAnchor& a : graph.anchors)
    total += graph.anchor_weight * (r[index.at(a.t_us)] - a.r * gauge).squaredNorm();
  return total;
}

}  // namespace

AttitudeSolution solve(const AttitudeGraph& graph, const SolverOptions& opts) {
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");

  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) index[graph.nodes[i]] = i;
  const std::size_t n = graph.nodes.size();

  std::vector<std::vector<Incidence>> incident(n);
  std::vector<Incidence> gauge_incident;
  for (const Edge& e : graph.edges.edges) {
    const auto ia = static_cast<int>(index.at(e.alpha_us));
    const auto ib = static_cast<int>(index.at(e.beta_us));
    incident[ia].push_back(Incidence{ib, e.r, 1.0});
    incident[ib].push_back(Incidence{ia, e.r.transpose(), 1.0});
  }
  for (const AttitudeAnchor& a : graph.anchors) {
    const auto ig = static_cast<int>(index.at(a.t_us));
    incident[ig].push_back(Incidence{-1, a.r, graph.anchor_weight});
    gauge_incident.push_back(Incidence{ig, a.r.transpose(), graph.anchor_weight});
  }

  AttitudeSolution sol;
  sol.times = graph.nodes;
  sol.attitudes.assign(n, Mat3::Identity());
  sol.dummy = Mat3::Identity();

  // Spanning-tree initialisation: compose edge rotations outward from each
  // component's first anchor (unanchored components start from their earliest
  // node at the identity). A Gauss-Seidel sweep moves information only one
  // edge per node, so identity starts would need on the order of
  // diameter-squared sweeps on long staggered-window chains; a dead-reckoned
  // tree start leaves the sweeps only the local averaging work.
  {
    std::vector<char> visited(n, 0);
    std::vector<std::size_t> queue;
    const auto bfs_from = [&](std::size_t root) {
      queue.assign(1, root);
      visited[root] = 1;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t i = queue[head];
        for (const Incidence& inc : incident[i]) {
          if (inc.other < 0) continue;
          const auto j = static_cast<std::size_t>(inc.other);
          if (visited[j]) continue;
          visited[j] = 1;
          // inc predicts node i from node j as R_i = inc.rot * R_j.
          sol.attitudes[j] = inc.rot.transpose() * sol.attitudes[i];
          queue.push_back(j);
        }
      }
    };
    for (const AttitudeAnchor& a : graph.anchors) {
      const std::size_t root = index.at(a.t_us);
      if (visited[root]) continue;
      sol.attitudes[root] = a.r;
      bfs_from(root);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!visited[i]) bfs_from(i);
  }

  const auto current = [&](int other) -> const Mat3& {
    return other < 0 ? sol.dummy : sol.attitudes[static_cast<std::size_t>(other)];
  };

  int sweep = 0;
  for (; sweep < opts.max_iters; ++sweep) {
    double max_update = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Mat3 sum = Mat3::Zero();
      for (const Incidence& inc : incident[i]) sum += inc.weight * (inc.rot * current(inc.other));
      const Mat3 updated = project_to_rotation(sum);
      max_update = std::max(max_update, angular_distance(sol.attitudes[i], updated));
      sol.attitudes[i] = updated;
    }
    if (!gauge_incident.empty()) {
      Mat3 sum = Mat3::Zero();
      for (const Incidence& inc : gauge_incident) sum += inc.weight * (inc.rot * current(inc.other));
      const Mat3 updated = project_to_rotation(sum);
      max_update = std::max(max_update, angular_distance(sol.dummy, updated));
      sol.dummy = updated;
    }
    sol.objective_history.push_back(squared_objective(graph, index, sol.attitudes, sol.dummy));
    if (max_update < opts.tol) {
      sol.converged = true;
      ++sweep;
      break;
    }
  }
  sol.iterations = sweep;

  if (graph.anchors.empty() && !sol.attitudes.empty()) sol.dummy = sol.attitudes.front();
  re_orient(sol);

  sol.objective = unsquared_objective(graph, index, sol.attitudes, sol.dummy);
  sol.edge_residuals.reserve(graph.edges.edges.size());
  for (const Edge& e : graph.edges.edges)
    sol.edge_residuals.push_back(
        (sol.attitudes[index.at(e.alpha_us)] - e.r * sol.attitudes[index.at(e.beta_us)]).norm());
  sol.anchor_residuals.reserve(graph.anchors.size());
  for (const AttitudeAnchor& a : graph.anchors)
    sol.anchor_residuals.push_back(
        (sol.attitudes[index.at(a.t_us)] - a.r * sol.dummy).norm());
  return sol;
}

void re_orient(AttitudeSolution& solution) {
  const Mat3 gauge = solution.dummy;
  for (Mat3& r : solution.attitudes) r = r * gauge.transpose();
  solution.dummy = solution.dummy * gauge.transpose();
}

AttitudeSolution chain_relatives(const EdgeSet& edges, const AttitudeAnchor& anchor) {
  if (edges.edges.empty()) throw std::invalid_argument("chain needs at least one edge");
  std::vector<Edge> chain = edges.edges;
  std::sort(chain.begin(), chain.end(),
            [](const Edge& a, const Edge& b) { return a.alpha_us < b.alpha_us; });
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i].beta_us != chain[i + 1].alpha_us)
      throw DisconnectedGraph("chain gap between t=" + std::to_string(chain[i].beta_us) +
                              "us and t=" + std::to_string(chain[i + 1].alpha_us) + "us");
  }

  AttitudeSolution sol;
  sol.times.push_back(chain.front().alpha_us);
  for (const Edge& e : chain) sol.times.push_back(e.beta_us);
  const auto it = std::find(sol.times.begin(), sol.times.end(), anchor.t_us);
  if (it == sol.times.end())
    throw std::invalid_argument("anchor time " + std::to_string(anchor.t_us) +
                                "us is not a chain node");
  const auto pivot = static_cast<std::size_t>(it - sol.times.begin());

  sol.attitudes.assign(sol.times.size(), Mat3::Identity());
  sol.attitudes[pivot] = anchor.r;
  // Edge rotation maps the beta-frame to the alpha-frame: R_alpha = R~ * R_beta.
  for (std::size_t i = pivot; i + 1 < sol.attitudes.size(); ++i)
    sol.attitudes[i + 1] = chain[i].r.transpose() * sol.attitudes[i];
  for (std::size_t i = pivot; i > 0; --i)
    sol.attitudes[i - 1] = chain[i - 1].r * sol.attitudes[i];
  sol.converged = true;
  return sol;
}

}  // namespace evstar
