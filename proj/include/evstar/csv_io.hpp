#pragma once

#include <string>
#include <vector>

#include "evstar/metrics.hpp"
#include "evstar/multires_tracker.hpp"
#include "evstar/rotation_averaging.hpp"

namespace evstar {

/// Relative-rotation edges: `alpha_us,beta_us,r00,...,r22` (row-major).
void write_edges_csv(const std::string& path, const EdgeSet& edges);
EdgeSet read_edges_csv(const std::string& path);

/// Absolute attitude series: `t_us,r00,...,r22`.
void write_attitude_csv(const std::string& path, const AttitudeTable& table);
AttitudeTable read_attitude_csv(const std::string& path);

/// Anchors share the attitude-series schema.
void write_anchors_csv(const std::string& path, const std::vector<AttitudeAnchor>& anchors);
std::vector<AttitudeAnchor> read_anchors_csv(const std::string& path);

/// Solved series: `t_us,r00,...,r22,converged` (flag identical on every row).
void write_solution_csv(const std::string& path, const AttitudeSolution& solution);
AttitudeSolution read_solution_csv(const std::string& path);

/// Per-window diagnostics (write-only):
/// `alpha_us,beta_us,resolution_us,lane,ok,n_events,n_cells_over_delta,error`.
void write_window_records_csv(const std::string& path, const std::vector<WindowRecord>& records);

/// Final per-edge chordal residuals: `alpha_us,beta_us,residual`.
void write_residuals_csv(const std::string& path, const EdgeSet& edges,
                         const AttitudeSolution& solution);

/// Relative evaluation: one summary row per window duration
/// (`duration_us,n_edges,rms_deg,root_sum_sq_deg`) and per-edge errors
/// (`alpha_us,beta_us,duration_us,error_deg`).
void write_relative_summary_csv(const std::string& path, const RelativeEvalReport& report);
void write_relative_errors_csv(const std::string& path, const EdgeSet& edges,
                               const RelativeEvalReport& report);

/// Absolute evaluation series: `t_us,error_deg`.
void write_absolute_errors_csv(const std::string& path, const AbsoluteEvalReport& report);

/// Benchmark rows: `method,duration_us,n_chunks,mean_median_s,median_median_s,total_events`.
void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows);

}  // namespace evstar
