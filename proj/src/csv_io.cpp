#include "evstar/csv_io.hpp"

#include <fstream>
#include <stdexcept>

#include "evstar/errors.hpp"
#include "evstar/text_util.hpp"

namespace evstar {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_matrix_fields(std::ofstream& out, const Mat3& r) {
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) out << ',' << format_double(r(row, col));
}

Mat3 parse_matrix_fields(const std::vector<std::string>& fields, std::size_t offset,
                         long line_no) {
  Mat3 r;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) {
      try {
        r(row, col) = parse_double_strict(fields[offset + static_cast<std::size_t>(3 * row + col)]);
      } catch (const std::exception& e) {
        throw ParseError(std::string("bad rotation entry: ") + e.what(), line_no);
      }
    }
  if (!is_rotation(r, 1e-6)) throw ParseError("row does not encode a rotation matrix", line_no);
  return r;
}

std::int64_t parse_time_field(const std::string& field, long line_no) {
  try {
    return parse_int_strict(field);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad timestamp: ") + e.what(), line_no);
  }
}

/// Reads a CSV with the exact expected header; returns data rows split on ','.
std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& header,
                                                std::size_t n_fields) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path, 1);
  ++line_no;
  if (trim(line) != header)
    throw ParseError("expected header '" + header + "' in " + path, line_no);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    const std::vector<std::string_view> parts = split(t, ',');
    if (parts.size() != n_fields)
      throw ParseError("expected " + std::to_string(n_fields) + " fields, got " +
                           std::to_string(parts.size()) + " in " + path,
                       line_no);
    std::vector<std::string> fields;
    fields.reserve(parts.size() + 1);
    for (const std::string_view part : parts) fields.emplace_back(trim(part));
    fields.push_back(std::to_string(line_no));  // carry the line number along
    rows.push_back(std::move(fields));
  }
  return rows;
}

long row_line(const std::vector<std::string>& row) { return std::stol(row.back()); }

constexpr const char* kMatrixHeader = "r00,r01,r02,r10,r11,r12,r20,r21,r22";

}  // namespace

void write_edges_csv(const std::string& path, const EdgeSet& edges) {
  std::ofstream out = open_out(path);
  out << "alpha_us,beta_us," << kMatrixHeader << "\n";
  for (const Edge& e : edges.edges) {
    out << e.alpha_us << ',' << e.beta_us;
    write_matrix_fields(out, e.r);
    out << "\n";
  }
  finish_out(out, path);
}

EdgeSet read_edges_csv(const std::string& path) {
  EdgeSet set;
  for (const auto& row : read_rows(path, std::string("alpha_us,beta_us,") + kMatrixHeader, 11)) {
    Edge e;
    e.alpha_us = parse_time_field(row[0], row_line(row));
    e.beta_us = parse_time_field(row[1], row_line(row));
    if (e.alpha_us >= e.beta_us)
      throw ParseError("edge must run forward in time", row_line(row));
    e.r = parse_matrix_fields(row, 2, row_line(row));
    set.edges.push_back(e);
  }
  return set;
}

void write_attitude_csv(const std::string& path, const AttitudeTable& table) {
  std::ofstream out = open_out(path);
  out << "t_us," << kMatrixHeader << "\n";
  for (std::size_t i = 0; i < table.times_us.size(); ++i) {
    out << table.times_us[i];
    write_matrix_fields(out, table.attitudes[i]);
    out << "\n";
  }
  finish_out(out, path);
}

AttitudeTable read_attitude_csv(const std::string& path) {
  AttitudeTable table;
  for (const auto& row : read_rows(path, std::string("t_us,") + kMatrixHeader, 10)) {
    const std::int64_t t = parse_time_field(row[0], row_line(row));
    if (!table.times_us.empty() && t <= table.times_us.back())
      throw ParseError("timestamps must be strictly increasing", row_line(row));
    table.times_us.push_back(t);
    table.attitudes.push_back(parse_matrix_fields(row, 1, row_line(row)));
  }
  return table;
}

void write_anchors_csv(const std::string& path, const std::vector<AttitudeAnchor>& anchors) {
  AttitudeTable table;
  for (const AttitudeAnchor& a : anchors) {
    table.times_us.push_back(a.t_us);
    table.attitudes.push_back(a.r);
  }
  write_attitude_csv(path, table);
}

std::vector<AttitudeAnchor> read_anchors_csv(const std::string& path) {
  const AttitudeTable table = read_attitude_csv(path);
  std::vector<AttitudeAnchor> anchors;
  anchors.reserve(table.times_us.size());
  for (std::size_t i = 0; i < table.times_us.size(); ++i)
    anchors.push_back(AttitudeAnchor{table.times_us[i], table.attitudes[i]});
  return anchors;
}

void write_solution_csv(const std::string& path, const AttitudeSolution& solution) {
  std::ofstream out = open_out(path);
  out << "t_us," << kMatrixHeader << ",converged\n";
  for (std::size_t i = 0; i < solution.times.size(); ++i) {
    out << solution.times[i];
    write_matrix_fields(out, solution.attitudes[i]);
    out << ',' << (solution.converged ? 1 : 0) << "\n";
  }
  finish_out(out, path);
}

AttitudeSolution read_solution_csv(const std::string& path) {
  AttitudeSolution solution;
  for (const auto& row :
       read_rows(path, std::string("t_us,") + kMatrixHeader + ",converged", 11)) {
    const std::int64_t t = parse_time_field(row[0], row_line(row));
    if (!solution.times.empty() && t <= solution.times.back())
      throw ParseError("timestamps must be strictly increasing", row_line(row));
    solution.times.push_back(t);
    solution.attitudes.push_back(parse_matrix_fields(row, 1, row_line(row)));
    const std::int64_t flag = parse_time_field(row[10], row_line(row));
    if (flag != 0 && flag != 1) throw ParseError("converged flag must be 0 or 1", row_line(row));
    solution.converged = flag == 1;
  }
  return solution;
}

void write_window_records_csv(const std::string& path,
                              const std::vector<WindowRecord>& records) {
  std::ofstream out = open_out(path);
  out << "alpha_us,beta_us,resolution_us,lane,ok,n_events,n_cells_over_delta,error\n";
  for (const WindowRecord& rec : records) {
    std::string error = rec.error;
    for (char& c : error)
      if (c == ',' || c == '\n') c = ';';
    out << rec.window.alpha_us << ',' << rec.window.beta_us << ',' << rec.resolution_us << ','
        << rec.lane << ',' << (rec.ok ? 1 : 0) << ',' << rec.n_events << ','
        << rec.n_cells_over_threshold << ',' << error << "\n";
  }
  finish_out(out, path);
}

void write_residuals_csv(const std::string& path, const EdgeSet& edges,
                         const AttitudeSolution& solution) {
  if (solution.edge_residuals.size() != edges.edges.size())
    throw std::invalid_argument("residuals do not match the edge list");
  std::ofstream out = open_out(path);
  out << "alpha_us,beta_us,residual\n";
  for (std::size_t i = 0; i < edges.edges.size(); ++i)
    out << edges.edges[i].alpha_us << ',' << edges.edges[i].beta_us << ','
        << format_double(solution.edge_residuals[i]) << "\n";
  finish_out(out, path);
}

void write_relative_summary_csv(const std::string& path, const RelativeEvalReport& report) {
  std::ofstream out = open_out(path);
  out << "duration_us,n_edges,rms_deg,root_sum_sq_deg\n";
  for (const GroupStats& g : report.groups)
    out << g.duration_us << ',' << g.errors_deg.size() << ',' << format_double(g.rms_deg)
        << ',' << format_double(g.root_sum_sq_deg) << "\n";
  finish_out(out, path);
}

void write_relative_errors_csv(const std::string& path, const EdgeSet& edges,
                               const RelativeEvalReport& report) {
  if (report.per_edge_deg.size() != edges.edges.size())
    throw std::invalid_argument("report does not match the edge list");
  std::ofstream out = open_out(path);
  out << "alpha_us,beta_us,duration_us,error_deg\n";
  for (std::size_t i = 0; i < edges.edges.size(); ++i) {
    const Edge& e = edges.edges[i];
    out << e.alpha_us << ',' << e.beta_us << ',' << (e.beta_us - e.alpha_us) << ','
        << format_double(report.per_edge_deg[i]) << "\n";
  }
  finish_out(out, path);
}

void write_absolute_errors_csv(const std::string& path, const AbsoluteEvalReport& report) {
  std::ofstream out = open_out(path);
  out << "t_us,error_deg\n";
  for (std::size_t i = 0; i < report.times_us.size(); ++i)
    out << report.times_us[i] << ',' << format_double(report.errors_deg[i]) << "\n";
  finish_out(out, path);
}

void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows) {
  std::ofstream out = open_out(path);
  out << "method,duration_us,n_chunks,mean_median_s,median_median_s,total_events\n";
  for (const BenchmarkRow& row : rows)
    out << method_name(row.method) << ',' << row.duration_us << ',' << row.n_chunks << ','
        << format_double(row.mean_median_s) << ',' << format_double(row.median_median_s) << ','
        << row.total_events << "\n";
  finish_out(out, path);
}

}  // namespace evstar
