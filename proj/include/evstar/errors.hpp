#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evstar {

/// Malformed text input; `line` is 1-based within the offending file.
struct ParseError : std::runtime_error {
  long line;
  ParseError(const std::string& msg, long line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

/// Ray with zero or negative depth cannot be mapped to the image plane.
struct ProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A window produced too few usable correspondences to determine a rotation.
struct InsufficientCorrespondences : std::runtime_error {
  std::int64_t n_events;
  int n_cells_over_threshold;
  InsufficientCorrespondences(const std::string& msg, std::int64_t events, int cells)
      : std::runtime_error(msg), n_events(events), n_cells_over_threshold(cells) {}
};

/// Attitude graph does not connect all grid nodes; message lists the gaps.
struct DisconnectedGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fitted line is (nearly) orthogonal to the time axis, so it cannot be
/// evaluated at the window bounds.
struct DegenerateLine : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace evstar
