#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evstar/events.hpp"
#include "evstar/geometry.hpp"

namespace evstar {

struct ParsedStream {
  std::vector<Event> events;
  SensorSize sensor;
  std::string time_unit;
  std::vector<std::string> warnings;
};

/// Reads the `# evstar v1` text format: header line
///   # evstar v1 width=<int> height=<int> time_unit=us
/// followed by one `t,x,y,p` record per line with p in {0,1}; 0 decodes to
/// polarity -1. Non-monotone timestamps are stably sorted with a warning;
/// malformed records raise ParseError with the line number; a file without
/// data records raises ParseError as well.
ParsedStream parse_event_stream(std::istream& in);
ParsedStream load_event_stream(const std::string& path);

void write_event_stream(std::ostream& out, const std::vector<Event>& events, SensorSize sensor);
void save_event_stream(const std::string& path, const std::vector<Event>& events, SensorSize sensor);

/// Key-value text: fx=, fy=, cx=, cy= (one per line, # comments allowed).
CameraIntrinsics load_intrinsics(const std::string& path);
void save_intrinsics(const std::string& path, const CameraIntrinsics& k);

}  // namespace evstar
