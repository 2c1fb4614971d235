#include "evstar/event_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "evstar/errors.hpp"
#include "evstar/text_util.hpp"

namespace evstar {

static constexpr std::string_view kMagic = "# evstar v1";

ParsedStream parse_event_stream(std::istream& in) {
  ParsedStream out;
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty event file", 1);
  ++line_no;
  std::string_view header = trim(line);
  if (header.substr(0, kMagic.size()) != kMagic)
    throw ParseError("missing '# evstar v1' header", line_no);
  header.remove_prefix(kMagic.size());

  bool have_w = false, have_h = false;
  std::istringstream toks{std::string(header)};
  std::string tok;
  while (toks >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("malformed header token '" + tok + "'", line_no);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      if (key == "width") {
        out.sensor.width = static_cast<int>(parse_int_strict(val));
        have_w = true;
      } else if (key == "height") {
        out.sensor.height = static_cast<int>(parse_int_strict(val));
        have_h = true;
      } else if (key == "time_unit") {
        out.time_unit = val;
      } else {
        throw std::invalid_argument("unknown header key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!have_w || !have_h || out.sensor.width <= 0 || out.sensor.height <= 0)
    throw ParseError("header must define positive width and height", line_no);
  if (out.time_unit != "us") throw ParseError("unsupported time_unit (expected us)", line_no);

  bool monotone = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    if (fields.size() != 4) throw ParseError("expected 4 comma-separated fields", line_no);
    Event e;
    try {
      e.t_us = parse_int_strict(fields[0]);
      e.x = parse_double_strict(fields[1]);
      e.y = parse_double_strict(fields[2]);
      const std::int64_t p = parse_int_strict(fields[3]);
      if (p != 0 && p != 1) throw std::invalid_argument("polarity field must be 0 or 1");
      e.polarity = (p == 1) ? 1 : -1;
    } catch (const std::invalid_argument& err) {
      throw ParseError(err.what(), line_no);
    }
    if (e.t_us < 0) throw ParseError("negative timestamp", line_no);
    if (e.x < 0.0 || e.x >= out.sensor.width || e.y < 0.0 || e.y >= out.sensor.height)
      throw ParseError("pixel position outside sensor", line_no);
    if (!out.events.empty() && e.t_us < out.events.back().t_us) monotone = false;
    out.events.push_back(e);
  }
  if (out.events.empty()) throw ParseError("event file has no data records", line_no);
  if (!monotone) {
    out.warnings.push_back("timestamps not monotone; events were stably re-sorted");
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
  }
  return out;
}

ParsedStream load_event_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open event file: " + path);
  return parse_event_stream(in);
}

void write_event_stream(std::ostream& out, const std::vector<Event>& events, SensorSize sensor) {
  out << kMagic << " width=" << sensor.width << " height=" << sensor.height << " time_unit=us\n";
  std::string buf;
  for (const Event& e : events) {
    buf.clear();
    buf += std::to_string(e.t_us);
    buf += ',';
    buf += format_double(e.x);
    buf += ',';
    buf += format_double(e.y);
    buf += ',';
    buf += (e.polarity > 0) ? '1' : '0';
    buf += '\n';
    out << buf;
  }
}

void save_event_stream(const std::string& path, const std::vector<Event>& events,
                       SensorSize sensor) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write event file: " + path);
  write_event_stream(out, events, sensor);
}

CameraIntrinsics load_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open intrinsics file: " + path);
  std::map<std::string, double> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    try {
      kv[std::string(trim(body.substr(0, eq)))] = parse_double_strict(body.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  for (const char* key : {"fx", "fy", "cx", "cy"})
    if (!kv.count(key)) throw std::invalid_argument("intrinsics file missing key: " + std::string(key));
  return CameraIntrinsics{kv["fx"], kv["fy"], kv["cx"], kv["cy"]};
}

void save_intrinsics(const std::string& path, const CameraIntrinsics& k) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write intrinsics file: " + path);
  out << "fx=" << format_double(k.fx) << "\nfy=" << format_double(k.fy) << "\ncx="
      << format_double(k.cx) << "\ncy=" << format_double(k.cy) << "\n";
}

}  // namespace evstar
