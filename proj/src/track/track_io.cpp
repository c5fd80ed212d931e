#include <fstream>
#include <sstream>

#include "driftplan/error.hpp"
#include "driftplan/text.hpp"
#include "driftplan/track/track.hpp"

namespace driftplan::track {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

Track parse_track(const std::string& content, std::vector<std::string>* warnings, const TrackOptions& opts) {
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  std::optional<double> width;
  bool closed = false;
  bool header_seen = false;
  std::vector<Point> pts;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      // Metadata: whitespace-separated key=value pairs.
      std::istringstream meta(t.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const auto val = text::parse_double(std::string_view(kv).substr(eq + 1));
        if (key != "width" && key != "closed") continue;
        if (!val) throw ParseError("track file: bad value for '" + key + "'", line_no);
        if (key == "width") width = *val;
        if (key == "closed") closed = (*val != 0.0);
      }
      continue;
    }
    if (!header_seen) {
      if (t != "x,y") throw ParseError("track file: expected header 'x,y'", line_no);
      header_seen = true;
      continue;
    }
    const auto f = text::split(t, ',');
    if (f.size() != 2) throw ParseError("track file: expected two fields 'x,y'", line_no);
    const auto x = text::parse_double(f[0]);
    const auto y = text::parse_double(f[1]);
    if (!x || !y) throw ParseError("track file: malformed number", line_no);
    pts.push_back({*x, *y});
  }
  if (!header_seen) throw ParseError("track file: missing 'x,y' header", line_no);
  if (!width) throw ParseError("track file: missing '# width=...' metadata", 0);
  if (!(*width > 0.0)) throw ParseError("track file: width must be positive", 0);
  if (pts.size() < 2) throw ParseError("track file: need at least two waypoints", line_no);

  Track track = [&] {
    try {
      return Track(pts, *width, closed, opts);
    } catch (const DegenerateInputError& e) {
      throw ParseError(std::string("track file: ") + e.what(), 0);
    }
  }();
  if (warnings) {
    const int crossings = track.self_intersections();
    if (crossings > 0) warnings->push_back("track centerline self-intersects (" + std::to_string(crossings) + " crossings)");
  }
  return track;
}

Track load_track(const std::filesystem::path& path, std::vector<std::string>* warnings, const TrackOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open track file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_track(buf.str(), warnings, opts);
}

void save_track_csv(std::span<const Point> waypoints, double width, bool closed, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# width=" << text::exact(width) << " closed=" << (closed ? 1 : 0) << '\n';
  out << "x,y\n";
  for (const auto& p : waypoints) out << text::exact(p.x) << ',' << text::exact(p.y) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace driftplan::track
