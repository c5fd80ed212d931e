#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftplan/vehicle/types.hpp"

namespace driftplan::track {

using vehicle::Pose;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct FrenetPose {
  double s = 0.0;  // distance along the centerline [m]
  double d = 0.0;  // lateral deviation, positive to the left [m]
};

struct TrackOptions {
  double spacing = 0.5;         // resampling step [m]
  double window = 50.0;         // half-width of the hinted projection search [m]
  double max_offset_factor = 5; // projections farther than this times the width are rejected
};

// Constant-width road around a centerline resampled to uniform arc length.
//
// The Frenet mapping is
//   position(s, d) = centerline(s) + d * n(theta(s)),  n = (-sin, cos)
// with centerline(s) piecewise linear and theta(s) the linear interpolation
// of per-vertex headings. to_frenet solves this exactly (not a plain
// nearest-segment projection), so s and d are continuous and the two
// conversions are inverses of each other.
class Track {
 public:
  // waypoints: at least two distinct points. For a closed track the last
  // waypoint may repeat the first; the loop is closed either way.
  Track(std::span<const Point> waypoints, double width, bool closed, const TrackOptions& opts = {});

  double width() const { return width_; }
  bool closed() const { return closed_; }
  double length() const { return s_.back(); }
  const TrackOptions& options() const { return opts_; }

  const std::vector<Point>& points() const { return pts_; }
  const std::vector<double>& arc_length() const { return s_; }
  const std::vector<double>& headings() const { return theta_; }    // unwrapped, per vertex
  const std::vector<double>& curvatures() const { return kappa_; }  // per vertex

  // Throws ProjectionError if the pose is more than max_offset_factor * width
  // from the centerline.
  FrenetPose to_frenet(const Point& p, std::optional<double> hint_s = std::nullopt) const;
  FrenetPose to_frenet(const Pose& pose, std::optional<double> hint_s = std::nullopt) const {
    return to_frenet(Point{pose.x, pose.y}, hint_s);
  }
  // Same, with a custom half-width for the hinted search window.
  FrenetPose to_frenet(const Point& p, double hint_s, double window) const;
  // Hinted search only, without the global fallback; nullopt when nothing
  // within the window projects within the offset limit.
  std::optional<FrenetPose> project_local(const Point& p, double hint_s, double window) const;

  // Throws FoldOverError if |d| * |kappa(s)| >= 1, RangeError for s outside
  // an open track.
  Pose from_frenet(const FrenetPose& fp) const;

  // |d| <= width / 2, boundary inclusive.
  bool on_road(const FrenetPose& fp) const;

  double curvature_at(double s) const;
  double heading_at(double s) const;  // unwrapped
  Point position_at(double s) const;

  // s reduced into [0, length) for closed tracks; RangeError outside
  // [0, length] for open ones.
  double normalize_s(double s) const;

  // Signed progress from s_from to s_to, taking the short way around a loop.
  double progress(double s_from, double s_to) const;

  // Distinct-segment crossings of the centerline polyline (0 for a simple curve).
  int self_intersections() const;

 private:
  // Segment index and fraction for a normalized s.
  std::pair<std::size_t, double> locate(double s) const;
  std::optional<FrenetPose> solve_segment(std::size_t i, const Point& p) const;
  std::optional<FrenetPose> project(const Point& p, std::optional<double> hint_s, double window,
                                    bool fallback) const;

  std::vector<Point> pts_;
  std::vector<double> s_;
  std::vector<double> theta_;
  std::vector<double> kappa_;
  std::vector<double> cos_, sin_;  // of theta_
  double width_;
  bool closed_;
  TrackOptions opts_;
};

// Reads the CSV track format:
//   # width=10.0 closed=1
//   x,y
//   0.0,0.0
//   ...
// Throws IoError / ParseError (with the line number). Self-intersections are
// reported through `warnings` when given.
Track load_track(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr,
                 const TrackOptions& opts = {});
Track parse_track(const std::string& content, std::vector<std::string>* warnings = nullptr,
                  const TrackOptions& opts = {});

void save_track_csv(std::span<const Point> waypoints, double width, bool closed,
                    const std::filesystem::path& path);

// Waypoint generators used for tests and the shipped tracks. Spacing ~1 m.
std::vector<Point> straight_waypoints(double length);
std::vector<Point> circle_waypoints(double radius, int n);
// Straight approach, 180 degree left turn of the given radius, straight exit.
std::vector<Point> uturn_waypoints(double radius, double approach, double exit);
// Closed mixed circuit: long straights, a wide left bend (R 40 m), a
// right-left chicane (R 20 m) and a 15 m left U-turn.
std::vector<Point> mixed_circuit_waypoints();
// Open S-curve: left arc then right arc of the given radius.
std::vector<Point> s_curve_waypoints(double radius);

}  // namespace driftplan::track
