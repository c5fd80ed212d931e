#include <cmath>
#include <numbers>

#include "driftplan/track/track.hpp"

namespace driftplan::track {

namespace {

constexpr double kStep = 1.0;  // waypoint spacing [m]

// Appends waypoints while driving a turtle; the current point is never
// duplicated.
class Turtle {
 public:
  Turtle(double x, double y, double heading) : x_(x), y_(y), th_(heading) { out_.push_back({x, y}); }

  void straight(double length) {
    const int n = std::max(1, static_cast<int>(std::ceil(length / kStep)));
    const double x0 = x_, y0 = y_;
    for (int i = 1; i <= n; ++i) {
      const double s = length * i / n;
      out_.push_back({x0 + s * std::cos(th_), y0 + s * std::sin(th_)});
    }
    x_ = out_.back().x;
    y_ = out_.back().y;
  }

  // Positive angle turns left.
  void arc(double radius, double angle) {
    const double side = angle > 0 ? 1.0 : -1.0;
    const double cx = x_ - side * radius * std::sin(th_);
    const double cy = y_ + side * radius * std::cos(th_);
    const int n = std::max(2, static_cast<int>(std::ceil(radius * std::abs(angle) / kStep)));
    const double th0 = th_;
    for (int i = 1; i <= n; ++i) {
      const double th = th0 + angle * i / n;
      out_.push_back({cx + side * radius * std::sin(th), cy - side * radius * std::cos(th)});
    }
    th_ = th0 + angle;
    x_ = out_.back().x;
    y_ = out_.back().y;
  }

  std::vector<Point> take() { return std::move(out_); }

 private:
  double x_, y_, th_;
  std::vector<Point> out_;
};

}  // namespace

std::vector<Point> straight_waypoints(double length) { return {{0.0, 0.0}, {length, 0.0}}; }

std::vector<Point> circle_waypoints(double radius, int n) {
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    out.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  out.push_back(out.front());
  return out;
}

std::vector<Point> uturn_waypoints(double radius, double approach, double exit) {
  Turtle t(0.0, 0.0, 0.0);
  t.straight(approach);
  t.arc(radius, std::numbers::pi);
  t.straight(exit);
  return t.take();
}

std::vector<Point> mixed_circuit_waypoints() {
  const double pi = std::numbers::pi;
  Turtle t(0.0, 0.0, 0.0);
  t.straight(120.0);
  t.arc(40.0, pi);
  t.straight(100.0);
  t.arc(20.0, pi / 2);
  t.straight(10.0);
  t.arc(20.0, -pi / 2);
  t.arc(15.0, pi);
  t.straight(20.0);
  return t.take();
}

std::vector<Point> s_curve_waypoints(double radius) {
  Turtle t(0.0, 0.0, 0.0);
  t.straight(10.0);
  t.arc(radius, std::numbers::pi / 2);
  t.arc(radius, -std::numbers::pi / 2);
  t.straight(10.0);
  return t.take();
}

}  // namespace driftplan::track
