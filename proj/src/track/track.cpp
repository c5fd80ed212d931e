#include "driftplan/track/track.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "driftplan/error.hpp"

namespace driftplan::track {

namespace {

constexpr int kArcSubsamples = 64;

// Cubic spline in one coordinate over knots t. Natural end conditions for
// open curves, periodic for closed ones (y.back() == y.front() then).
class Spline {
 public:
  Spline(const std::vector<double>& t, const std::vector<double>& y, bool periodic) : t_(t), y_(y) {
    const int n = static_cast<int>(t.size()) - 1;  // intervals
    m_.assign(t.size(), 0.0);
    if (n < 2 && !periodic) return;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) h[i] = t[i + 1] - t[i];

    // Unknowns: second derivatives. Periodic: m_0..m_{n-1}, m_n = m_0.
    // Natural: interior m_1..m_{n-1}.
    const int first = periodic ? 0 : 1;
    const int count = periodic ? n : n - 1;
    if (count <= 0) return;
    Eigen::SparseMatrix<double> A(count, count);
    Eigen::VectorXd rhs(count);
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < count; ++r) {
      const int i = r + first;  // knot index
      const int im = (i - 1 + n) % n;
      const double hl = h[static_cast<std::size_t>(im)];
      const double hr = h[static_cast<std::size_t>(i % n)];
      const double yl = y[static_cast<std::size_t>(periodic ? im : i - 1)];
      const double yc = y[static_cast<std::size_t>(i)];
      const double yr = y[static_cast<std::size_t>(i + 1)];
      trip.emplace_back(r, r, 2.0 * (hl + hr));
      const int cl = periodic ? (r - 1 + count) % count : r - 1;
      const int cr = periodic ? (r + 1) % count : r + 1;
      if (cl >= 0 && cl < count) trip.emplace_back(r, cl, hl);
      if (cr >= 0 && cr < count) trip.emplace_back(r, cr, hr);
      rhs[r] = 6.0 * ((yr - yc) / hr - (yc - yl) / hl);
    }
    A.setFromTriplets(trip.begin(), trip.end());  // duplicates are summed (n == 2 periodic)
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw DegenerateInputError("track: spline system is singular");
    const Eigen::VectorXd sol = lu.solve(rhs);
    for (int r = 0; r < count; ++r) m_[static_cast<std::size_t>(r + first)] = sol[r];
    if (periodic) m_[static_cast<std::size_t>(n)] = m_[0];
  }

  // Value and first derivative on interval i at local parameter tau in [0, h].
  std::pair<double, double> eval(std::size_t i, double tau) const {
    const double h = t_[i + 1] - t_[i];
    const double a = m_[i], b = m_[i + 1];
    const double y0 = y_[i], y1 = y_[i + 1];
    const double u = h - tau;
    const double val = a * u * u * u / (6 * h) + b * tau * tau * tau / (6 * h) + (y0 / h - a * h / 6) * u +
                       (y1 / h - b * h / 6) * tau;
    const double der = -a * u * u / (2 * h) + b * tau * tau / (2 * h) - (y0 / h - a * h / 6) + (y1 / h - b * h / 6);
    return {val, der};
  }

 private:
  std::vector<double> t_, y_, m_;
};

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Intersection of [a, b) and [c, d), so a crossing through a shared vertex
// counts once. Parallel segments never cross.
bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double denom = cross(b.x - a.x, b.y - a.y, d.x - c.x, d.y - c.y);
  if (denom == 0.0) return false;
  const double t = cross(c.x - a.x, c.y - a.y, d.x - c.x, d.y - c.y) / denom;
  const double u = cross(c.x - a.x, c.y - a.y, b.x - a.x, b.y - a.y) / denom;
  constexpr double eps = 1e-9;  // vertex hits land on one side consistently
  return t >= -eps && t < 1.0 - eps && u >= -eps && u < 1.0 - eps;
}

}  // namespace

Track::Track(std::span<const Point> waypoints, double width, bool closed, const TrackOptions& opts)
    : width_(width), closed_(closed), opts_(opts) {
  if (!(width > 0.0) || !std::isfinite(width)) throw DegenerateInputError("track: width must be positive");
  if (!(opts.spacing > 0.0)) throw DegenerateInputError("track: resampling spacing must be positive");

  std::vector<Point> wp;
  for (const auto& p : waypoints) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DegenerateInputError("track: non-finite waypoint");
    if (!wp.empty() && std::hypot(p.x - wp.back().x, p.y - wp.back().y) < 1e-9) continue;
    wp.push_back(p);
  }
  if (closed && wp.size() > 1 && std::hypot(wp.back().x - wp.front().x, wp.back().y - wp.front().y) < 1e-6) {
    wp.pop_back();
  }
  if (wp.size() < 2 || (closed && wp.size() < 3)) {
    throw DegenerateInputError("track: need at least two distinct waypoints (three for a loop)");
  }
  if (closed) wp.push_back(wp.front());

  // Chord-length knots.
  std::vector<double> knots(wp.size(), 0.0), xs(wp.size()), ys(wp.size());
  for (std::size_t i = 0; i < wp.size(); ++i) {
    xs[i] = wp[i].x;
    ys[i] = wp[i].y;
    if (i > 0) knots[i] = knots[i - 1] + std::hypot(wp[i].x - wp[i - 1].x, wp[i].y - wp[i - 1].y);
  }
  const Spline sx(knots, xs, closed), sy(knots, ys, closed);

  // Dense arc-length table of the spline.
  struct Sample {
    std::size_t seg;
    double tau;
    double arc;
  };
  std::vector<Sample> table;
  table.push_back({0, 0.0, 0.0});
  Point prev = wp.front();
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    const double h = knots[i + 1] - knots[i];
    for (int k = 1; k <= kArcSubsamples; ++k) {
      const double tau = h * k / kArcSubsamples;
      const Point q{sx.eval(i, tau).first, sy.eval(i, tau).first};
      table.push_back({i, tau, table.back().arc + std::hypot(q.x - prev.x, q.y - prev.y)});
      prev = q;
    }
  }
  const double total = table.back().arc;
  const std::size_t n_seg = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(total / opts.spacing)));

  std::vector<double> raw_heading;
  std::size_t cursor = 0;
  for (std::size_t j = 0; j <= n_seg; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(n_seg);
    while (cursor + 2 < table.size() && table[cursor + 1].arc < target) ++cursor;
    const Sample& a = table[cursor];
    const Sample& b = table[cursor + 1];
    const double f = (b.arc > a.arc) ? std::clamp((target - a.arc) / (b.arc - a.arc), 0.0, 1.0) : 0.0;
    // Interpolate the spline parameter, staying inside b's interval.
    const std::size_t seg = b.seg;
    const double tau_a = (a.seg == seg) ? a.tau : 0.0;
    const double tau = tau_a + f * (b.tau - tau_a);
    const auto [x, dx] = sx.eval(seg, tau);
    const auto [y, dy] = sy.eval(seg, tau);
    pts_.push_back({x, y});
    raw_heading.push_back(std::atan2(dy, dx));
  }
  if (closed) {
    pts_.back() = pts_.front();
    raw_heading.back() = raw_heading.front();
  } else {
    pts_.front() = wp.front();
    pts_.back() = wp.back();
  }

  s_.assign(pts_.size(), 0.0);
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    const double ds = std::hypot(pts_[i].x - pts_[i - 1].x, pts_[i].y - pts_[i - 1].y);
    if (!(ds > 0.0)) throw DegenerateInputError("track: resampled centerline has a zero-length segment");
    s_[i] = s_[i - 1] + ds;
  }

  theta_.resize(raw_heading.size());
  theta_[0] = raw_heading[0];
  for (std::size_t i = 1; i < raw_heading.size(); ++i) {
    theta_[i] = theta_[i - 1] + vehicle::wrap_angle(raw_heading[i] - raw_heading[i - 1]);
  }

  for (double th : theta_) {
    cos_.push_back(std::cos(th));
    sin_.push_back(std::sin(th));
  }

  const std::size_t n = pts_.size();
  kappa_.assign(n, 0.0);
  if (n == 2) return;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && i + 1 < n) {
      kappa_[i] = (theta_[i + 1] - theta_[i - 1]) / (s_[i + 1] - s_[i - 1]);
    } else if (closed) {
      // Wrap through the shared endpoint.
      const double dtheta = (theta_[1] - theta_[0]) + (theta_[n - 1] - theta_[n - 2]);
      const double ds = (s_[1] - s_[0]) + (s_[n - 1] - s_[n - 2]);
      kappa_[i] = dtheta / ds;
    } else if (i == 0) {
      kappa_[i] = (theta_[1] - theta_[0]) / (s_[1] - s_[0]);
    } else {
      kappa_[i] = (theta_[n - 1] - theta_[n - 2]) / (s_[n - 1] - s_[n - 2]);
    }
  }
}

double Track::normalize_s(double s) const {
  const double L = length();
  if (!std::isfinite(s)) throw RangeError("track: non-finite arc length");
  if (closed_) {
    double r = std::fmod(s, L);
    if (r < 0.0) r += L;
    if (r >= L) r = 0.0;
    return r;
  }
  if (s < -1e-9 || s > L + 1e-9) throw RangeError("track: s outside [0, length] on an open track");
  return std::clamp(s, 0.0, L);
}

double Track::progress(double s_from, double s_to) const {
  double d = s_to - s_from;
  if (closed_) {
    const double L = length();
    d = std::fmod(d, L);
    if (d > 0.5 * L) d -= L;
    if (d <= -0.5 * L) d += L;
  }
  return d;
}

std::pair<std::size_t, double> Track::locate(double s) const {
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = (it == s_.begin()) ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  i = std::min(i, s_.size() - 2);
  return {i, (s - s_[i]) / (s_[i + 1] - s_[i])};
}

double Track::curvature_at(double s) const {
  const auto [i, u] = locate(normalize_s(s));
  return kappa_[i] + u * (kappa_[i + 1] - kappa_[i]);
}

double Track::heading_at(double s) const {
  const auto [i, u] = locate(normalize_s(s));
  return theta_[i] + u * (theta_[i + 1] - theta_[i]);
}

Point Track::position_at(double s) const {
  const auto [i, u] = locate(normalize_s(s));
  return {pts_[i].x + u * (pts_[i + 1].x - pts_[i].x), pts_[i].y + u * (pts_[i + 1].y - pts_[i].y)};
}

Pose Track::from_frenet(const FrenetPose& fp) const {
  const double s = normalize_s(fp.s);
  const double kappa = curvature_at(s);
  if (std::abs(fp.d * kappa) >= 1.0) throw FoldOverError("track: lateral offset beyond the local curvature radius");
  const auto [i, u] = locate(s);
  const double th = theta_[i] + u * (theta_[i + 1] - theta_[i]);
  const double px = pts_[i].x + u * (pts_[i + 1].x - pts_[i].x);
  const double py = pts_[i].y + u * (pts_[i + 1].y - pts_[i].y);
  return {px - fp.d * std::sin(th), py + fp.d * std::cos(th), vehicle::wrap_angle(th)};
}

bool Track::on_road(const FrenetPose& fp) const { return std::abs(fp.d) <= 0.5 * width_; }

std::optional<FrenetPose> Track::solve_segment(std::size_t i, const Point& p) const {
  const Point& a = pts_[i];
  const Point& b = pts_[i + 1];
  const double ta = theta_[i], tb = theta_[i + 1];
  auto point_at = [&](double u) { return Point{a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)}; };
  // f(u): tangential offset of p from the frame at u; zero at the Frenet foot point.
  const double f0 = (p.x - a.x) * cos_[i] + (p.y - a.y) * sin_[i];
  const double f1 = (p.x - b.x) * cos_[i + 1] + (p.y - b.y) * sin_[i + 1];
  if (f0 * f1 > 0.0) return std::nullopt;
  // Safeguarded Newton on the bracket; f is close to linear in u.
  double lo = 0.0, hi = 1.0, flo = f0;
  double u = (f0 == f1) ? 0.5 : f0 / (f0 - f1);
  const double ex = b.x - a.x, ey = b.y - a.y, dth = tb - ta;
  for (int it = 0; it < 60; ++it) {
    const double th = ta + u * dth;
    const double c = std::cos(th), sn = std::sin(th);
    const double rx = p.x - a.x - u * ex, ry = p.y - a.y - u * ey;
    const double fu = rx * c + ry * sn;
    if (fu == 0.0) break;
    if ((fu > 0.0) == (flo > 0.0)) {
      lo = u;
      flo = fu;
    } else {
      hi = u;
    }
    const double dfu = -(ex * c + ey * sn) + dth * (-rx * sn + ry * c);
    double next = (dfu != 0.0) ? u - fu / dfu : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15 || hi - lo < 1e-15) {
      u = next;
      break;
    }
    u = next;
  }
  const Point q = point_at(u);
  const double th = ta + u * (tb - ta);
  const double d = -(p.x - q.x) * std::sin(th) + (p.y - q.y) * std::cos(th);
  return FrenetPose{s_[i] + u * (s_[i + 1] - s_[i]), d};
}

FrenetPose Track::to_frenet(const Point& p, std::optional<double> hint_s) const {
  const auto fp = project(p, hint_s, opts_.window, true);
  if (!fp) throw ProjectionError("track: position is too far from the centerline to project");
  return *fp;
}

FrenetPose Track::to_frenet(const Point& p, double hint_s, double window) const {
  const auto fp = project(p, hint_s, window, true);
  if (!fp) throw ProjectionError("track: position is too far from the centerline to project");
  return *fp;
}

std::optional<FrenetPose> Track::project_local(const Point& p, double hint_s, double window) const {
  return project(p, hint_s, window, false);
}

std::optional<FrenetPose> Track::project(const Point& p, std::optional<double> hint_s, double window,
                                         bool fallback) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
  const double limit = opts_.max_offset_factor * width_;
  const std::size_t nseg = pts_.size() - 1;

  auto tangent_offset = [&](std::size_t v) {
    return (p.x - pts_[v].x) * cos_[v] + (p.y - pts_[v].y) * sin_[v];
  };

  std::optional<FrenetPose> best;
  double best_key = 0.0;
  auto scan = [&](std::size_t i0, std::size_t count, std::optional<double> center) {
    double fa = tangent_offset(i0 % nseg);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t i = (i0 + k) % nseg;
      const double fb = tangent_offset(i + 1);
      const bool bracket = fa * fb <= 0.0;
      fa = fb;
      if (!bracket) continue;
      // Cheap distance gate before the root solve.
      const double ex = pts_[i + 1].x - pts_[i].x, ey = pts_[i + 1].y - pts_[i].y;
      const double len2 = ex * ex + ey * ey;
      const double t = std::clamp(((p.x - pts_[i].x) * ex + (p.y - pts_[i].y) * ey) / len2, 0.0, 1.0);
      if (std::hypot(p.x - pts_[i].x - t * ex, p.y - pts_[i].y - t * ey) > limit + 1.0) continue;
      const auto fp = solve_segment(i, p);
      if (!fp || std::abs(fp->d) > limit) continue;
      // Closest foot point wins; on ties, the one nearer the hint.
      const double key = std::abs(fp->d) + (center ? 1e-9 * std::abs(progress(*center, fp->s)) : 0.0);
      if (!best || key < best_key) {
        best = fp;
        best_key = key;
      }
    }
  };

  if (hint_s) {
    const double L = length();
    const double c = closed_ ? normalize_s(*hint_s) : std::clamp(*hint_s, 0.0, L);
    double lo = c - window, hi = c + window;
    if (!closed_ || hi - lo >= L) {
      lo = closed_ ? 0.0 : std::max(lo, 0.0);
      hi = closed_ ? L : std::min(hi, L);
    }
    const double step = s_[1] - s_[0];
    const long i_lo = static_cast<long>(std::floor(lo / step)) - 1;
    const long i_hi = static_cast<long>(std::ceil(hi / step)) + 1;
    if (closed_) {
      const long count = std::min<long>(i_hi - i_lo, static_cast<long>(nseg));
      const long start = ((i_lo % static_cast<long>(nseg)) + static_cast<long>(nseg)) % static_cast<long>(nseg);
      scan(static_cast<std::size_t>(start), static_cast<std::size_t>(count), c);
    } else {
      const long a = std::max<long>(0, i_lo);
      const long b = std::min<long>(static_cast<long>(nseg), i_hi);
      if (b > a) scan(static_cast<std::size_t>(a), static_cast<std::size_t>(b - a), c);
    }
  }
  if (!best && (fallback || !hint_s)) scan(0, nseg, std::nullopt);
  if (best && closed_ && best->s >= length()) best->s = 0.0;
  return best;
}

int Track::self_intersections() const {
  const std::size_t nseg = pts_.size() - 1;
  int count = 0;
  for (std::size_t i = 0; i < nseg; ++i) {
    const Point& a = pts_[i];
    const Point& b = pts_[i + 1];
    constexpr double margin = 1e-9;  // [m], keeps crossings exactly at a vertex
    const double xmin = std::min(a.x, b.x) - margin, xmax = std::max(a.x, b.x) + margin;
    const double ymin = std::min(a.y, b.y) - margin, ymax = std::max(a.y, b.y) + margin;
    for (std::size_t j = i + 2; j < nseg; ++j) {
      if (closed_ && i == 0 && j == nseg - 1) continue;  // adjacent through the seam
      const Point& c = pts_[j];
      const Point& d = pts_[j + 1];
      if (std::max(c.x, d.x) < xmin || std::min(c.x, d.x) > xmax || std::max(c.y, d.y) < ymin ||
          std::min(c.y, d.y) > ymax) {
        continue;
      }
      if (segments_cross(a, b, c, d)) ++count;
    }
  }
  return count;
}

}  // namespace driftplan::track
