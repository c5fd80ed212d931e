#include "driftplan/harness/output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftplan/error.hpp"
#include "driftplan/text.hpp"

namespace driftplan::harness {

using planner::LogSample;

std::vector<LogSample> plan_samples(const planner::SearchResult& plan, const track::Track& track, double dt) {
  std::vector<LogSample> out;
  LogSample root;
  root.state = plan.root.state;
  root.s = plan.root.s;
  root.d = plan.root.d;
  root.mode = plan.root.mode;
  out.push_back(root);
  for (const auto& step : plan.steps) {
    const auto& samples = step.primitive.samples;
    for (std::size_t j = 1; j < samples.size(); ++j) {
      const LogSample& prev = out.back();
      LogSample ls;
      ls.t = static_cast<double>(out.size()) * dt;
      ls.state = samples[j];
      ls.state.pose.psi = vehicle::wrap_angle(ls.state.pose.psi);
      ls.input = step.primitive.input;
      ls.mode = step.primitive.mode;
      const auto fp = track.to_frenet(track::Point{ls.state.pose.x, ls.state.pose.y}, prev.s);
      ls.s = fp.s;
      ls.d = fp.d;
      ls.s_total = prev.s_total + track.progress(prev.s, fp.s);
      out.push_back(ls);
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<LogSample>& rows,
                          const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << kTrajectoryColumns << '\n';
  for (const auto& r : rows) {
    const auto& p = r.state.pose;
    const auto& d = r.state.dyn;
    out << text::exact(r.t) << ',' << text::exact(p.x) << ',' << text::exact(p.y) << ',' << text::exact(p.psi)
        << ',' << text::exact(d.v) << ',' << text::exact(d.beta) << ',' << text::exact(d.psidot) << ','
        << text::exact(r.input.delta) << ',' << text::exact(r.input.lambda) << ',' << text::exact(r.s) << ','
        << text::exact(r.d) << ',' << planner::mode_name(r.mode) << '\n';
  }
}

std::vector<LogSample> read_trajectory_csv(const std::string& content) {
  std::vector<LogSample> rows;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string_view line : text::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kTrajectoryColumns) throw ParseError("trajectory csv: unexpected header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 12) throw ParseError("trajectory csv: expected 12 fields", line_no);
    double v[11];
    for (int i = 0; i < 11; ++i) {
      const auto x = text::parse_double(f[static_cast<std::size_t>(i)]);
      if (!x) throw ParseError("trajectory csv: bad number", line_no);
      v[i] = *x;
    }
    LogSample ls;
    ls.t = v[0];
    ls.state.pose = {v[1], v[2], v[3]};
    ls.state.dyn = {v[4], v[5], v[6]};
    ls.input = {v[7], v[8]};
    ls.s = v[9];
    ls.d = v[10];
    if (f[11] == "bicycle") {
      ls.mode = planner::Mode::kBicycle;
    } else if (f[11] == "esm") {
      ls.mode = planner::Mode::kEsm;
    } else {
      throw ParseError("trajectory csv: bad mode", line_no);
    }
    rows.push_back(ls);
  }
  if (!header_seen) throw ParseError("trajectory csv: missing header", 0);
  return rows;
}

void write_cycles_csv(std::ostream& out, const std::vector<planner::CycleRecord>& cycles,
                      const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "cycle,t_start,depth,planned_progress,expansions,generated,pruned,peak_open,termination\n";
  for (const auto& c : cycles) {
    out << c.cycle << ',' << text::exact(c.t_start) << ',' << c.depth << ',' << text::exact(c.planned_progress)
        << ',' << c.stats.expansions << ',' << c.stats.generated << ',' << c.stats.pruned.total() << ','
        << c.stats.peak_open << ',' << planner::termination_name(c.stats.termination) << '\n';
  }
}

namespace {

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  void add(double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
};

// World coordinates (y up) mapped into a fixed-width canvas (y down).
class Canvas {
 public:
  Canvas(Box b, double width_px, double margin) : box_(b), margin_(margin) {
    const double w = std::max(b.x1 - b.x0, 1e-9), h = std::max(b.y1 - b.y0, 1e-9);
    scale_ = width_px / w;
    width_ = width_px + 2 * margin;
    height_ = h * scale_ + 2 * margin;
  }
  double px(double x) const { return margin_ + (x - box_.x0) * scale_; }
  double py(double y) const { return margin_ + (box_.y1 - y) * scale_; }

  std::string begin() const {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        width_, height_, width_, height_);
  }
  template <class Pts>
  std::string polyline(const Pts& pts, const std::string& style) const {
    std::string s = "<polyline fill=\"none\" " + style + " points=\"";
    for (const auto& [x, y] : pts) s += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
    s += "\"/>\n";
    return s;
  }

 private:
  Box box_;
  double margin_, scale_ = 1.0, width_ = 0.0, height_ = 0.0;
};

using Pts = std::vector<std::pair<double, double>>;

struct Edges {
  Pts left, right, center;
};

Edges track_edges(const track::Track& track) {
  Edges e;
  const auto& pts = track.points();
  const auto& th = track.headings();
  const double half = 0.5 * track.width();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double nx = -std::sin(th[i]), ny = std::cos(th[i]);
    e.left.push_back({pts[i].x + half * nx, pts[i].y + half * ny});
    e.right.push_back({pts[i].x - half * nx, pts[i].y - half * ny});
    e.center.push_back({pts[i].x, pts[i].y});
  }
  return e;
}

Box box_of(const Edges& e) {
  Box b;
  for (const auto* v : {&e.left, &e.right})
    for (const auto& [x, y] : *v) b.add(x, y);
  return b;
}

std::string draw_track(const Canvas& c, const Edges& e) {
  const std::string edge = "stroke=\"#333\" stroke-width=\"1.2\"";
  return c.polyline(e.left, edge) + c.polyline(e.right, edge) +
         c.polyline(e.center, "stroke=\"#aaa\" stroke-width=\"0.8\" stroke-dasharray=\"4 4\"");
}

std::string legend(double x, double y, const std::vector<std::pair<std::string, std::string>>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double yy = y + 16.0 * static_cast<double>(i);
    s += fmt::format(
        "<line x1=\"{:.0f}\" y1=\"{:.0f}\" x2=\"{:.0f}\" y2=\"{:.0f}\" stroke=\"{}\" stroke-width=\"3\"/>"
        "<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        x, yy, x + 20, yy, items[i].second, x + 26, yy + 4, items[i].first);
  }
  return s;
}

}  // namespace

std::string plan_svg(const track::Track& track, const planner::SearchResult& plan) {
  const Edges e = track_edges(track);
  Box b = box_of(e);
  for (const auto& n : plan.explored) b.add(n.state.pose.x, n.state.pose.y);
  const Canvas c(b, 900, 30);
  std::string s = c.begin() + draw_track(c, e);

  s += "<g stroke=\"#7fa7d9\" stroke-width=\"0.6\" opacity=\"0.6\">\n";
  for (const auto& n : plan.explored) {
    if (n.parent < 0) continue;
    const auto& p = plan.explored[static_cast<std::size_t>(n.parent)].state.pose;
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", c.px(p.x), c.py(p.y),
                     c.px(n.state.pose.x), c.py(n.state.pose.y));
  }
  s += "</g>\n";

  Pts path{{plan.root.state.pose.x, plan.root.state.pose.y}};
  for (const auto& st : plan.steps)
    for (std::size_t j = 1; j < st.primitive.samples.size(); ++j)
      path.push_back({st.primitive.samples[j].pose.x, st.primitive.samples[j].pose.y});
  s += c.polyline(path, "stroke=\"#d62728\" stroke-width=\"2.5\"");
  s += legend(40, 20, {{"explored branches", "#7fa7d9"}, {"chosen path", "#d62728"}, {"road edge", "#333"}});
  s += "</svg>\n";
  return s;
}

std::string lap_track_svg(const track::Track& track, const std::vector<LogSample>& log, double drift_threshold) {
  const Edges e = track_edges(track);
  Box b = box_of(e);
  for (const auto& l : log) b.add(l.state.pose.x, l.state.pose.y);
  const Canvas c(b, 900, 30);
  std::string s = c.begin() + draw_track(c, e);

  // Consecutive samples of the same class form one polyline.
  std::size_t i = 0;
  while (i + 1 < log.size()) {
    const bool drift = std::abs(log[i + 1].state.dyn.beta) > drift_threshold;
    Pts run{{log[i].state.pose.x, log[i].state.pose.y}};
    std::size_t j = i + 1;
    while (j < log.size() && (std::abs(log[j].state.dyn.beta) > drift_threshold) == drift) {
      run.push_back({log[j].state.pose.x, log[j].state.pose.y});
      ++j;
    }
    s += c.polyline(run, drift ? "stroke=\"#ff7f0e\" stroke-width=\"3\"" : "stroke=\"#1f77b4\" stroke-width=\"2\"");
    i = j - 1;
  }
  s += legend(40, 20, {{"trajectory", "#1f77b4"}, {fmt::format("|beta| > {} rad", drift_threshold), "#ff7f0e"}});
  s += "</svg>\n";
  return s;
}

std::string lap_states_svg(const std::vector<LogSample>& log, double drift_threshold) {
  const double W = 900, H = 180, left = 70, top = 20, gap = 40;
  struct Panel {
    const char* label;
    double (*get)(const LogSample&);
  };
  const Panel panels[] = {
      {"v [m/s]", [](const LogSample& l) { return l.state.dyn.v; }},
      {"beta [rad]", [](const LogSample& l) { return l.state.dyn.beta; }},
      {"psidot [rad/s]", [](const LogSample& l) { return l.state.dyn.psidot; }},
  };
  const double total_h = top + 3 * (H + gap) + 20;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W + left + 20, total_h, W + left + 20, total_h);
  const double t0 = log.empty() ? 0.0 : log.front().t;
  const double t1 = log.empty() ? 1.0 : std::max(log.back().t, t0 + 1e-9);

  for (int k = 0; k < 3; ++k) {
    const Panel& p = panels[k];
    double lo = 0.0, hi = 0.0;
    for (const auto& l : log) {
      lo = std::min(lo, p.get(l));
      hi = std::max(hi, p.get(l));
    }
    if (k == 1) {
      lo = std::min(lo, -drift_threshold);
      hi = std::max(hi, drift_threshold);
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double y0 = top + k * (H + gap);
    auto X = [&](double t) { return left + (t - t0) / (t1 - t0) * W; };
    auto Y = [&](double v) { return y0 + (hi - v) / (hi - lo) * H; };
    s += fmt::format("<rect x=\"{:.0f}\" y=\"{:.0f}\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"none\" stroke=\"#333\"/>\n",
                     left, y0, W, H);
    s += fmt::format("<text x=\"5\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                     y0 + H / 2, p.label);
    s += fmt::format("<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"end\">{:.2f}</text>\n",
                     left - 4, y0 + 10, hi);
    s += fmt::format("<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"end\">{:.2f}</text>\n",
                     left - 4, y0 + H, lo);
    if (lo < 0.0 && hi > 0.0) {
      s += fmt::format("<line x1=\"{:.0f}\" y1=\"{:.2f}\" x2=\"{:.0f}\" y2=\"{:.2f}\" stroke=\"#ccc\"/>\n", left, Y(0.0),
                       left + W, Y(0.0));
    }
    if (k == 1) {
      for (double th : {drift_threshold, -drift_threshold}) {
        s += fmt::format("<line x1=\"{:.0f}\" y1=\"{:.2f}\" x2=\"{:.0f}\" y2=\"{:.2f}\" stroke=\"#ff7f0e\" "
                         "stroke-dasharray=\"5 4\"/>\n",
                         left, Y(th), left + W, Y(th));
      }
    }
    std::string pts;
    for (const auto& l : log) pts += fmt::format("{:.2f},{:.2f} ", X(l.t), Y(p.get(l)));
    s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
  }
  s += fmt::format("<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"12\" "
                   "text-anchor=\"middle\">t [s] ({:.1f} .. {:.1f})</text>\n",
                   left + W / 2, total_h - 8, t0, t1);
  s += "</svg>\n";
  return s;
}

std::string manifold_svg(const esm::Manifold& m) {
  Box b;
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (const auto& p : m.samples()) {
    b.add(p.beta, p.psidot);
    vmin = std::min(vmin, p.v);
    vmax = std::max(vmax, p.v);
  }
  if (m.samples().empty()) b = {0, 0, 1, 1};
  const Canvas c(b, 700, 50);
  std::string s = c.begin();
  s += "<g stroke=\"#ddd\" stroke-width=\"0.5\" fill=\"none\">\n";
  for (const auto& t : m.triangles()) {
    const auto& A = m.samples()[static_cast<std::size_t>(t[0])];
    const auto& B = m.samples()[static_cast<std::size_t>(t[1])];
    const auto& C = m.samples()[static_cast<std::size_t>(t[2])];
    s += fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\"/>\n", c.px(A.beta), c.py(A.psidot),
                     c.px(B.beta), c.py(B.psidot), c.px(C.beta), c.py(C.psidot));
  }
  s += "</g>\n";
  for (const auto& p : m.samples()) {
    const double u = vmax > vmin ? (p.v - vmin) / (vmax - vmin) : 0.0;
    const int r = static_cast<int>(255 * u), bl = static_cast<int>(255 * (1 - u));
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"rgb({},60,{})\"/>\n", c.px(p.beta),
                     c.py(p.psidot), r, bl);
  }
  s += fmt::format("<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">beta [rad] horizontal, "
                   "psidot [rad/s] vertical; colour v from {:.1f} (blue) to {:.1f} (red) m/s</text>\n",
                   vmin, vmax);
  s += "</svg>\n";
  return s;
}

}  // namespace driftplan::harness
