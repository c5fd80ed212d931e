#include "driftplan/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "driftplan/error.hpp"
#include "driftplan/text.hpp"

namespace driftplan::harness {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// One bound setting: how to print it and how to assign it from text.
struct Field {
  std::string section;
  std::string key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

double to_double(const std::string& section, const std::string& key, const std::string& raw) {
  const auto x = text::parse_double(raw);
  if (!x || !std::isfinite(*x)) {
    // "inf" is accepted for the slack-type settings.
    if (raw == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError("config: " + section + "." + key + ": bad number '" + raw + "'");
  }
  return *x;
}

long to_long(const std::string& section, const std::string& key, const std::string& raw) {
  const double x = to_double(section, key, raw);
  if (x != std::floor(x) || std::abs(x) > 1e12) {
    throw ConfigError("config: " + section + "." + key + ": expected an integer, got '" + raw + "'");
  }
  return static_cast<long>(x);
}

bool to_bool(const std::string& section, const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError("config: " + section + "." + key + ": expected a boolean, got '" + raw + "'");
}

std::string show(double x) {
  return std::isinf(x) ? (x > 0 ? "inf" : "-inf") : text::exact(x);
}

class Binder {
 public:
  void num(const std::string& sec, const std::string& key, double& ref, double scale = 1.0) {
    fields_.push_back({sec, key, [&ref, scale] { return show(ref / scale); },
                       [&ref, scale, sec, key](const std::string& raw) { ref = to_double(sec, key, raw) * scale; }});
  }
  template <class Int>
  void integer(const std::string& sec, const std::string& key, Int& ref) {
    fields_.push_back({sec, key, [&ref] { return std::to_string(ref); },
                       [&ref, sec, key](const std::string& raw) { ref = static_cast<Int>(to_long(sec, key, raw)); }});
  }
  void flag(const std::string& sec, const std::string& key, bool& ref) {
    fields_.push_back({sec, key, [&ref] { return std::string(ref ? "true" : "false"); },
                       [&ref, sec, key](const std::string& raw) { ref = to_bool(sec, key, raw); }});
  }
  void opt(const std::string& sec, const std::string& key, std::optional<double>& ref) {
    fields_.push_back({sec, key, [&ref] { return ref ? show(*ref) : std::string("auto"); },
                       [&ref, sec, key](const std::string& raw) {
                         if (raw == "auto") ref.reset();
                         else ref = to_double(sec, key, raw);
                       }});
  }
  void path(const std::string& sec, const std::string& key, fs::path& ref, const fs::path* base) {
    fields_.push_back({sec, key, [&ref] { return ref.generic_string(); },
                       [&ref, base](const std::string& raw) {
                         fs::path p(raw);
                         ref = (p.is_relative() && base && !base->empty()) ? (*base / p).lexically_normal() : p;
                       }});
  }

  const std::vector<Field>& fields() const { return fields_; }

 private:
  std::vector<Field> fields_;
};

// Binds every setting of a RunConfig, in canonical order. Vehicle and tire
// settings are bound separately so a params file can supply them.
void bind_vehicle(Binder& b, vehicle::VehicleParams& v, vehicle::TireParams& t) {
  b.num("vehicle", "m", v.m);
  b.num("vehicle", "J_z", v.J_z);
  b.num("vehicle", "l_f", v.l_f);
  b.num("vehicle", "l_r", v.l_r);
  b.num("vehicle", "h", v.h);
  b.num("vehicle", "C_f", v.C_f);
  b.num("vehicle", "C_r", v.C_r);
  b.num("vehicle", "C_x", v.C_x);
  b.num("vehicle", "v_max", v.v_max);
  b.num("vehicle", "a_max", v.a_max);
  b.num("vehicle", "g", v.g);
  b.num("tire", "B", t.B);
  b.num("tire", "C", t.C);
  b.num("tire", "D", t.D);
  b.num("tire", "E", t.E);
}

void bind_run(Binder& b, RunConfig& c, const fs::path* base) {
  b.path("paths", "track", c.track_path, base);
  b.path("paths", "manifold", c.manifold_path, base);
  b.path("paths", "params", c.params_path, base);
  b.path("paths", "out", c.out_dir, base);

  b.integer("run", "laps", c.laps);
  b.integer("run", "max_cycles", c.max_cycles);
  b.num("run", "drift_threshold", c.drift_threshold);
  b.flag("run", "plots", c.plots);

  b.opt("initial", "x", c.initial.x);
  b.opt("initial", "y", c.initial.y);
  b.opt("initial", "psi", c.initial.psi);
  b.num("initial", "v", c.initial.v);
  b.num("initial", "beta", c.initial.beta);
  b.num("initial", "psidot", c.initial.psidot);

  esm::SweepGrid& g = c.sweep;
  b.num("esm", "delta_min_deg", g.delta_min, kDeg);
  b.num("esm", "delta_max_deg", g.delta_max, kDeg);
  b.num("esm", "delta_step_deg", g.delta_step, kDeg);
  b.num("esm", "lambda_min", g.lambda_min);
  b.num("esm", "lambda_max", g.lambda_max);
  b.num("esm", "lambda_step", g.lambda_step);
  b.integer("esm", "max_iter", c.sweep_options.solver.max_iter);
  b.num("esm", "tol", c.sweep_options.solver.tol);
  b.flag("esm", "screen_stability", c.sweep_options.screen_stability);
  b.num("esm", "r_min", c.domain.r_min);
  b.num("esm", "r_max", c.domain.r_max);
  b.num("esm", "v_max", c.domain.v_max);
  b.num("esm", "beta_margin", c.domain.beta_margin);
  b.num("esm", "max_edge", c.domain.max_edge);

  planner::PlannerConfig& p = c.planner;
  b.num("planner", "grid_x", p.grid_step[planner::kX]);
  b.num("planner", "grid_y", p.grid_step[planner::kY]);
  b.num("planner", "grid_psi_deg", p.grid_step[planner::kPsi], kDeg);
  b.num("planner", "grid_v", p.grid_step[planner::kV]);
  b.num("planner", "grid_beta", p.grid_step[planner::kBeta]);
  b.num("planner", "grid_psidot", p.grid_step[planner::kPsidot]);
  b.num("planner", "T_s", p.T_s);
  b.integer("planner", "substeps", p.substeps);
  b.integer("planner", "k_hor", p.k_hor);
  b.integer("planner", "N_timeout", p.N_timeout);
  b.flag("planner", "esm_enabled", p.esm_enabled);
  b.flag("planner", "sample_center", p.sample_center);
  b.num("planner", "inner_radius", p.inner_radius);
  b.integer("planner", "inner_count", p.inner_count);
  b.num("planner", "outer_radius", p.outer_radius);
  b.integer("planner", "outer_count", p.outer_count);
  b.num("planner", "beta_scale", p.beta_scale);
  b.num("planner", "psidot_scale", p.psidot_scale);
  b.flag("planner", "bicycle_enabled", p.bicycle_enabled);
  b.num("planner", "beta_lin", p.beta_lin);
  b.num("planner", "psidot_lin", p.psidot_lin);
  b.num("planner", "delta_min", p.delta_min);
  b.num("planner", "delta_max", p.delta_max);
  b.integer("planner", "delta_count", p.delta_count);
  b.num("planner", "lambda_min", p.lambda_min);
  b.num("planner", "lambda_max", p.lambda_max);
  b.integer("planner", "lambda_count", p.lambda_count);
  b.num("planner", "beta_margin", p.beta_margin);
  b.num("planner", "half_width", p.half_width);
  b.num("planner", "clearance", p.clearance);
  b.num("planner", "w_smooth", p.w_smooth);
  b.num("planner", "w_edge", p.w_edge);
  b.num("planner", "edge_soft", p.edge_soft);
  b.num("planner", "w_sibling", p.w_sibling);
  b.num("planner", "w_corner", p.w_corner);
  b.num("planner", "a_lat", p.a_lat);
  b.num("planner", "w_shortfall", p.w_shortfall);
  b.num("planner", "profile_slack", p.profile_slack);
  b.num("planner", "T_rep", p.T_rep);
  b.num("planner", "T_plan", p.T_plan);
}

pt::ptree read_ini(const std::string& text, const std::string& what) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(what + ": " + e.message(), e.line());
  }
  return tree;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Applies tree values to the bound fields; anything unbound is an error.
void apply(const pt::ptree& tree, const Binder& b, const std::set<std::string>& sections, const std::string& what) {
  std::map<std::pair<std::string, std::string>, const Field*> index;
  for (const Field& f : b.fields()) index[{f.section, f.key}] = &f;
  for (const auto& [sec, body] : tree) {
    if (!sections.contains(sec)) throw ConfigError(what + ": unknown section [" + sec + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError(what + ": '" + sec + "' is outside any section");
    for (const auto& [key, value] : body) {
      const auto it = index.find({sec, key});
      if (it == index.end()) throw ConfigError(what + ": unknown key " + sec + "." + key);
      it->second->set(value.data());
    }
  }
}

void check(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  try {
    vehicle::validate(c.vehicle);
    vehicle::validate(c.tires);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  planner::validate(c.planner);
  require(c.laps >= 0, "run.laps must be non-negative");
  require(c.max_cycles >= 1, "run.max_cycles must be at least 1");
  require(c.drift_threshold > 0.0, "run.drift_threshold must be positive");
  require(c.initial.v > 0.0, "initial.v must be positive");
  require(c.sweep.delta_step > 0.0 && c.sweep.lambda_step > 0.0, "esm steps must be positive");
  require(c.sweep_options.solver.max_iter >= 1 && c.sweep_options.solver.tol > 0.0, "esm solver settings must be positive");
  require(c.domain.r_min > 0.0 && c.domain.r_max > c.domain.r_min, "esm radius window is empty");
  require(c.domain.v_max > 0.0 && c.domain.max_edge > 0.0, "esm.v_max and esm.max_edge must be positive");
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  RunConfig c;
  c.planner.a_max = c.vehicle.a_max;
  c.planner.v_max = c.vehicle.v_max;

  const pt::ptree tree = read_ini(text, "config");
  Binder run;
  bind_run(run, c, &base_dir);
  bind_vehicle(run, c.vehicle, c.tires);
  apply(tree, run, {"paths", "run", "initial", "esm", "planner", "vehicle", "tire"}, "config");

  if (!c.params_path.empty()) {
    if (tree.get_child_optional("vehicle") || tree.get_child_optional("tire")) {
      throw ConfigError("config: [vehicle]/[tire] given both inline and through paths.params");
    }
    Binder veh;
    bind_vehicle(veh, c.vehicle, c.tires);
    apply(read_ini(slurp(c.params_path), c.params_path.string()), veh, {"vehicle", "tire"}, c.params_path.string());
  }
  c.planner.a_max = c.vehicle.a_max;
  c.planner.v_max = c.vehicle.v_max;
  check(c);
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig c = parse_run_config(slurp(path), path.parent_path());
  c.source = path;
  return c;
}

std::string RunConfig::canonical() const {
  RunConfig copy = *this;
  Binder b;
  bind_run(b, copy, nullptr);
  bind_vehicle(b, copy.vehicle, copy.tires);
  std::string out;
  for (const Field& f : b.fields()) out += f.section + "." + f.key + " = " + f.get() + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::istringstream in(canonical());
  std::uint64_t h = text::fnv1a("");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("paths.", 0) == 0 || line.rfind("run.plots ", 0) == 0) continue;
    h = text::fnv1a(line + "\n", h);
  }
  return h;
}

void require_inputs(const RunConfig& cfg, Command cmd) {
  auto need = [](const fs::path& p, const std::string& what) {
    if (p.empty()) throw ConfigError("config: paths." + what + " is not set");
    if (!fs::exists(p)) throw ConfigError("config: " + what + " file '" + p.string() + "' does not exist");
  };
  switch (cmd) {
    case Command::kEsmBuild:
      if (cfg.manifold_path.empty()) throw ConfigError("config: paths.manifold is not set");
      break;
    case Command::kEsmShow:
      need(cfg.manifold_path, "manifold");
      break;
    case Command::kPlan:
    case Command::kLap:
      need(cfg.track_path, "track");
      need(cfg.manifold_path, "manifold");
      break;
  }
}

}  // namespace driftplan::harness
