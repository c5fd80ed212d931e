#include "driftplan/esm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "driftplan/error.hpp"

namespace driftplan::esm {

namespace {

int grid_count(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) return 0;
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double snap_zero(double x) { return std::abs(x) < 1e-12 ? 0.0 : x; }

DynamicState kinematic_guess(const ControlInput& u, const VehicleParams& p) {
  const double v = 4.0;
  double psidot = v * std::tan(u.delta) / p.wheelbase();
  if (std::abs(psidot) < 1e-3) psidot = 1e-2;
  return {v, 0.0, psidot};
}

}  // namespace

int SweepGrid::delta_count() const { return grid_count(delta_min, delta_max, delta_step); }
int SweepGrid::lambda_count() const { return grid_count(lambda_min, lambda_max, lambda_step); }
double SweepGrid::delta_at(int i) const { return snap_zero(delta_min + i * delta_step); }
double SweepGrid::lambda_at(int j) const { return snap_zero(lambda_min + j * lambda_step); }

const SweepCell& SweepResult::cell(int i_delta, int i_lambda) const {
  return cells.at(static_cast<std::size_t>(i_lambda * grid.delta_count() + i_delta));
}

std::vector<EquilibriumPoint> SweepResult::points() const {
  std::vector<EquilibriumPoint> out;
  for (const auto& c : cells) {
    if (c.status == CellStatus::kConverged) out.push_back(*c.point);
  }
  return out;
}

int SweepResult::converged_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                        [](const SweepCell& c) { return c.status == CellStatus::kConverged; }));
}

int SweepResult::degenerate_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                        [](const SweepCell& c) { return c.status == CellStatus::kDegenerate; }));
}

double SweepResult::convergence_rate() const {
  const int usable = static_cast<int>(cells.size()) - degenerate_count();
  return usable > 0 ? static_cast<double>(converged_count()) / usable : 0.0;
}

SweepResult sweep_inputs(const SweepGrid& grid, const VehicleParams& p, const TireParams& tires,
                         const SweepOptions& opts) {
  const int nd = grid.delta_count();
  const int nl = grid.lambda_count();
  if (nd == 0) throw EmptySweepError("sweep_inputs: empty steering range");
  if (nl == 0) throw EmptySweepError("sweep_inputs: empty slip range");

  SweepResult result;
  result.grid = grid;
  result.cells.resize(static_cast<std::size_t>(nd) * nl);
  for (int j = 0; j < nl; ++j) {
    for (int i = 0; i < nd; ++i) {
      SweepCell& c = result.cells[static_cast<std::size_t>(j * nd + i)];
      c.i_delta = i;
      c.i_lambda = j;
      c.input = {grid.delta_at(i), grid.lambda_at(j)};
      if (c.input.delta == 0.0 && c.input.lambda == 0.0) c.status = CellStatus::kDegenerate;
    }
  }

  auto attempt = [&](SweepCell& c, const DynamicState& guess, int depth) {
    ++c.attempts;
    try {
      c.point = solve_equilibrium(c.input, p, tires, guess, opts.solver);
      c.status = CellStatus::kConverged;
      c.depth = depth;
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  // Seed order: the cell nearest to a mild left turn at the lowest slip, then
  // every other cell in storage order.
  std::vector<int> seeds(result.cells.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = static_cast<int>(k);
  const double preferred_delta = 5.0 * std::numbers::pi / 180.0;
  const auto first = std::min_element(seeds.begin(), seeds.end(), [&](int a, int b) {
    const auto& ca = result.cells[a];
    const auto& cb = result.cells[b];
    const double da = std::abs(ca.input.delta - preferred_delta) + std::abs(ca.input.lambda - grid.lambda_min);
    const double db = std::abs(cb.input.delta - preferred_delta) + std::abs(cb.input.lambda - grid.lambda_min);
    return da < db;
  });
  std::rotate(seeds.begin(), first, first + 1);

  std::set<std::pair<int, int>> tried;  // (cell, neighbour that seeded it)
  std::vector<bool> generic_tried(result.cells.size(), false);
  for (int seed : seeds) {
    SweepCell& sc = result.cells[seed];
    if (sc.status != CellStatus::kFailed || generic_tried[seed]) continue;
    generic_tried[seed] = true;
    if (!attempt(sc, kinematic_guess(sc.input, p), 0)) continue;

    std::deque<int> queue{seed};
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      const SweepCell& cc = result.cells[cur];
      const int neighbours[4][2] = {{cc.i_delta - 1, cc.i_lambda}, {cc.i_delta + 1, cc.i_lambda},
                                    {cc.i_delta, cc.i_lambda - 1}, {cc.i_delta, cc.i_lambda + 1}};
      for (const auto& nb : neighbours) {
        if (nb[0] < 0 || nb[0] >= nd || nb[1] < 0 || nb[1] >= nl) continue;
        const int idx = nb[1] * nd + nb[0];
        SweepCell& nc = result.cells[idx];
        if (nc.status != CellStatus::kFailed || !tried.insert({idx, cur}).second) continue;
        if (attempt(nc, cc.point->dyn, cc.depth + 1)) queue.push_back(idx);
      }
    }
  }

  if (result.converged_count() == 0) throw EmptySweepError("sweep_inputs: no cell converged");

  if (opts.screen_stability) {
    for (auto& c : result.cells) {
      if (c.status == CellStatus::kConverged) {
        c.point->open_loop_unstable = open_loop_unstable(*c.point, p, tires, opts.screen);
      }
    }
  }
  return result;
}

double mirror_mismatch(const SweepResult& sweep, int* pairs) {
  const int nd = sweep.grid.delta_count();
  double worst = 0.0;
  int count = 0;
  for (const auto& c : sweep.cells) {
    if (c.status != CellStatus::kConverged || !(c.point->dyn.psidot < 0.0)) continue;
    for (int i = 0; i < nd; ++i) {
      if (std::abs(sweep.grid.delta_at(i) + c.input.delta) > 1e-9) continue;
      const SweepCell& partner = sweep.cell(i, c.i_lambda);
      if (partner.status != CellStatus::kConverged || !(partner.point->dyn.psidot > 0.0)) break;
      const EquilibriumPoint m = mirror(*partner.point);
      worst = std::max({worst, normalized_deviation(c.point->dyn, m.dyn), std::abs(c.input.delta - m.input.delta)});
      ++count;
      break;
    }
  }
  if (pairs) *pairs = count;
  return worst;
}

}  // namespace driftplan::esm
