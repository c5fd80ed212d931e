#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "driftplan/esm/equilibrium.hpp"

namespace driftplan::esm {

// Rectangular grid of constant inputs. Angles in radians.
struct SweepGrid {
  double delta_min = -30.0 * std::numbers::pi / 180.0;
  double delta_max = 30.0 * std::numbers::pi / 180.0;
  double delta_step = 1.0 * std::numbers::pi / 180.0;
  double lambda_min = 0.0;
  double lambda_max = 0.9;
  double lambda_step = 0.02;

  int delta_count() const;
  int lambda_count() const;
  double delta_at(int i) const;
  double lambda_at(int j) const;
};

enum class CellStatus {
  kConverged,
  kDegenerate,   // delta = lambda = 0
  kFailed,       // no root reached from any attempted guess
};

struct SweepCell {
  int i_delta = 0;
  int i_lambda = 0;
  ControlInput input;
  CellStatus status = CellStatus::kFailed;
  std::optional<EquilibriumPoint> point;
  int depth = -1;     // continuation distance from the seed that reached it
  int attempts = 0;
};

struct SweepResult {
  SweepGrid grid;
  std::vector<SweepCell> cells;  // row-major: index = i_lambda * delta_count + i_delta

  const SweepCell& cell(int i_delta, int i_lambda) const;
  std::vector<EquilibriumPoint> points() const;
  int converged_count() const;
  int degenerate_count() const;
  // Converged cells over all non-degenerate cells.
  double convergence_rate() const;
};

struct SweepOptions {
  SolverOptions solver;
  StabilityScreen screen;
  bool screen_stability = true;
};

// Solves every grid cell by numerical continuation: a converged cell seeds
// the Newton guess of its four grid neighbours (breadth-first), and a cell is
// retried from each newly converged neighbour. Cells no seed reaches start
// from a kinematic guess. Failures are recorded per cell, not thrown.
// Throws EmptySweepError if a range is empty or nothing converges.
SweepResult sweep_inputs(const SweepGrid& grid, const VehicleParams& p, const TireParams& tires,
                         const SweepOptions& opts = {});

// Pairs every clockwise root at (delta, lambda) with the counter-clockwise
// root at (-delta, lambda) and returns the largest difference between the
// clockwise point and the mirrored counter-clockwise one. Pairs missing a
// partner are skipped; `pairs` receives how many were compared.
double mirror_mismatch(const SweepResult& sweep, int* pairs = nullptr);

}  // namespace driftplan::esm
