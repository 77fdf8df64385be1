#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pmelab/grid.hpp"

namespace pme::solver {

struct SolverOptions {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double eps = 1e-12;  // regularization of the degenerate Jacobian at u = 0
  // After meeting newton_tol, keep iterating while the residual still drops;
  // this drives the per-step mass defect to rounding level.
  bool polish = true;
};

struct StepStats {
  int newton_iters = 0;
  double residual = 0.0;
  double mass_defect = 0.0;  // |sum u_next - sum u - dt sum S| * cell measure
};

// One backward-Euler step of  u_t - Lap(u^[m]) = S:
//   u_next - dt Lap(u_next^[m]) = u + dt S.
Field step(const Field& u, double dt, const Field& S, double m, const SolverOptions& opts,
           StepStats* stats = nullptr);

using SourceFn = std::function<void(double t, const Grid& g, std::span<double> out)>;

struct SolveReport {
  std::vector<int> newton_iters;
  double max_residual = 0.0;
  double max_mass_defect_rel = 0.0;  // relative to |mass(u0)| + dt sum|S| + 1e-300
  bool support_warning = false;      // data may reach the torus boundary within [0,T]
};

// Time loop from u0 over [t_start, t_start + T]; S may be empty (zero source).
SpaceTimeField solve(const Field& u0, const SourceFn& S, double T, double m,
                     const SolverOptions& opts, SolveReport* report = nullptr,
                     double t_start = 0.0);

SpaceTimeField solve(const Field& u0, const SpaceTimeField& S, double T, double m,
                     const SolverOptions& opts, SolveReport* report = nullptr,
                     double t_start = 0.0);

// Discrete weak-form residual: scheme residual of the trajectory paired with
// a fixed basis of smooth, compactly supported space-time bumps. Zero (to
// rounding) on solver output; O(dt + h) on samples of an exact solution.
double residual(const SpaceTimeField& u, double m, const SpaceTimeField* S = nullptr);

struct ContractionReport {
  double lhs = 0.0;  // sup_t ||u1 - u2||_L1
  double rhs = 0.0;  // ||u0_1 - u0_2||_L1 + ||S1 - S2||_L1(t,x)
  double slack = 0.0;
  bool holds = false;
};

// Discrete L^1 contraction check between two runs on the same grid/steps.
ContractionReport check_contraction(const SpaceTimeField& u1, const SpaceTimeField& u2,
                                    const SpaceTimeField* S1 = nullptr,
                                    const SpaceTimeField* S2 = nullptr);

}  // namespace pme::solver
