#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pmelab/grid.hpp"

namespace pme::sweep {

// One resolution level: slices are produced on demand by the evaluator at the
// given times; weights are the time-quadrature weights for the L^p-in-time
// integral.
struct Level {
  Grid grid;
  std::vector<double> times;
  std::vector<double> weights;
  std::function<void(double t, std::span<double> out)> eval;
};

struct Family {
  std::string name;
  std::vector<Level> levels;  // coarse to fine
};

// Self-similar profile family probing the t -> 0 window: geometric time grid
// from T down to t_floor. Slices whose support falls below the cell size
// sample to zero, which cuts the window off at an h^3-scaled effective time.
Family barenblatt_family(double m, double mu, double C, double L, double T,
                         std::vector<int> resolutions, int slices_per_octave = 4,
                         double t_floor = 1e-12);

// Time-constant smooth bump; every swept norm is finite.
Family smooth_bump_family(double L, double T, std::vector<int> resolutions, int nt = 9);

// Geometric-time family for mixed-norm trend runs; the temporal Gagliardo
// sees every dyadic band of the t -> 0 window at the same relative
// resolution, so level-to-level changes track the window alone.
Family barenblatt_mixed_family(double m, double mu, double C, double L, double T,
                               std::vector<int> resolutions, int slices_per_octave = 4,
                               double t_floor = 1e-9);

enum class Mode { SpatialLp, Mixed };

struct SweepOptions {
  Mode mode = Mode::SpatialLp;
  double p = 2.0;
  double sigma_t = 0.0;  // Mixed mode only
  double slope_threshold = 0.05;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  // Completes the pair sum below the grid scale from difference quotients;
  // removes the leading resolution transient of the quadrature itself.
  bool subgrid_completion = true;
  // Adds the far-field tail so slice seminorms estimate the whole-line value
  // (the slices are compactly supported inside the torus window).
  bool whole_line_tail = true;
};

struct SweepRow {
  double sigma = 0.0;
  double h = 0.0;
  double dt = 0.0;
  double norm = 0.0;
  double slope = 0.0;      // fitted d log(norm) / d log(1/h), repeated per level row
  double slope_err = 0.0;  // standard error of the fit
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (sigma, resolution)
  bool detected = false;
  double threshold = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double predicted = std::numeric_limits<double>::quiet_NaN();
};

SweepResult norm_sweep(const Family& family, std::vector<double> sigmas, const SweepOptions& opt);

}  // namespace pme::sweep
