#pragma once

#include <cstdint>
#include <vector>

#include "pmelab/grid.hpp"

namespace pme::kinetic {

// Uniform velocity bins over [-vmax, vmax]; values live at bin centers.
struct VGrid {
  double vmax = 1.0;
  int nv = 64;

  double dv() const { return 2.0 * vmax / nv; }
  double center(int k) const { return -vmax + (k + 0.5) * dv(); }
  double edge(int k) const { return -vmax + k * dv(); }
};

// Suggested grid: vmax = 1.1 max|u| + dv, at least 64 bins.
VGrid suggest_vgrid(const SpaceTimeField& u, int nv = 64);

// chi-function samples f(t,x,v) = 1_{0<=v<u} - 1_{u<=v<0} in {-1,0,1}.
struct KineticField {
  Grid grid;
  VGrid vg;
  double t0 = 0.0, dt = 0.0;
  int nt = 0;
  std::vector<std::int8_t> f;  // [nt][cells][nv]

  std::int8_t at(int k, std::size_t cell, int bin) const {
    return f[(std::size_t(k) * grid.cells() + cell) * vg.nv + bin];
  }
};

KineticField kinetic_function(const SpaceTimeField& u, const VGrid& vg);

// Defect-measure samples on step midpoints n = 0..nt-2, recovered from the
// discrete equation by integrating the kinetic identity in v:
//   v >= 0: q = -D_t (u-v)_+ + Lap[(u^[m]-v^[m]) 1_{u>v}] + S 1_{u>v}
//   v <  0: q =  D_t (v-u)_+ - Lap[(v^[m]-u^[m]) 1_{u<v}] - S 1_{u<v}
// For the exact discrete solution this vanishes identically below min u and
// above max u; for smooth solutions its v-integral converges to
// m u^{m-1} |grad u|^2.
struct KineticMeasure {
  Grid grid;
  VGrid vg;
  double t0 = 0.0, dt = 0.0;
  int nt_steps = 0;
  std::vector<double> q;  // [nt_steps][cells][nv]

  double at(int n, std::size_t cell, int bin) const {
    return q[(std::size_t(n) * grid.cells() + cell) * vg.nv + bin];
  }
  double cell_weight() const { return grid.cell_measure() * dt * vg.dv(); }

  double total_signed() const;
  double positive_mass() const;
  double negative_mass() const;          // mass of the clipped negative part
  double clipped_fraction() const;       // negative mass / positive mass
  std::vector<double> bin_totals() const;  // integral over (t,x) per bin, in v-density units
};

KineticMeasure defect_measure(const SpaceTimeField& u, double m, const SpaceTimeField* S,
                              const VGrid& vg);

// Bin-averaged weight of |v|^{-gamma} (exact integral per bin; gamma < 1 keeps
// the bin containing 0 integrable).
double bin_avg_inv_power(const VGrid& vg, int bin, double gamma);

// sum w_k(gamma) q_+ dt dx dv; multiply by (1-gamma) for the moment bound.
double singular_moment(const KineticMeasure& qm, double gamma);

// Integral over (t,x) of q at the level v0, linearly interpolated between bin
// centers; clipped at 0.
double level_mass(const KineticMeasure& qm, double v0);

struct LevelMassVerdict {
  double value = 0.0;
  double rhs = 0.0;  // ||u0||_L1 + ||S||_L1
  double slack = 0.0;
  bool holds = false;
};

LevelMassVerdict check_level_mass(const KineticMeasure& qm, double v0, double rhs_l1,
                                  double extra_slack = 0.0);

}  // namespace pme::kinetic
