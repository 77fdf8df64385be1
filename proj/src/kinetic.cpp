#include "pmelab/kinetic.hpp"

#include <algorithm>
#include <cmath>

#include "pmelab/common.hpp"

namespace pme::kinetic {

VGrid suggest_vgrid(const SpaceTimeField& u, int nv) {
  nv = std::max(nv, 64);
  double umax = 0.0;
  for (double x : u.v) umax = std::max(umax, std::abs(x));
  VGrid vg;
  vg.nv = nv;
  // solve vmax = 1.1 umax + dv with dv = 2 vmax / nv
  vg.vmax = 1.1 * umax / (1.0 - 2.0 / nv);
  if (!(vg.vmax > 0.0)) vg.vmax = 1.0;
  return vg;
}

KineticField kinetic_function(const SpaceTimeField& u, const VGrid& vg) {
  double umax = 0.0;
  for (double x : u.v) umax = std::max(umax, std::abs(x));
  if (vg.vmax < umax) throw domain_error("velocity grid does not cover the range of u");
  KineticField kf;
  kf.grid = u.grid;
  kf.vg = vg;
  kf.t0 = u.t0;
  kf.dt = u.dt;
  kf.nt = u.nt;
  const std::size_t cells = u.grid.cells();
  kf.f.assign(std::size_t(u.nt) * cells * vg.nv, 0);
  for (int k = 0; k < u.nt; ++k) {
    auto slice = u.slice(k);
    for (std::size_t c = 0; c < cells; ++c) {
      const double val = slice[c];
      auto* row = &kf.f[(std::size_t(k) * cells + c) * vg.nv];
      for (int b = 0; b < vg.nv; ++b) {
        const double v = vg.center(b);
        if (v >= 0.0 && v < val) row[b] = 1;
        else if (val <= v && v < 0.0) row[b] = -1;
      }
    }
  }
  return kf;
}

double KineticMeasure::total_signed() const {
  KahanSum s;
  for (double x : q) s.add(x);
  return s.value() * cell_weight();
}

double KineticMeasure::positive_mass() const {
  KahanSum s;
  for (double x : q)
    if (x > 0) s.add(x);
  return s.value() * cell_weight();
}

double KineticMeasure::negative_mass() const {
  KahanSum s;
  for (double x : q)
    if (x < 0) s.add(-x);
  return s.value() * cell_weight();
}

double KineticMeasure::clipped_fraction() const {
  const double pos = positive_mass();
  return pos > 0 ? negative_mass() / pos : 0.0;
}

std::vector<double> KineticMeasure::bin_totals() const {
  std::vector<double> tot(vg.nv, 0.0);
  const std::size_t cells = grid.cells();
  for (int n = 0; n < nt_steps; ++n)
    for (std::size_t c = 0; c < cells; ++c) {
      const double* row = &q[(std::size_t(n) * cells + c) * vg.nv];
      for (int b = 0; b < vg.nv; ++b) tot[b] += row[b];
    }
  const double w = grid.cell_measure() * dt;
  for (auto& x : tot) x *= w;
  return tot;
}

KineticMeasure defect_measure(const SpaceTimeField& u, double m, const SpaceTimeField* S,
                              const VGrid& vg) {
  if (u.nt < 3) throw domain_error("defect measure needs at least 3 time slices");
  if (S && (!(S->grid == u.grid))) throw domain_error("source grid mismatch");
  KineticMeasure qm;
  qm.grid = u.grid;
  qm.vg = vg;
  qm.t0 = u.t0;
  qm.dt = u.dt;
  qm.nt_steps = u.nt - 1;
  const std::size_t cells = u.grid.cells();
  qm.q.assign(std::size_t(qm.nt_steps) * cells * vg.nv, 0.0);

  std::vector<double> g(cells), lap(cells);
  for (int n = 0; n < qm.nt_steps; ++n) {
    auto u0 = u.slice(n);
    auto u1 = u.slice(n + 1);
    const double* src = nullptr;
    if (S) src = S->slice(std::min(n, S->nt - 1)).data();
    for (int b = 0; b < vg.nv; ++b) {
      const double v = vg.center(b);
      const double phiv = signed_power(v, m);
      if (v >= 0.0) {
        for (std::size_t c = 0; c < cells; ++c)
          g[c] = u1[c] > v ? signed_power(u1[c], m) - phiv : 0.0;
      } else {
        for (std::size_t c = 0; c < cells; ++c)
          g[c] = u1[c] < v ? phiv - signed_power(u1[c], m) : 0.0;
      }
      std::fill(lap.begin(), lap.end(), 0.0);
      add_laplacian(u.grid, g, lap, 1.0);
      for (std::size_t c = 0; c < cells; ++c) {
        double val;
        if (v >= 0.0) {
          const double dtpart = (std::max(u1[c] - v, 0.0) - std::max(u0[c] - v, 0.0)) / u.dt;
          val = -dtpart + lap[c];
          if (src && u1[c] > v) val += src[c];
        } else {
          const double dtpart = (std::max(v - u1[c], 0.0) - std::max(v - u0[c], 0.0)) / u.dt;
          val = dtpart - lap[c];
          if (src && u1[c] < v) val -= src[c];
        }
        qm.q[(std::size_t(n) * cells + c) * vg.nv + b] = val;
      }
    }
  }
  return qm;
}

double bin_avg_inv_power(const VGrid& vg, int bin, double gamma) {
  if (!(gamma < 1.0)) throw domain_error("moment exponent gamma must stay below 1");
  const double a = vg.edge(bin);
  const double b = vg.edge(bin + 1);
  auto prim = [gamma](double x) {  // integral of |v|^-gamma from 0 to x >= 0
    return std::pow(x, 1.0 - gamma) / (1.0 - gamma);
  };
  double integral;
  if (a >= 0.0)
    integral = prim(b) - prim(a);
  else if (b <= 0.0)
    integral = prim(-a) - prim(-b);
  else
    integral = prim(-a) + prim(b);
  return integral / (b - a);
}

double singular_moment(const KineticMeasure& qm, double gamma) {
  if (!(gamma < 1.0)) throw domain_error("moment exponent gamma must stay below 1");
  std::vector<double> w(qm.vg.nv);
  for (int b = 0; b < qm.vg.nv; ++b) w[b] = bin_avg_inv_power(qm.vg, b, gamma);
  const std::size_t cells = qm.grid.cells();
  KahanSum s;
  for (int n = 0; n < qm.nt_steps; ++n)
    for (std::size_t c = 0; c < cells; ++c) {
      const double* row = &qm.q[(std::size_t(n) * cells + c) * qm.vg.nv];
      for (int b = 0; b < qm.vg.nv; ++b)
        if (row[b] > 0) s.add(w[b] * row[b]);
    }
  return s.value() * qm.cell_weight();
}

double level_mass(const KineticMeasure& qm, double v0) {
  if (v0 < qm.vg.center(0) - 0.5 * qm.vg.dv() || v0 > qm.vg.center(qm.vg.nv - 1) + 0.5 * qm.vg.dv())
    throw domain_error("level v0 lies outside the velocity grid");
  const auto totals = qm.bin_totals();  // already integrated over (t,x)
  // linear interpolation between bin centers, clipped at the positive part
  const double pos0 = qm.vg.center(0);
  double x = (v0 - pos0) / qm.vg.dv();
  const int b0 = std::clamp(int(std::floor(x)), 0, qm.vg.nv - 1);
  const int b1 = std::min(b0 + 1, qm.vg.nv - 1);
  const double frac = std::clamp(x - b0, 0.0, 1.0);
  const double val = (1.0 - frac) * std::max(totals[b0], 0.0) + frac * std::max(totals[b1], 0.0);
  return val;
}

LevelMassVerdict check_level_mass(const KineticMeasure& qm, double v0, double rhs_l1,
                                  double extra_slack) {
  LevelMassVerdict v;
  v.value = level_mass(qm, v0);
  v.rhs = rhs_l1;
  v.slack = 1e-6 + extra_slack;
  v.holds = v.value <= v.rhs + v.slack;
  return v;
}

}  // namespace pme::kinetic
