#pragma once

#include <cmath>
#include <random>

#include "pmelab/grid.hpp"

namespace testhelpers {

// band-limited random field from a handful of trig modes
inline pme::Field random_trig_field(const pme::Grid& g, std::mt19937_64& rng, int kmax = 5,
                                    double amp = 1.0, bool nonneg = false) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  pme::Field f(g);
  const double L = g.extent[0];
  for (int k = 1; k <= kmax; ++k) {
    const double a = coeff(rng) * amp / k;
    const double b = coeff(rng) * amp / k;
    for (int i = 0; i < g.n[0]; ++i) {
      const double x = g.node(0, i);
      f.v[i] += a * std::cos(2.0 * M_PI * k * x / L) + b * std::sin(2.0 * M_PI * k * x / L);
    }
  }
  if (nonneg) {
    double lo = f.min();
    for (auto& x : f.v) x += amp * 0.1 - lo;
  }
  return f;
}

inline pme::SpaceTimeField constant_in_time(const pme::Field& f, double t0, double dt, int nt) {
  pme::SpaceTimeField u(f.grid, t0, dt, nt);
  for (int k = 0; k < nt; ++k) std::copy(f.v.begin(), f.v.end(), u.slice(k).begin());
  return u;
}

}  // namespace testhelpers
