#pragma once

#include "pmelab/grid.hpp"

namespace pme::bb {

// Self-similar source-type solution
//   u(t,x) = t^{-alpha} (C - k |x t^{-beta}|^2)_+^{1/(m-1)}
// with alpha = d/(d(m-1)+2), beta = alpha/d, k = alpha(m-1)/(2 m d).
struct Params {
  double m = 2.0;
  int d = 1;
  double C = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double k = 0.0;
};

Params params(double m, int d, double C = 1.0);

// u(t,x)^mu; the profile is nonnegative, so the odd power u^[mu] equals u^mu.
double eval(const Params& p, double t, double x, double mu = 1.0);
double eval2(const Params& p, double t, double x, double y, double mu = 1.0);

// sqrt(C/k) t^beta
double support_radius(const Params& p, double t);

// Sharp spatial-regularity order for u^mu in L^{m/mu}_t W^{s,m/mu}_x: 2mu/m.
double threshold(double m, double mu);

struct SampleResult {
  Field field;
  bool support_contained = true;  // false when the support radius exceeds the grid
};

SampleResult sample(const Params& p, const Grid& g, double t, double mu = 1.0);

// Closed-form total mass of u(t, .) (t-independent); 1-d and 2-d.
double total_mass(const Params& p);

}  // namespace pme::bb
