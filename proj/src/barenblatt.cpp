#include "pmelab/barenblatt.hpp"

#include <cmath>

namespace pme::bb {

Params params(double m, int d, double C) {
  if (!(m > 1.0)) throw domain_error("nonlinearity must exceed 1");
  if (d != 1 && d != 2) throw domain_error("dimension must be 1 or 2");
  if (!(C > 0.0)) throw domain_error("profile constant C must be positive");
  Params p;
  p.m = m;
  p.d = d;
  p.C = C;
  p.alpha = d / (d * (m - 1.0) + 2.0);
  p.beta = p.alpha / d;
  p.k = p.alpha * (m - 1.0) / (2.0 * m * d);
  return p;
}

namespace {
double eval_radial(const Params& p, double t, double r2, double mu) {
  if (!(t > 0.0)) throw domain_error("time must be positive");
  const double tb = std::pow(t, -p.beta);
  const double w = p.C - p.k * r2 * tb * tb;
  if (w <= 0.0) return 0.0;
  return std::pow(t, -p.alpha * mu) * std::pow(w, mu / (p.m - 1.0));
}
}  // namespace

double eval(const Params& p, double t, double x, double mu) {
  return eval_radial(p, t, x * x, mu);
}

double eval2(const Params& p, double t, double x, double y, double mu) {
  return eval_radial(p, t, x * x + y * y, mu);
}

double support_radius(const Params& p, double t) {
  if (!(t > 0.0)) throw domain_error("time must be positive");
  return std::sqrt(p.C / p.k) * std::pow(t, p.beta);
}

double threshold(double m, double mu) {
  if (!(m > 1.0)) throw domain_error("nonlinearity must exceed 1");
  if (mu < 1.0 - 1e-12 || mu > m + 1e-12) throw domain_error("mu must lie in [1, m]");
  return 2.0 * mu / m;
}

SampleResult sample(const Params& p, const Grid& g, double t, double mu) {
  if (g.dim != p.d) throw domain_error("grid dimension does not match profile dimension");
  SampleResult r;
  r.field = Field(g);
  const double radius = support_radius(p, t);
  for (int a = 0; a < g.dim; ++a)
    if (radius > 0.5 * g.extent[a]) r.support_contained = false;
  if (g.dim == 1) {
    for (int i = 0; i < g.n[0]; ++i) r.field.v[i] = eval(p, t, g.node(0, i), mu);
  } else {
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i)
        r.field.at(i, j) = eval2(p, t, g.node(0, i), g.node(1, j), mu);
  }
  return r;
}

double total_mass(const Params& p) {
  const double q = 1.0 / (p.m - 1.0);
  const double Y = std::sqrt(p.C / p.k);
  if (p.d == 1) {
    // int (C - k y^2)_+^q dy = C^q Y sqrt(pi) Gamma(q+1)/Gamma(q+3/2)
    return std::pow(p.C, q) * Y * std::sqrt(M_PI) * std::tgamma(q + 1.0) / std::tgamma(q + 1.5);
  }
  // 2-d: (pi/k) C^{q+1}/(q+1)
  return M_PI / p.k * std::pow(p.C, q + 1.0) / (q + 1.0);
}

}  // namespace pme::bb
