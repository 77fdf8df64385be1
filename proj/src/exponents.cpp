#include "pmelab/exponents.hpp"

#include <cmath>

#include "pmelab/common.hpp"

namespace pme::exponents {

namespace {

ExponentSet invalid(Source src, std::string reason) {
  ExponentSet e;
  e.source = src;
  e.valid = false;
  e.reason = std::move(reason);
  return e;
}

void require_m(double m) {
  if (!(m > 1.0)) throw domain_error("nonlinearity must exceed 1");
}

}  // namespace

std::string to_string(Source s) {
  switch (s) {
    case Source::L1Global: return "l1_global";
    case Source::L1Local: return "l1_local";
    case Source::RhoPower: return "rho_power";
    case Source::RhoMixed: return "rho_mixed";
    case Source::Averaging: return "averaging";
    case Source::AveragingTime: return "averaging_time";
    case Source::PrescribedP: return "prescribed_p";
  }
  return "unknown";
}

ExponentSet l1_exponents(double m, double p) {
  require_m(m);
  if (!(p > 1.0 + kBoundaryTol) || p > m + kBoundaryTol)
    return invalid(Source::L1Global, "p must lie in (1, m]");
  ExponentSet e;
  e.source = Source::L1Global;
  e.valid = true;
  e.p = p;
  e.kappa_t = (m - p) / p / (m - 1.0);
  e.kappa_x = (p - 1.0) / p * 2.0 / (m - 1.0);
  if (p == m) e.kappa_t = 0.0;
  return e;
}

ExponentSet l1_local_exponents(double m, double s) {
  require_m(m);
  if (s < -kBoundaryTol || s > 1.0 + kBoundaryTol)
    throw domain_error("interpolation parameter s must lie in [0, 1]");
  ExponentSet e;
  e.source = Source::L1Local;
  e.valid = true;
  e.p = s * (m - 1.0) + 1.0;
  e.kappa_t = (1.0 - s) / e.p;
  e.kappa_x = 2.0 * s / e.p;
  return e;
}

ExponentSet rho_exponents(double m, double rho, double p, RhoKind kind, double mu) {
  require_m(m);
  if (!(rho > 1.0)) throw domain_error("data integrability rho must exceed 1");
  if (kind == RhoKind::Power) {
    if (mu < 1.0 - kBoundaryTol || mu > m + kBoundaryTol)
      return invalid(Source::RhoPower, "mu must lie in [1, m]");
    const double p_sup = (m - 1.0 + rho) / mu;
    if (!(p > 1.0 + kBoundaryTol) || !(p < p_sup - kBoundaryTol))
      return invalid(Source::RhoPower, "p must lie in (1, (m-1+rho)/mu)");
    ExponentSet e;
    e.source = Source::RhoPower;
    e.valid = true;
    e.p = p;
    e.kappa_t = 0.0;  // no time regularity asserted in this mode
    e.kappa_x = (mu * p - 1.0) / p * 2.0 / (m - 2.0 + rho);
    return e;
  }
  if (!(p > rho + kBoundaryTol))
    return invalid(Source::RhoMixed, "p must exceed rho");
  if (!(p < m - 1.0 + rho - kBoundaryTol))
    return invalid(Source::RhoMixed, "p must stay below m-1+rho");
  ExponentSet e;
  e.source = Source::RhoMixed;
  e.valid = true;
  e.p = p;
  e.kappa_t = (m - 1.0 + rho - p) / p / (m - 1.0);
  e.kappa_x = (p - rho) / p * 2.0 / (m - 1.0);
  return e;
}

PowerLocal power_local_exponents(double m, double mu) {
  require_m(m);
  if (mu < 1.0 - kBoundaryTol || mu > m + kBoundaryTol)
    throw domain_error("mu must lie in [1, m]");
  return {2.0 * mu / m, m / mu};
}

ExponentSet averaging_exponents(double m, double gamma, double mu, double rho, double s,
                                bool time_only) {
  require_m(m);
  if (!(gamma < m)) throw domain_error("moment exponent gamma must stay below m");
  if (time_only) {
    if (!(gamma < 1.0)) return invalid(Source::AveragingTime, "time-only mode needs gamma < 1");
    if (mu < 1.0 - kBoundaryTol || mu > 2.0 - gamma + kBoundaryTol)
      return invalid(Source::AveragingTime, "time-only mode needs mu in [1, 2-gamma)");
    if (!(rho > 0.0) || rho > 1.0 + kBoundaryTol)
      return invalid(Source::AveragingTime, "time-only mode needs rho in (0, 1]");
    ExponentSet e;
    e.source = Source::AveragingTime;
    e.valid = true;
    e.p = (1.0 - gamma + rho) / (rho * mu + (1.0 - rho) * (1.0 - gamma));
    e.kappa_t = (mu - 1.0 + rho) / (1.0 - gamma + rho);
    e.kappa_x = 0.0;  // not asserted in this mode
    return e;
  }
  if (mu < 1.0 - kBoundaryTol || mu > m + 1.0 - gamma + kBoundaryTol)
    return invalid(Source::Averaging, "mu must lie in [1, m+1-gamma)");
  if (!(rho > 0.0) || !(rho < 1.0))
    return invalid(Source::Averaging, "rho must lie in (0, 1)");
  const double s_lo = (mu - 2.0 + gamma) / (m - 1.0);
  if (s < s_lo - kBoundaryTol || s < -kBoundaryTol || s > 1.0 + kBoundaryTol)
    return invalid(Source::Averaging, "s must lie in ((mu-2+gamma)/(m-1), 1] ∩ [0,1]");
  const double a = s * (m - 1.0) + 1.0 - gamma;  // s(m-1)+1-gamma
  ExponentSet e;
  e.source = Source::Averaging;
  e.valid = true;
  e.p = (a + rho) / (rho * mu + (1.0 - rho) * a);
  e.kappa_t = (1.0 - s) * (mu - 1.0 + rho) / (a + rho);
  e.kappa_x = 2.0 * s * (mu - 1.0 + rho) / (a + rho);
  return e;
}

PrescribedP prescribed_p_exponents(double m, double gamma, double mu, double rho, double p_tilde) {
  require_m(m);
  if (!(gamma < m)) throw domain_error("moment exponent gamma must stay below m");
  PrescribedP r;
  const double rho_lo = (m + 1.0 - gamma - mu) / (m + 1.0 - gamma);
  if (!(rho > rho_lo - kBoundaryTol) || !(rho < 1.0))
    throw domain_error("rho must lie in ((m+1-gamma-mu)/(m+1-gamma), 1)");
  const double denom = (m - 1.0) * (1.0 - p_tilde * (1.0 - rho));
  if (!(denom > 0.0))
    throw domain_error("prescribed p is too large: (m-1)(1 - p(1-rho)) must be positive");
  const double p_lo = (1.0 - gamma + rho) / (rho * mu + (1.0 - rho) * (1.0 - gamma));
  const double p_hi = (m + 1.0 - gamma) / mu;
  if (p_tilde < std::max(p_lo, 1.0) - kBoundaryTol || p_tilde > p_hi + kBoundaryTol)
    throw domain_error("prescribed p outside the admissible interval");
  // inverse of the averaging constants in p (the s-coefficient carries -rho)
  r.s = (mu * p_tilde * rho + p_tilde * (1.0 - rho) * (1.0 - gamma) - 1.0 + gamma - rho) / denom;
  r.kappa_t = (m + rho - gamma - mu * p_tilde * rho + p_tilde * (1.0 - rho) * (gamma - m)) /
              (p_tilde * rho) / (m - 1.0);
  r.kappa_x = (mu * p_tilde * rho + p_tilde * (1.0 - rho) * (1.0 - gamma) - 1.0 + gamma - rho) /
              (p_tilde * rho) * 2.0 / (m - 1.0);
  r.valid = true;
  return r;
}

ScalingVerdict scaling_admissible(double m, double mu, double p, double sigma_t, double sigma_x) {
  require_m(m);
  if (mu < 1.0 - kBoundaryTol || mu > m + kBoundaryTol)
    throw domain_error("mu must lie in [1, m]");
  if (!(p >= 1.0 - kBoundaryTol)) throw domain_error("p must be at least 1");
  ScalingVerdict v;
  if (p > m / (mu + (m - 1.0) * sigma_t) + kBoundaryTol) {
    v.violated = "p exceeds m/(mu+(m-1)sigma_t)";
    return v;
  }
  if (sigma_t > (m - mu * p) / (p * (m - 1.0)) + kBoundaryTol) {
    v.violated = "sigma_t exceeds (m-mu p)/(p(m-1))";
    return v;
  }
  const double sx = (mu * p - 1.0) / p * 2.0 / (m - 1.0);
  if (std::abs(sigma_x - sx) > kBoundaryTol) {
    v.violated = "sigma_x must equal (mu p-1)/p * 2/(m-1)";
    return v;
  }
  v.admissible = true;
  return v;
}

}  // namespace pme::exponents
