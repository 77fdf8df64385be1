#pragma once

#include <string>

#include "pmelab/common.hpp"

namespace pme::exponents {

// Validity boundaries are checked with this tolerance so that closed
// interval endpoints (p = m, s = 1, ...) pass in double precision.
inline constexpr double kBoundaryTol = 1e-12;

enum class Source {
  L1Global,       // whole-space estimate from L^1 data
  L1Local,        // localized estimate parametrized by s in [0,1]
  RhoPower,       // L^rho data, spatial regularity of the power u^[mu]
  RhoMixed,       // L^rho data, mixed time-space regularity
  Averaging,      // velocity-averaging constants, space-time mode
  AveragingTime,  // velocity-averaging constants, time-only mode
  PrescribedP,    // inverse map: prescribe the integrability exponent
};

std::string to_string(Source s);

struct ExponentSet {
  double p = 0.0;
  double kappa_t = 0.0;
  double kappa_x = 0.0;
  Source source = Source::L1Global;
  bool valid = false;
  std::string reason;  // empty when valid

  // kappa_x carries the supremum spatial exponent; for sources without a
  // time assertion kappa_t is 0 by convention.
};

// kappa_t = (m-p)/p * 1/(m-1), kappa_x = (p-1)/p * 2/(m-1), for p in (1,m].
ExponentSet l1_exponents(double m, double p);

// p = s(m-1)+1, kappa_t = (1-s)/p, kappa_x = 2s/p, for s in [0,1].
ExponentSet l1_local_exponents(double m, double s);

enum class RhoKind { Power, Mixed };

// L^rho-data exponents. Power mode needs mu in [1,m] and p in
// (1,(m-1+rho)/mu) and yields the supremum sigma_x = (mu p-1)/p * 2/(m-2+rho)
// with kappa_t = 0. Mixed mode needs p in (rho, m-1+rho) and yields
// kappa_t = (m-1+rho-p)/p * 1/(m-1), kappa_x = (p-rho)/p * 2/(m-1).
ExponentSet rho_exponents(double m, double rho, double p, RhoKind kind, double mu = 1.0);

struct PowerLocal {
  double sigma_x_sup = 0.0;  // 2 mu / m
  double q_max = 0.0;        // m / mu
};

// Localized power exponents: sigma_x in [0, 2mu/m), q in [1, m/mu].
PowerLocal power_local_exponents(double m, double mu);

// Velocity-averaging exponent constants.
// Space-time mode (time_only = false), s in ((mu-2+gamma)/(m-1), 1] ∩ [0,1]:
//   p       = (s(m-1)+1-gamma+rho) / (rho mu + (1-rho)(s(m-1)+1-gamma))
//   kappa_t = (1-s)(mu-1+rho) / (s(m-1)+1-gamma+rho)
//   kappa_x = 2s (mu-1+rho) / (s(m-1)+1-gamma+rho)
// Time-only mode (gamma < 1, mu in [1, 2-gamma), rho in (0,1]):
//   p       = (1-gamma+rho) / (rho mu + (1-rho)(1-gamma))
//   kappa_t = (mu-1+rho) / (1-gamma+rho),   kappa_x unset (0).
ExponentSet averaging_exponents(double m, double gamma, double mu, double rho, double s,
                                bool time_only = false);

struct PrescribedP {
  double s = 0.0;
  double kappa_t = 0.0;
  double kappa_x = 0.0;
  bool valid = false;
  std::string reason;
};

// Inverse of averaging_exponents in p: returns the s with
// averaging_exponents(m,gamma,mu,rho,s).p == p_tilde, together with the
// kappa values expressed directly in terms of p_tilde.
PrescribedP prescribed_p_exponents(double m, double gamma, double mu, double rho, double p_tilde);

struct ScalingVerdict {
  bool admissible = false;
  std::string violated;  // which constraint failed, empty when admissible
};

// Dimensional-analysis constraints that any estimate
// ||u^[mu]||^p_{W^{sigma_t,p}(W^{sigma_x,p})} <= c (||u0||_1 + ||S||_1)
// must satisfy:
//   p <= m / (mu + (m-1) sigma_t)
//   sigma_t <= (m - mu p) / (p (m-1))
//   sigma_x == (mu p - 1)/p * 2/(m-1)   (within 1e-12)
ScalingVerdict scaling_admissible(double m, double mu, double p, double sigma_t, double sigma_x);

}  // namespace pme::exponents
