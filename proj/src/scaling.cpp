#include "pmelab/scaling.hpp"

#include <cmath>

#include "pmelab/common.hpp"
#include "pmelab/norms.hpp"

namespace pme::scaling {

double gamma_scale(Kind kind, double eta, double m) {
  if (!(m > 1.0)) throw domain_error("nonlinearity must exceed 1");
  if (!(eta > 0.0)) throw domain_error("amplitude factor must be positive");
  return kind == Kind::Time ? std::pow(eta, m - 1.0) : std::pow(eta, 0.5 * (1.0 - m));
}

SpaceTimeField time_rescale(const SpaceTimeField& u, double m, double eta,
                            const RescaleOptions& opt) {
  const double gamma = gamma_scale(Kind::Time, eta, m);
  if (eta < 1.0) throw domain_error("time rescaling needs eta >= 1 to stay inside the trajectory");
  const double amp = opt.amplitude > 0.0 ? opt.amplitude : eta;
  const double t_lo = u.t0 / gamma;
  const double t_hi = (u.t0 + (u.nt - 1) * u.dt) / gamma;
  const int nt = int(std::floor((t_hi - t_lo) / u.dt)) + 1;
  if (nt < 2) throw domain_error("rescaled time range is empty");
  SpaceTimeField out(u.grid, t_lo, u.dt, nt);
  const std::size_t cells = u.grid.cells();
  for (int k = 0; k < nt; ++k) {
    const double ts = gamma * (t_lo + k * u.dt);  // source time
    double pos = (ts - u.t0) / u.dt;
    int k0 = std::clamp(int(std::floor(pos)), 0, u.nt - 2);
    double w = std::clamp(pos - k0, 0.0, 1.0);
    auto a = u.slice(k0);
    auto b = u.slice(k0 + 1);
    auto o = out.slice(k);
    for (std::size_t c = 0; c < cells; ++c) o[c] = amp * ((1.0 - w) * a[c] + w * b[c]);
  }
  return out;
}

SpaceTimeField time_rescale_source(const SpaceTimeField& S, double m, double eta) {
  RescaleOptions opt;
  opt.amplitude = std::pow(eta, m);
  return time_rescale(S, m, eta, opt);
}

namespace {

// periodic Catmull-Rom interpolation
double cubic_interp(std::span<const double> f, int n, double pos) {
  const int i1 = int(std::floor(pos));
  const double t = pos - i1;
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  const double p0 = f[wrap(i1 - 1)], p1 = f[wrap(i1)], p2 = f[wrap(i1 + 1)], p3 = f[wrap(i1 + 2)];
  return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                        t * (3.0 * (p1 - p2) + p3 - p0)));
}

double support_radius_of(const Field& f) {
  const Grid& g = f.grid;
  const double tiny = 1e-13 * (f.max_abs() + 1e-300);
  double r = 0.0;
  for (int i = 0; i < g.n[0]; ++i)
    if (std::abs(f.v[i]) > tiny) r = std::max(r, std::abs(g.node(0, i)));
  return r;
}

}  // namespace

Field space_rescale_slice(const Field& u, double m, double eta, const RescaleOptions& opt) {
  if (u.grid.dim != 1) throw domain_error("space rescaling implemented for 1-d grids");
  const double gamma = gamma_scale(Kind::Space, eta, m);
  const double amp = opt.amplitude > 0.0 ? opt.amplitude : eta;
  const Grid& g = u.grid;
  if (gamma < 1.0) {
    const double r = support_radius_of(u);
    if (r / gamma > 0.5 * g.extent[0] - 2.0 * g.spacing(0))
      throw domain_error("rescaled support overflows the torus");
  }
  Field out(g);
  const int n = g.n[0];
  const double h = g.spacing(0);
  for (int i = 0; i < n; ++i) {
    const double xs = gamma * g.node(0, i);
    // fractional node index of xs
    const double pos = (xs + 0.5 * g.extent[0]) / h - 0.5;
    out.v[i] = amp * cubic_interp(u.v, n, pos);
  }
  return out;
}

SpaceTimeField space_rescale(const SpaceTimeField& u, double m, double eta,
                             const RescaleOptions& opt) {
  SpaceTimeField out(u.grid, u.t0, u.dt, u.nt);
  for (int k = 0; k < u.nt; ++k) {
    Field slice = u.slice_field(k);
    Field r = space_rescale_slice(slice, m, eta, opt);
    std::copy(r.v.begin(), r.v.end(), out.slice(k).begin());
  }
  return out;
}

RatioReport verify_norm_scaling(const SpaceTimeField& u, double m, double mu, double p,
                                double sigma_t, double sigma_x, double eta, Kind kind,
                                double tol) {
  RatioReport rep;
  const double gamma = gamma_scale(kind, eta, m);
  const int d = u.grid.dim;

  // powered field u^[mu]
  SpaceTimeField pw = u;
  for (auto& x : pw.v) x = signed_power(x, mu);

  RescaleOptions opt;
  opt.amplitude = std::pow(eta, mu);
  SpaceTimeField resc =
      kind == Kind::Time ? time_rescale(pw, m, eta, opt) : space_rescale(pw, m, eta, opt);

  const auto base = norms::to_series(pw);
  const auto tilt = norms::to_series(resc);
  const double a = norms::mixed_pow(base, sigma_t, sigma_x, p, /*homogeneous=*/true);
  const double b = norms::mixed_pow(tilt, sigma_t, sigma_x, p, /*homogeneous=*/true);
  if (a < 1e-280 || b < 1e-280) {
    rep.inconclusive = true;
    return rep;
  }
  rep.measured = b / a;
  rep.predicted = kind == Kind::Time
                      ? std::pow(eta, mu * p) * std::pow(gamma, sigma_t * p - 1.0)
                      : std::pow(eta, mu * p) * std::pow(gamma, sigma_x * p - d);
  rep.ratio = rep.measured / rep.predicted;
  rep.pass = std::abs(rep.ratio - 1.0) <= tol;
  return rep;
}

}  // namespace pme::scaling
