#include "pmelab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>

#include "pmelab/barenblatt.hpp"
#include "pmelab/common.hpp"

namespace pme::solver {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// rows of the periodic Laplacian stencil scaled by -dt, times diag(phi'(w))
void assemble_jacobian(const Grid& g, std::span<const double> dphi, double dt, SpMat& J) {
  const int nx = g.n[0];
  std::vector<Triplet> trip;
  if (g.dim == 1) {
    const double w = dt / (g.spacing(0) * g.spacing(0));
    trip.reserve(std::size_t(nx) * 3);
    for (int i = 0; i < nx; ++i) {
      const int l = (i + nx - 1) % nx;
      const int r = (i + 1) % nx;
      trip.emplace_back(i, i, 1.0 + 2.0 * w * dphi[i]);
      trip.emplace_back(i, l, -w * dphi[l]);
      trip.emplace_back(i, r, -w * dphi[r]);
    }
    J.resize(nx, nx);
  } else {
    const int ny = g.n[1];
    const double wx = dt / (g.spacing(0) * g.spacing(0));
    const double wy = dt / (g.spacing(1) * g.spacing(1));
    const int N = nx * ny;
    trip.reserve(std::size_t(N) * 5);
    auto idx = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int c = idx(i, j);
        const int l = idx((i + nx - 1) % nx, j), r = idx((i + 1) % nx, j);
        const int d = idx(i, (j + ny - 1) % ny), u = idx(i, (j + 1) % ny);
        trip.emplace_back(c, c, 1.0 + 2.0 * (wx + wy) * dphi[c]);
        trip.emplace_back(c, l, -wx * dphi[l]);
        trip.emplace_back(c, r, -wx * dphi[r]);
        trip.emplace_back(c, d, -wy * dphi[d]);
        trip.emplace_back(c, u, -wy * dphi[u]);
      }
    J.resize(N, N);
  }
  J.setFromTriplets(trip.begin(), trip.end());
}

// G(w) = w - dt Lap(w^[m]) - b
void nonlinear_residual(const Grid& g, std::span<const double> w, std::span<const double> b,
                        double dt, double m, std::vector<double>& phi, std::vector<double>& G) {
  const std::size_t N = g.cells();
  for (std::size_t i = 0; i < N; ++i) phi[i] = signed_power(w[i], m);
  for (std::size_t i = 0; i < N; ++i) G[i] = w[i] - b[i];
  add_laplacian(g, phi, G, -dt);
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Field step(const Field& u, double dt, const Field& S, double m, const SolverOptions& opts,
           StepStats* stats) {
  if (!(m > 1.0)) throw domain_error("nonlinearity must exceed 1");
  if (!(dt > 0.0)) throw domain_error("time step must be positive");
  if (!(u.grid == S.grid)) throw domain_error("state and source live on different grids");
  const Grid& g = u.grid;
  const std::size_t N = g.cells();

  std::vector<double> b(N);
  for (std::size_t i = 0; i < N; ++i) b[i] = u.v[i] + dt * S.v[i];

  Field w = u;
  std::vector<double> phi(N), G(N), dphi(N), w_trial(N), G_trial(N);
  nonlinear_residual(g, w.v, b, dt, m, phi, G);
  double res = inf_norm(G);
  const double tol = opts.newton_tol * (1.0 + inf_norm(b));

  SpMat J;
  Eigen::SparseLU<SpMat> lu;
  bool analyzed = false;
  int iters = 0;
  bool converged = res <= tol;

  while (iters < opts.newton_max_iter) {
    if (converged && !opts.polish) break;
    if (converged && res <= 1e-15 * (1.0 + inf_norm(b))) break;
    ++iters;
    for (std::size_t i = 0; i < N; ++i)
      dphi[i] = m * std::pow(std::abs(w.v[i]) + opts.eps, m - 1.0);
    assemble_jacobian(g, dphi, dt, J);
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw numerical_error("Jacobian factorization failed", res);
    Eigen::Map<const Eigen::VectorXd> Gv(G.data(), Eigen::Index(N));
    Eigen::VectorXd delta = lu.solve(-Gv);

    // damped update: halve the step while the residual does not decrease
    double lambda = 1.0;
    double res_new = res;
    for (int back = 0; back < 30; ++back) {
      for (std::size_t i = 0; i < N; ++i) w_trial[i] = w.v[i] + lambda * delta[Eigen::Index(i)];
      nonlinear_residual(g, w_trial, b, dt, m, phi, G_trial);
      res_new = inf_norm(G_trial);
      if (res_new < res || res <= tol) break;
      lambda *= 0.5;
    }
    if (res_new >= res) {
      if (converged) break;  // polishing hit the rounding floor
      throw numerical_error("Newton line search stalled", res);
    }
    w.v.swap(w_trial);
    G.swap(G_trial);
    res = res_new;
    if (res <= tol) {
      if (!converged) converged = true;
      if (!opts.polish) break;
      if (lambda < 1.0) break;
    }
  }
  if (!converged)
    throw numerical_error("Newton iteration failed to converge within max_iter", res);

  if (stats) {
    stats->newton_iters = iters;
    stats->residual = res;
    KahanSum mu_next, mu_prev, ms;
    for (std::size_t i = 0; i < N; ++i) {
      mu_next.add(w.v[i]);
      mu_prev.add(u.v[i]);
      ms.add(S.v[i]);
    }
    stats->mass_defect =
        std::abs(mu_next.value() - mu_prev.value() - dt * ms.value()) * g.cell_measure();
  }
  return w;
}

namespace {

// Heuristic torus-size check: initial support plus the self-similar spreading
// law for a profile of the same mass must stay inside the box.
bool support_ok(const Field& u0, double m, double T) {
  const Grid& g = u0.grid;
  if (g.dim != 1) return true;
  const double tiny = 1e-14 * (u0.max_abs() + 1e-300);
  int lo = -1, hi = -1;
  for (int i = 0; i < g.n[0]; ++i)
    if (std::abs(u0.v[i]) > tiny) {
      if (lo < 0) lo = i;
      hi = i;
    }
  if (lo < 0) return true;
  const double r0 = std::max(std::abs(g.node(0, lo)), std::abs(g.node(0, hi)));
  const double mass = std::abs(u0.mass());
  if (mass == 0.0) return true;
  auto prof = bb::params(m, 1, 1.0);
  const double mass1 = bb::total_mass(prof);
  // mass scales like C^{(m+1)/(2(m-1))}
  const double C = std::pow(mass / mass1, 2.0 * (m - 1.0) / (m + 1.0));
  prof.C = C;
  const double spread = bb::support_radius(prof, std::max(T, 1e-12));
  return r0 + spread <= 0.475 * g.extent[0];
}

}  // namespace

SpaceTimeField solve(const Field& u0, const SourceFn& S, double T, double m,
                     const SolverOptions& opts, SolveReport* report, double t_start) {
  if (!(T > 0.0)) throw domain_error("final time must be positive");
  u0.require_finite("initial state");
  const int nsteps = int(std::llround(T / opts.dt));
  if (nsteps < 1 || std::abs(nsteps * opts.dt - T) > 1e-9 * T)
    throw domain_error("T must be an integer multiple of dt");
  SpaceTimeField traj(u0.grid, t_start, opts.dt, nsteps + 1);
  std::copy(u0.v.begin(), u0.v.end(), traj.slice(0).begin());
  if (report) {
    report->newton_iters.clear();
    report->support_warning = !support_ok(u0, m, T);
  }

  Field u = u0;
  Field src(u0.grid);
  double mass_scale = u0.lp_norm(1.0) + 1e-300;
  for (int k = 0; k < nsteps; ++k) {
    const double t = t_start + k * opts.dt;
    if (S)
      S(t, u0.grid, src.v);
    else
      std::fill(src.v.begin(), src.v.end(), 0.0);
    StepStats st;
    u = step(u, opts.dt, src, m, opts, &st);
    mass_scale += opts.dt * src.lp_norm(1.0);
    if (report) {
      report->newton_iters.push_back(st.newton_iters);
      report->max_residual = std::max(report->max_residual, st.residual);
      report->max_mass_defect_rel =
          std::max(report->max_mass_defect_rel, st.mass_defect / mass_scale);
    }
    std::copy(u.v.begin(), u.v.end(), traj.slice(k + 1).begin());
  }
  traj.require_finite("solver trajectory");
  return traj;
}

SpaceTimeField solve(const Field& u0, const SpaceTimeField& S, double T, double m,
                     const SolverOptions& opts, SolveReport* report, double t_start) {
  if (S.nt == 0) return solve(u0, SourceFn{}, T, m, opts, report, t_start);
  if (!(S.grid == u0.grid)) throw domain_error("source grid mismatch");
  SourceFn fn = [&S](double t, const Grid&, std::span<double> out) {
    int k = int(std::llround((t - S.t0) / S.dt));
    k = std::clamp(k, 0, S.nt - 1);
    auto s = S.slice(k);
    std::copy(s.begin(), s.end(), out.begin());
  };
  return solve(u0, fn, T, m, opts, report, t_start);
}

namespace {

double bump(double z) {
  const double z2 = z * z;
  if (z2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - z2));
}

}  // namespace

double residual(const SpaceTimeField& u, double m, const SpaceTimeField* S) {
  if (u.nt < 3) throw domain_error("residual needs at least 3 time slices");
  const Grid& g = u.grid;
  if (g.dim != 1) throw domain_error("weak residual implemented for 1-d trajectories");
  const std::size_t N = g.cells();
  const double T = (u.nt - 1) * u.dt;
  const double L = g.extent[0];

  // fixed test basis: products of compactly supported bumps
  struct TestFn {
    double tc, ts, xc, xs;
  };
  std::vector<TestFn> basis;
  for (double tc : {0.35, 0.5, 0.65})
    for (double xc : {-0.25, 0.0, 0.25})
      basis.push_back({u.t0 + tc * T, 0.3 * T, xc * L, 0.2 * L});
  basis.push_back({u.t0 + 0.5 * T, 0.45 * T, 0.0, 0.4 * L});

  std::vector<double> phi_m(N), lap(N);
  double worst = 0.0;
  for (const auto& tf : basis) {
    KahanSum acc;
    double phinorm = 0.0;
    for (int k = 0; k + 1 < u.nt; ++k) {
      const double tmid = u.time(k) + 0.5 * u.dt;
      const double wt = bump((tmid - tf.tc) / tf.ts);
      if (wt == 0.0) continue;
      auto uk = u.slice(k);
      auto uk1 = u.slice(k + 1);
      for (std::size_t i = 0; i < N; ++i) phi_m[i] = signed_power(uk1[i], m);
      std::fill(lap.begin(), lap.end(), 0.0);
      add_laplacian(g, phi_m, lap, 1.0);
      for (std::size_t i = 0; i < N; ++i) {
        const double w = wt * bump((g.node(0, int(i)) - tf.xc) / tf.xs);
        phinorm += std::abs(w);
        if (w == 0.0) continue;
        double r = (uk1[i] - uk[i]) / u.dt - lap[i];
        if (S) r -= S->slice(std::min(k, S->nt - 1))[i];
        acc.add(r * w);
      }
    }
    const double meas = g.cell_measure() * u.dt;
    const double denom = phinorm * meas + 1e-300;
    worst = std::max(worst, std::abs(acc.value() * meas) / denom);
  }
  return worst;
}

ContractionReport check_contraction(const SpaceTimeField& u1, const SpaceTimeField& u2,
                                    const SpaceTimeField* S1, const SpaceTimeField* S2) {
  if (!(u1.grid == u2.grid) || u1.nt != u2.nt || std::abs(u1.dt - u2.dt) > 1e-14)
    throw domain_error("contraction check needs matching discretizations");
  const std::size_t N = u1.grid.cells();
  const double meas = u1.grid.cell_measure();
  ContractionReport rep;
  for (int k = 0; k < u1.nt; ++k) {
    KahanSum s;
    auto a = u1.slice(k), b = u2.slice(k);
    for (std::size_t i = 0; i < N; ++i) s.add(std::abs(a[i] - b[i]));
    rep.lhs = std::max(rep.lhs, s.value() * meas);
  }
  KahanSum rhs;
  {
    auto a = u1.slice(0), b = u2.slice(0);
    for (std::size_t i = 0; i < N; ++i) rhs.add(std::abs(a[i] - b[i]));
  }
  double rhs_val = rhs.value() * meas;
  if (S1 || S2) {
    if (!S1 || !S2 || S1->nt != S2->nt || !(S1->grid == u1.grid) || !(S2->grid == u1.grid))
      throw domain_error("contraction check needs matching source discretizations");
    for (int k = 0; k < S1->nt; ++k) {
      KahanSum s;
      auto a = S1->slice(k), b = S2->slice(k);
      for (std::size_t i = 0; i < N; ++i) s.add(std::abs(a[i] - b[i]));
      rhs_val += s.value() * meas * S1->dt;
    }
  }
  rep.rhs = rhs_val;
  rep.slack = 1e-8 * (rep.rhs + 1.0);
  rep.holds = rep.lhs <= rep.rhs + rep.slack;
  return rep;
}

}  // namespace pme::solver
