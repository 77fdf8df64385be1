#include "pmelab/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "pmelab/barenblatt.hpp"
#include "pmelab/common.hpp"
#include "pmelab/norms.hpp"

namespace pme::sweep {

namespace {

std::vector<double> geometric_times(double T, double t_floor, int per_octave) {
  std::vector<double> ts;
  const double g = std::pow(2.0, 1.0 / per_octave);
  for (double t = T; t >= t_floor; t /= g) ts.push_back(t);
  std::reverse(ts.begin(), ts.end());
  return ts;
}

std::vector<double> trapezoid_weights(const std::vector<double>& ts) {
  const int n = int(ts.size());
  std::vector<double> w(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const double lo = k == 0 ? ts[0] : 0.5 * (ts[k - 1] + ts[k]);
    const double hi = k == n - 1 ? ts[n - 1] : 0.5 * (ts[k] + ts[k + 1]);
    w[k] = hi - lo;
  }
  return w;
}

}  // namespace

Family barenblatt_family(double m, double mu, double C, double L, double T,
                         std::vector<int> resolutions, int slices_per_octave, double t_floor) {
  Family fam;
  fam.name = "barenblatt";
  const auto prof = bb::params(m, 1, C);
  const auto times = geometric_times(T, t_floor, slices_per_octave);
  const auto weights = trapezoid_weights(times);
  for (int n : resolutions) {
    Level lv;
    lv.grid = Grid(n, L);
    lv.times = times;
    lv.weights = weights;
    Grid g = lv.grid;
    lv.eval = [prof, mu, g](double t, std::span<double> out) {
      for (int i = 0; i < g.n[0]; ++i) out[i] = bb::eval(prof, t, g.node(0, i), mu);
    };
    fam.levels.push_back(std::move(lv));
  }
  return fam;
}

Family smooth_bump_family(double L, double T, std::vector<int> resolutions, int nt) {
  Family fam;
  fam.name = "smooth_bump";
  std::vector<double> times(nt);
  for (int k = 0; k < nt; ++k) times[k] = T * (k + 1.0) / nt;
  const auto weights = trapezoid_weights(times);
  for (int n : resolutions) {
    Level lv;
    lv.grid = Grid(n, L);
    lv.times = times;
    lv.weights = weights;
    Grid g = lv.grid;
    lv.eval = [g, L](double, std::span<double> out) {
      for (int i = 0; i < g.n[0]; ++i) {
        const double z = g.node(0, i) / (0.25 * L);
        out[i] = z * z < 1.0 ? std::exp(-1.0 / (1.0 - z * z)) : 0.0;
      }
    };
    fam.levels.push_back(std::move(lv));
  }
  return fam;
}

Family barenblatt_mixed_family(double m, double mu, double C, double L, double T,
                               std::vector<int> resolutions, int slices_per_octave,
                               double t_floor) {
  Family fam;
  fam.name = "barenblatt_mixed";
  const auto prof = bb::params(m, 1, C);
  for (int n : resolutions) {
    Level lv;
    lv.grid = Grid(n, L);
    // keep only the window the grid can represent: slices below the cell
    // scale sample to zero anyway and would just burn slice pairs
    const double h = lv.grid.spacing(0);
    const double t_cut = std::pow(0.25 * h / std::sqrt(prof.C / prof.k), 3.0 / (3.0 * prof.beta));
    lv.times = geometric_times(T, std::max(t_floor, t_cut), slices_per_octave);
    lv.weights = trapezoid_weights(lv.times);
    Grid g = lv.grid;
    lv.eval = [prof, mu, g](double t, std::span<double> out) {
      for (int i = 0; i < g.n[0]; ++i) out[i] = bb::eval(prof, t, g.node(0, i), mu);
    };
    fam.levels.push_back(std::move(lv));
  }
  return fam;
}

namespace {

bool all_zero(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

// Per-slice homogeneous seminorm^p for every sigma, sharing lag tables.
std::vector<double> slice_seminorms_pow(const Grid& g, std::span<const double> vals,
                                        const std::vector<double>& sigmas, double p,
                                        bool completion, bool tail) {
  const int n = g.n[0];
  const double h = g.spacing(0);
  std::vector<double> out(sigmas.size(), 0.0);
  if (all_zero(vals)) return out;

  Field f(g);
  std::copy(vals.begin(), vals.end(), f.v.begin());

  int max_k = 0;
  bool frac_at[3] = {false, false, false};
  for (double s : sigmas) {
    const int k = int(std::floor(s + 1e-13));
    max_k = std::max(max_k, k);
    if (s - k > 1e-13) frac_at[k] = true;
  }

  Field d1, d2;
  std::vector<double> lag[3];
  double lp[3] = {0, 0, 0};
  auto lp_pow = [&](std::span<const double> v) {
    KahanSum s;
    for (double x : v) {
      const double a = std::abs(x);
      s.add(p == 2.0 ? a * a : (p == 1.0 ? a : std::pow(a, p)));
    }
    return s.value() * h;
  };
  if (frac_at[0]) lag[0] = norms::lag_power_sums(f.v, p);
  lp[0] = lp_pow(f.v);
  if (max_k >= 1) d1 = norms::diff_quotient(f);
  if (max_k >= 1) {
    if (frac_at[1]) lag[1] = norms::lag_power_sums(d1.v, p);
    lp[1] = lp_pow(d1.v);
  }
  if (max_k >= 2 || (completion && frac_at[1])) d2 = norms::second_difference(f);
  if (max_k >= 2) {
    if (frac_at[2]) lag[2] = norms::lag_power_sums(d2.v, p);
    lp[2] = lp_pow(d2.v);
  }
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    const double s = sigmas[si];
    const int k = int(std::floor(s + 1e-13));
    const double r = s - k;
    if (r <= 1e-13) {
      out[si] = lp[k];
      continue;
    }
    const Field& base = k == 0 ? f : (k == 1 ? d1 : d2);
    double val = norms::gagliardo_pow_from_lags(lag[k], n, h, r, p);
    if (completion) val += norms::subgrid_completion_pow(base, r, p);
    if (tail) val += norms::whole_line_tail_pow(base.v, h, r, p);
    out[si] = val;
  }
  return out;
}

struct Fit {
  double slope = 0.0;
  double err = 0.0;
};

Fit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = int(x.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - my - f.slope * (x[i] - mx);
    ss += r * r;
  }
  if (n > 2) f.err = std::sqrt(ss / (n - 2) / sxx);
  return f;
}

double cross_at(const std::vector<double>& sigmas, const std::vector<double>& slopes, double thr,
                int i) {
  // linear interpolation on [sigma_i, sigma_{i+1}]
  const double s0 = slopes[i], s1 = slopes[i + 1];
  if (s1 == s0) return sigmas[i + 1];
  return sigmas[i] + (sigmas[i + 1] - sigmas[i]) * (thr - s0) / (s1 - s0);
}

bool find_crossing(const std::vector<double>& sigmas, const std::vector<double>& slopes,
                   double thr, double& out) {
  int crossings = 0, idx = -1;
  for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
    const bool below = slopes[i] < thr;
    const bool above_next = slopes[i + 1] >= thr;
    if (below && above_next) {
      ++crossings;
      idx = int(i);
    }
    if (!below && !above_next) return false;  // fell back below: non-monotone pattern
  }
  if (crossings != 1) return false;
  out = cross_at(sigmas, slopes, thr, idx);
  return true;
}

}  // namespace

SweepResult norm_sweep(const Family& family, std::vector<double> sigmas, const SweepOptions& opt) {
  if (family.levels.size() < 3) throw domain_error("sweep needs at least 3 resolutions");
  if (sigmas.size() < 5) throw domain_error("sweep needs at least 5 sigma values");
  std::sort(sigmas.begin(), sigmas.end());

  const int nlev = int(family.levels.size());
  const int ns = int(sigmas.size());
  std::vector<std::vector<double>> norm(ns, std::vector<double>(nlev, 0.0));
  std::vector<double> hs(nlev), dts(nlev);

  for (int lv = 0; lv < nlev; ++lv) {
    const Level& level = family.levels[lv];
    hs[lv] = level.grid.spacing(0);
    dts[lv] = level.times.size() > 1 ? level.times[1] - level.times[0] : 0.0;
    if (opt.mode == Mode::SpatialLp) {
      std::vector<double> scratch(level.grid.cells());
      std::vector<KahanSum> acc(ns);
      for (std::size_t k = 0; k < level.times.size(); ++k) {
        level.eval(level.times[k], scratch);
        const auto vals = slice_seminorms_pow(level.grid, scratch, sigmas, opt.p,
                                              opt.subgrid_completion, opt.whole_line_tail);
        for (int si = 0; si < ns; ++si) acc[si].add(level.weights[k] * vals[si]);
      }
      for (int si = 0; si < ns; ++si) norm[si][lv] = std::pow(acc[si].value(), 1.0 / opt.p);
    } else {
      norms::SliceSeries series;
      series.grid = level.grid;
      series.times = level.times;
      series.slices.resize(level.times.size());
      for (std::size_t k = 0; k < level.times.size(); ++k) {
        series.slices[k].resize(level.grid.cells());
        level.eval(level.times[k], series.slices[k]);
      }
      const auto vals =
          norms::mixed_pow_multi(series, opt.sigma_t, sigmas, opt.p, /*homogeneous=*/false,
                                 opt.subgrid_completion, opt.whole_line_tail);
      for (int si = 0; si < ns; ++si) norm[si][lv] = std::pow(vals[si], 1.0 / opt.p);
    }
  }

  SweepResult res;
  res.predicted = opt.predicted;
  std::vector<double> slopes(ns, 0.0), errs(ns, 0.0);
  std::vector<double> x(nlev);
  for (int lv = 0; lv < nlev; ++lv) x[lv] = std::log(1.0 / hs[lv]);
  for (int si = 0; si < ns; ++si) {
    std::vector<double> y(nlev);
    bool ok = true;
    for (int lv = 0; lv < nlev; ++lv) {
      if (!(norm[si][lv] > 0.0) || !std::isfinite(norm[si][lv])) ok = false;
      y[lv] = ok ? std::log(norm[si][lv]) : 0.0;
    }
    Fit f = ok ? fit_slope(x, y) : Fit{};
    slopes[si] = f.slope;
    errs[si] = f.err;
    for (int lv = 0; lv < nlev; ++lv)
      res.rows.push_back({sigmas[si], hs[lv], dts[lv], norm[si][lv], f.slope, f.err});
  }

  double thr_est = 0.0;
  if (find_crossing(sigmas, slopes, opt.slope_threshold, thr_est)) {
    res.detected = true;
    res.threshold = thr_est;
    std::vector<double> up(ns), dn(ns);
    for (int si = 0; si < ns; ++si) {
      up[si] = slopes[si] + errs[si];
      dn[si] = slopes[si] - errs[si];
    }
    double lo = thr_est, hi = thr_est;
    if (!find_crossing(sigmas, up, opt.slope_threshold, lo)) lo = thr_est - (sigmas[1] - sigmas[0]);
    if (!find_crossing(sigmas, dn, opt.slope_threshold, hi)) hi = thr_est + (sigmas[1] - sigmas[0]);
    res.ci_lo = std::min(lo, thr_est);
    res.ci_hi = std::max(hi, thr_est);
  }
  return res;
}

}  // namespace pme::sweep
