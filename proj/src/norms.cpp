#include "pmelab/norms.hpp"

#include <algorithm>
#include <cmath>

#include "pmelab/common.hpp"

namespace pme::norms {

namespace {

inline double pw(double d, double p) {
  d = std::abs(d);
  if (p == 2.0) return d * d;
  if (p == 1.0) return d;
  return std::pow(d, p);
}

// Coarsen a 1-d field by averaging cell pairs (cell-centered two-to-one).
Field coarsen(const Field& f) {
  const int n = f.grid.n[0] / 2;
  Field c(Grid(n, f.grid.extent[0]));
  for (int i = 0; i < n; ++i) c.v[i] = 0.5 * (f.v[2 * i] + f.v[2 * i + 1]);
  return c;
}

void find_support(std::span<const double> f, int& i0, int& i1) {
  const int n = int(f.size());
  i0 = 0;
  i1 = n - 1;
  int lo = n, hi = -1;
  for (int i = 0; i < n; ++i)
    if (f[i] != 0.0) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  if (hi < 0) {
    i0 = 0;
    i1 = -1;  // empty
  } else {
    i0 = lo;
    i1 = hi;
  }
}

}  // namespace

std::vector<double> lag_power_sums(std::span<const double> f, double p, int i0, int i1) {
  const int n = int(f.size());
  const int half = n / 2;
  std::vector<double> lags(half, 0.0);
  if (i1 < i0) return lags;  // identically zero field
  const int s = i1 - i0 + 1;
  const bool full = s >= n;
  auto lag_sum = [&](int r) {
    double acc = 0.0;
    if (full) {
      for (int i = 0; i < n; ++i) {
        int k = i + r;
        if (k >= n) k -= n;
        acc += pw(f[i] - f[k], p);
      }
    } else {
      // nonzero terms need i or i+r inside [i0, i1]
      const int a = i0 - r;
      for (int i = a; i <= i1; ++i) {
        if (i > i1 - r && i < i0) continue;  // both ends outside the support
        int ii = i < 0 ? i + n : i;
        int k = ii + r;
        if (k >= n) k -= n;
        acc += pw(f[ii] - f[k], p);
      }
    }
    return acc;
  };
  // each lag writes its own slot, so the worker split cannot change results
  if (thread_count() > 1 && std::size_t(half) * std::size_t(s) > (1u << 16)) {
    parallel_for(std::size_t(half), [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) lags[q] = lag_sum(int(q) + 1);
    });
  } else {
    for (int r = 1; r <= half; ++r) lags[r - 1] = lag_sum(r);
  }
  return lags;
}

std::vector<double> lag_power_sums(std::span<const double> f, double p) {
  int i0, i1;
  find_support(f, i0, i1);
  return lag_power_sums(f, p, i0, i1);
}

double gagliardo_pow_from_lags(std::span<const double> lags, int n, double h, double sigma,
                               double p) {
  const int half = n / 2;
  const double expo = -(sigma * p + 1.0);
  KahanSum s;
  for (int r = 1; r <= half; ++r) {
    const double w = std::pow(r * h, expo);
    const double factor = (2 * r == n) ? 1.0 : 2.0;  // antipodal lag counts ordered pairs once
    s.add(factor * w * lags[r - 1]);
  }
  return s.value() * h * h;
}

double whole_line_tail_pow(std::span<const double> f, double h, double sigma, double p) {
  KahanSum s;
  for (double x : f) s.add(pw(x, p));
  const double L = h * double(f.size());
  return 4.0 / (sigma * p) * s.value() * h * std::pow(0.5 * L, -sigma * p);
}

double subgrid_completion_pow(const Field& f, double sigma, double p) {
  if (f.grid.dim != 1) throw domain_error("subgrid completion implemented for 1-d fields");
  const double h = f.grid.spacing(0);
  const Field dq = diff_quotient(f);
  KahanSum s;
  for (double x : dq.v) s.add(pw(x, p));
  const double band = std::pow(0.5 * h, p * (1.0 - sigma)) / (p * (1.0 - sigma));
  return 2.0 * s.value() * h * band;
}

namespace {

double slobodeckii_pow_2d(const Field& f, double sigma, double p) {
  const int nx = f.grid.n[0], ny = f.grid.n[1];
  if (std::abs(f.grid.spacing(0) - f.grid.spacing(1)) > 1e-14 * f.grid.spacing(0))
    throw domain_error("2-d pair sums require square cells");
  const double h = f.grid.spacing(0);
  const double expo = -(sigma * p + 2.0);
  // displacement classes (dx, dy), dx in [0, nx), dy in [0, ny), not both 0
  KahanSum total;
  for (int dy = 0; dy < ny; ++dy) {
    const int my = std::min(dy, ny - dy);
    for (int dx = 0; dx < nx; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const int mx = std::min(dx, nx - dx);
      const double dist = h * std::sqrt(double(mx) * mx + double(my) * my);
      double acc = 0.0;
      for (int j = 0; j < ny; ++j) {
        const int j2 = (j + dy) % ny;
        for (int i = 0; i < nx; ++i) {
          const int i2 = (i + dx) % nx;
          acc += pw(f.at(i, j) - f.at(i2, j2), p);
        }
      }
      total.add(acc * std::pow(dist, expo));
    }
  }
  const double meas = f.grid.cell_measure();
  return total.value() * meas * meas;
}

}  // namespace

double slobodeckii_pow(const Field& f, double sigma, double p, bool whole_line_tail,
                       bool subgrid_completion) {
  if (!(sigma > 0.0) || !(sigma < 1.0)) throw domain_error("sigma must lie in (0,1)");
  if (!(p >= 1.0)) throw domain_error("p must be at least 1");
  if (f.grid.dim == 2) return slobodeckii_pow_2d(f, sigma, p);
  const auto lags = lag_power_sums(f.v, p);
  double val = gagliardo_pow_from_lags(lags, f.grid.n[0], f.grid.spacing(0), sigma, p);
  if (whole_line_tail) val += whole_line_tail_pow(f.v, f.grid.spacing(0), sigma, p);
  if (subgrid_completion) val += subgrid_completion_pow(f, sigma, p);
  return val;
}

NormReport slobodeckii_seminorm(const Field& f, double sigma, double p, const Options& opt) {
  NormReport r;
  r.sigma_x = sigma;
  r.p = p;
  r.h = f.grid.spacing(0);
  const double pow_val =
      slobodeckii_pow(f, sigma, p, opt.whole_line_tail, opt.subgrid_completion);
  r.value = std::pow(pow_val, 1.0 / p);
  if (opt.whole_line_tail && f.grid.dim == 1) {
    const double tail = whole_line_tail_pow(f.v, f.grid.spacing(0), sigma, p);
    r.tail_correction = r.value - std::pow(std::max(pow_val - tail, 0.0), 1.0 / p);
  }
  if (opt.discontinuous_input && sigma * p >= 1.0) r.divergence_warning = true;
  if (opt.refinement_diag && f.grid.dim == 1 && f.grid.n[0] >= 8) {
    const double coarse = std::pow(
        slobodeckii_pow(coarsen(f), sigma, p, opt.whole_line_tail, opt.subgrid_completion),
        1.0 / p);
    r.refinement_delta = std::abs(r.value - coarse) / std::max(r.value, 1e-300);
  }
  return r;
}

Field diff_quotient(const Field& f) {
  if (f.grid.dim != 1) throw domain_error("difference quotients implemented for 1-d fields");
  const int n = f.grid.n[0];
  const double h = f.grid.spacing(0);
  Field g(f.grid);
  for (int i = 0; i < n; ++i) g.v[i] = (f.v[(i + 1) % n] - f.v[i]) / h;
  return g;
}

Field second_difference(const Field& f) {
  if (f.grid.dim != 1) throw domain_error("difference quotients implemented for 1-d fields");
  const int n = f.grid.n[0];
  const double h2 = f.grid.spacing(0) * f.grid.spacing(0);
  Field g(f.grid);
  for (int i = 0; i < n; ++i)
    g.v[i] = (f.v[(i + 1) % n] - 2.0 * f.v[i] + f.v[(i + n - 1) % n]) / h2;
  return g;
}

namespace {

double lp_pow(std::span<const double> f, double p, double meas) {
  KahanSum s;
  for (double x : f) s.add(pw(x, p));
  return s.value() * meas;
}

}  // namespace

double fractional_seminorm_pow(const Field& f, double sigma, double p, bool whole_line_tail,
                               bool subgrid_completion) {
  if (sigma < 0.0 || sigma >= 3.0) throw domain_error("sigma must lie in [0,3)");
  const int k = int(std::floor(sigma + 1e-13));
  const double r = sigma - k;
  Field base = f;
  if (k == 1) base = diff_quotient(f);
  if (k == 2) base = second_difference(f);
  if (r < 1e-13) return lp_pow(base.v, p, base.grid.cell_measure());
  return slobodeckii_pow(base, r, p, whole_line_tail, subgrid_completion);
}

double sobolev_pow(const Field& f, double sigma, double p, bool homogeneous,
                   bool whole_line_tail, bool subgrid_completion) {
  if (homogeneous) return fractional_seminorm_pow(f, sigma, p, whole_line_tail, subgrid_completion);
  const int k = int(std::floor(sigma + 1e-13));
  double total = lp_pow(f.v, p, f.grid.cell_measure());
  Field d = f;
  for (int j = 1; j <= k; ++j) {
    d = j == 1 ? diff_quotient(f) : second_difference(f);
    total += lp_pow(d.v, p, d.grid.cell_measure());
  }
  const double r = sigma - k;
  if (r > 1e-13) total += slobodeckii_pow(d, r, p, whole_line_tail, subgrid_completion);
  return total;
}

NormReport sobolev_norm(const Field& f, double sigma, double p, const Options& opt) {
  if (sigma < 0.0) throw domain_error("sigma must be nonnegative");
  NormReport r;
  r.sigma_x = sigma;
  r.p = p;
  r.h = f.grid.spacing(0);
  r.value = std::pow(
      sobolev_pow(f, sigma, p, opt.homogeneous, opt.whole_line_tail, opt.subgrid_completion),
      1.0 / p);
  if (opt.refinement_diag && f.grid.dim == 1 && f.grid.n[0] >= 8) {
    const double coarse = std::pow(sobolev_pow(coarsen(f), sigma, p, opt.homogeneous,
                                               opt.whole_line_tail, opt.subgrid_completion),
                                   1.0 / p);
    r.refinement_delta = std::abs(r.value - coarse) / std::max(r.value, 1e-300);
  }
  return r;
}

std::vector<double> SliceSeries::trapezoid_weights() const {
  const int n = int(times.size());
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int k = 0; k < n; ++k) {
    const double lo = k == 0 ? times[0] : 0.5 * (times[k - 1] + times[k]);
    const double hi = k == n - 1 ? times[n - 1] : 0.5 * (times[k] + times[k + 1]);
    w[k] = hi - lo;
  }
  return w;
}

SliceSeries to_series(const SpaceTimeField& f) {
  SliceSeries s;
  s.grid = f.grid;
  s.times.resize(f.nt);
  s.slices.resize(f.nt);
  for (int k = 0; k < f.nt; ++k) {
    s.times[k] = f.time(k);
    auto sl = f.slice(k);
    s.slices[k].assign(sl.begin(), sl.end());
  }
  return s;
}

namespace {

// X-norm^p of a raw slice for every requested spatial order, sharing lag sums
// and difference quotients across the sigma_x list.
std::vector<double> xnorm_pow_multi(const Grid& g, std::span<const double> vals,
                                    std::span<const double> sigmas_x, double p,
                                    bool homogeneous, bool completion, bool tail) {
  Field f(g);
  std::copy(vals.begin(), vals.end(), f.v.begin());
  const int n = g.n[0];
  const double h = g.spacing(0);
  const double meas = g.cell_measure();

  int max_k = 0;
  bool frac_at[3] = {false, false, false};
  for (double s : sigmas_x) {
    const int k = int(std::floor(s + 1e-13));
    const double r = s - k;
    max_k = std::max(max_k, k);
    if (r > 1e-13) frac_at[k] = true;
  }

  double lp[3] = {0, 0, 0};
  std::vector<double> lag[3];
  lp[0] = lp_pow(f.v, p, meas);
  if (frac_at[0]) lag[0] = lag_power_sums(f.v, p);
  Field d1, d2;
  if (max_k >= 1 || (completion && frac_at[0])) d1 = diff_quotient(f);
  if (max_k >= 1) {
    lp[1] = lp_pow(d1.v, p, meas);
    if (frac_at[1]) lag[1] = lag_power_sums(d1.v, p);
  }
  if (max_k >= 2 || (completion && frac_at[1])) d2 = second_difference(f);
  if (max_k >= 2) {
    lp[2] = lp_pow(d2.v, p, meas);
    if (frac_at[2]) lag[2] = lag_power_sums(d2.v, p);
  }

  std::vector<double> out;
  out.reserve(sigmas_x.size());
  for (double s : sigmas_x) {
    const int k = int(std::floor(s + 1e-13));
    const double r = s - k;
    double frac = 0.0;
    if (r > 1e-13) {
      frac = gagliardo_pow_from_lags(lag[k], n, h, r, p);
      const Field& base = k == 0 ? f : (k == 1 ? d1 : d2);
      if (completion) frac += subgrid_completion_pow(base, r, p);
      if (tail) frac += whole_line_tail_pow(base.v, h, r, p);
    }
    double val;
    if (homogeneous) {
      val = r > 1e-13 ? frac : lp[k];
    } else {
      val = frac;
      for (int j = 0; j <= k; ++j) val += lp[j];
    }
    out.push_back(val);
  }
  return out;
}

}  // namespace

std::vector<double> mixed_pow_multi(const SliceSeries& s, double sigma_t,
                                    std::span<const double> sigmas_x, double p,
                                    bool homogeneous, bool subgrid_completion,
                                    bool whole_line_tail) {
  if (s.grid.dim != 1) throw domain_error("mixed quadrature norms are 1-d");
  const int nt = int(s.times.size());
  if (nt < 2) throw domain_error("need at least 2 time slices");
  const auto w = s.trapezoid_weights();
  const std::size_t ns = sigmas_x.size();
  std::vector<double> total(ns, 0.0);

  if (!(sigma_t > 0.0) || !homogeneous) {
    // temporal L^p part
    for (int k = 0; k < nt; ++k) {
      const auto xp = xnorm_pow_multi(s.grid, s.slices[k], sigmas_x, p, homogeneous,
                                      subgrid_completion, whole_line_tail);
      for (std::size_t i = 0; i < ns; ++i) total[i] += w[k] * xp[i];
    }
    if (!(sigma_t > 0.0)) return total;
    if (homogeneous) std::fill(total.begin(), total.end(), 0.0);
  }

  // temporal Gagliardo part: ordered pairs, X-norm of slice differences
  std::vector<double> diff(s.grid.cells());
  for (int k = 0; k < nt; ++k) {
    for (int l = k + 1; l < nt; ++l) {
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = s.slices[k][i] - s.slices[l][i];
      const auto xp = xnorm_pow_multi(s.grid, diff, sigmas_x, p, homogeneous,
                                      subgrid_completion, whole_line_tail);
      const double kern = 2.0 * w[k] * w[l] * std::pow(std::abs(s.times[k] - s.times[l]),
                                                       -(sigma_t * p + 1.0));
      for (std::size_t i = 0; i < ns; ++i) total[i] += kern * xp[i];
    }
  }
  return total;
}

double mixed_pow(const SliceSeries& s, double sigma_t, double sigma_x, double p,
                 bool homogeneous) {
  const double sx[1] = {sigma_x};
  return mixed_pow_multi(s, sigma_t, sx, p, homogeneous)[0];
}

NormReport spacetime_sobolev_norm(const SpaceTimeField& f, double sigma_t, double sigma_x,
                                  double p, const Options& opt) {
  if (f.nt < 8) throw domain_error("space-time norms need at least 8 time slices");
  if (sigma_t < 0.0 || sigma_t >= 1.0) throw domain_error("sigma_t must lie in [0,1)");
  NormReport r;
  r.sigma_t = sigma_t;
  r.sigma_x = sigma_x;
  r.p = p;
  r.h = f.grid.spacing(0);
  r.dt = f.dt;
  const auto series = to_series(f);
  r.value = std::pow(mixed_pow(series, sigma_t, sigma_x, p, opt.homogeneous), 1.0 / p);
  return r;
}

}  // namespace pme::norms
