#include "pmelab/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace pme::fourier {

namespace {

std::mutex g_fftw_mutex;

struct PlanKey {
  int rows, cols, sign;
  bool operator<(const PlanKey& o) const {
    return std::tie(rows, cols, sign) < std::tie(o.rows, o.cols, o.sign);
  }
};

fftw_plan get_plan(int rows, int cols, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  PlanKey key{rows, cols, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> dummy(std::size_t(rows) * cols);
  auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
  fftw_plan plan = cols == 1 ? fftw_plan_dft_1d(rows, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                             : fftw_plan_dft_2d(rows, cols, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

void run_fft(std::complex<double>* data, int rows, int cols, bool inverse) {
  fftw_plan plan = get_plan(rows, cols, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
  if (inverse) {
    const double s = 1.0 / (double(rows) * cols);
    const std::size_t n = std::size_t(rows) * cols;
    for (std::size_t i = 0; i < n; ++i) data[i] *= s;
  }
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
  run_fft(data.data(), int(data.size()), 1, inverse);
}

void fft2(std::vector<std::complex<double>>& data, int rows, int cols, bool inverse) {
  if (data.size() != std::size_t(rows) * cols) throw domain_error("fft2 size mismatch");
  run_fft(data.data(), rows, cols, inverse);
}

double freq(int k, int n, double L) {
  const int signed_k = k <= n / 2 - 1 + (n & 1) ? k : k - n;
  return 2.0 * M_PI * signed_k / L;
}

double chi(double r) {
  r = std::abs(r);
  const double s = 2.0 - r;
  if (s >= 1.0) return 1.0;
  if (s <= 0.0) return 0.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

DyadicPartition build_partition(int n, double L, DyadicPartition::Mode mode) {
  if (n < 8) throw domain_error("partition needs a grid with at least 8 cells per axis");
  if (!(L > 0.0)) throw domain_error("partition needs a positive extent");
  DyadicPartition part;
  part.mode = mode;
  part.n = n;
  part.L = L;
  const double xi_min = 2.0 * M_PI / L;
  const double xi_max = M_PI * n / L;
  part.j_max = int(std::ceil(std::log2(xi_max)));
  part.j_min = mode == DyadicPartition::Mode::Homogeneous ? int(std::floor(std::log2(xi_min))) : 1;

  std::vector<double> absfreq(n);
  for (int k = 0; k < n; ++k) absfreq[k] = std::abs(freq(k, n, L));

  const int nblocks = part.j_max - part.j_min + 2;  // +1 for the low block
  part.w.assign(nblocks, std::vector<double>(n, 0.0));
  for (int k = 0; k < n; ++k) {
    const double a = absfreq[k];
    if (mode == DyadicPartition::Mode::Homogeneous) {
      part.w[0][k] = chi(std::ldexp(a, -(part.j_min - 1)));  // aggregated blocks below j_min
    } else {
      part.w[0][k] = chi(a);  // phi_0
    }
    for (int j = part.j_min; j <= part.j_max; ++j)
      part.w[j - part.j_min + 1][k] = chi(std::ldexp(a, -j)) - chi(std::ldexp(a, -j + 1));
  }
  return part;
}

std::vector<double> apply_multiplier(std::span<const double> f, std::span<const double> w) {
  const int n = int(f.size());
  if (w.size() != f.size()) throw domain_error("multiplier length mismatch");
  std::vector<std::complex<double>> buf(f.begin(), f.end());
  fft(buf, false);
  for (int k = 0; k < n; ++k) buf[k] *= w[k];
  fft(buf, true);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = buf[k].real();
  return out;
}

std::vector<double> apply_multiplier_2d(std::span<const double> f, int rows, int cols,
                                        std::span<const double> wr, std::span<const double> wc) {
  if (f.size() != std::size_t(rows) * cols || wr.size() != std::size_t(rows) ||
      wc.size() != std::size_t(cols))
    throw domain_error("multiplier size mismatch");
  std::vector<std::complex<double>> buf(f.begin(), f.end());
  fft2(buf, rows, cols, false);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) buf[std::size_t(r) * cols + c] *= wr[r] * wc[c];
  fft2(buf, rows, cols, true);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

Decomposition decompose(std::span<const double> f, const DyadicPartition& part) {
  if (int(f.size()) != part.n) throw domain_error("field does not match partition grid");
  Decomposition d;
  d.j_min = part.j_min;
  d.blocks.reserve(part.blocks());
  std::vector<std::complex<double>> hat(f.begin(), f.end());
  fft(hat, false);
  for (int b = 0; b < part.blocks(); ++b) {
    std::vector<std::complex<double>> buf(hat);
    for (int k = 0; k < part.n; ++k) buf[k] *= part.w[b][k];
    fft(buf, true);
    std::vector<double> block(part.n);
    for (int k = 0; k < part.n; ++k) block[k] = buf[k].real();
    d.blocks.push_back(std::move(block));
  }
  return d;
}

double time_cutoff(double t, double T) {
  if (t <= 0.0 || t >= T) return 0.0;
  const double ramp = 0.15 * T;
  auto smooth = [](double z) { return z * z * z * (10.0 + z * (-15.0 + 6.0 * z)); };
  if (t < ramp) return smooth(t / ramp);
  if (t > T - ramp) return smooth((T - t) / ramp);
  return 1.0;
}

SpaceTimeField apply_time_cutoff(const SpaceTimeField& f) {
  SpaceTimeField out = f;
  const double T = (f.nt - 1) * f.dt;
  for (int k = 0; k < f.nt; ++k) {
    const double w = time_cutoff(k * f.dt, T);
    auto s = out.slice(k);
    for (auto& x : s) x *= w;
  }
  return out;
}

std::complex<double> symbol_L(double m, double tau, double xi, double v) {
  return {std::pow(std::abs(v), m - 1.0) * xi * xi, tau};
}

namespace {

// Central-difference stencils, orders 0..4, O(h^2) accurate.
struct Stencil {
  std::vector<double> coeff;
  std::vector<int> offset;
};

Stencil stencil(int order) {
  switch (order) {
    case 0: return {{1.0}, {0}};
    case 1: return {{-0.5, 0.5}, {-1, 1}};
    case 2: return {{1.0, -2.0, 1.0}, {-1, 0, 1}};
    case 3: return {{-0.5, 1.0, -1.0, 0.5}, {-2, -1, 1, 2}};
    case 4: return {{1.0, -4.0, 6.0, -4.0, 1.0}, {-2, -1, 0, 1, 2}};
    default: throw domain_error("derivative order must be at most 4");
  }
}

std::complex<double> fd_derivative(double m, double v, double tau, double xi, int a_tau, int a_xi,
                                   double h_tau, double h_xi) {
  const Stencil st = stencil(a_tau);
  const Stencil sx = stencil(a_xi);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < st.coeff.size(); ++i)
    for (std::size_t k = 0; k < sx.coeff.size(); ++k) {
      const double t = tau + st.offset[i] * h_tau;
      const double x = xi + sx.offset[k] * h_xi;
      acc += st.coeff[i] * sx.coeff[k] / symbol_L(m, t, x, v);
    }
  return acc / (std::pow(h_tau, a_tau) * std::pow(h_xi, a_xi));
}

std::vector<double> log_samples(int n, double lo_exp, double hi_exp) {
  std::vector<double> xs;
  xs.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    const double e = lo_exp + (hi_exp - lo_exp) * i / std::max(1, n - 1);
    const double a = std::pow(2.0, e);
    xs.push_back(a);
    xs.push_back(-a);
  }
  return xs;
}

}  // namespace

MultiplierBoundResult verify_multiplier_bound(double m, int a_tau, int a_xi,
                                              const MultiplierSampleSpec& spec) {
  if (!(m > 1.0)) throw domain_error("nonlinearity must exceed 1");
  if (a_tau < 0 || a_xi < 0 || a_tau + a_xi > 4)
    throw domain_error("multi-index order must satisfy |alpha| <= 4");
  MultiplierBoundResult res;
  const auto taus = log_samples(spec.n_tau, -4.0, 4.0);
  const auto xis = log_samples(spec.n_xi, -4.0, 4.0);
  const auto vs = log_samples(spec.n_v, -3.0, 3.0);
  for (double tau : taus)
    for (double xi : xis)
      for (double v : vs) {
        const double h_tau = spec.fd_step * std::abs(tau);
        const double h_xi = spec.fd_step * std::abs(xi);
        const auto d_h = fd_derivative(m, v, tau, xi, a_tau, a_xi, h_tau, h_xi);
        const auto d_h2 = fd_derivative(m, v, tau, xi, a_tau, a_xi, 0.5 * h_tau, 0.5 * h_xi);
        const auto extrap = (4.0 * d_h2 - d_h) / 3.0;
        const double L = std::abs(symbol_L(m, tau, xi, v));
        const double unit = L * std::pow(std::abs(tau), a_tau) * std::pow(std::abs(xi), a_xi);
        const double normalized = std::abs(extrap) * unit;
        // validate the step in the bound's own units; near cancellation
        // points the raw relative defect is meaningless
        const double defect = std::abs(d_h2 - d_h) * unit / (1.0 + normalized);
        if (a_tau + a_xi > 0 && defect > spec.richardson_tol)
          throw numerical_error("finite-difference step failed Richardson validation", defect);
        res.worst_richardson_defect = std::max(res.worst_richardson_defect, defect);
        res.max_normalized = std::max(res.max_normalized, normalized);
        ++res.samples;
      }
  return res;
}

namespace {
double dyadic_bump(double r) { return chi(std::abs(r)) - chi(2.0 * std::abs(r)); }
// eta~ = eta_{-1} + eta_0 + eta_1 at scale 1; supported on [1/4, 4].
double wide_bump(double r) { return chi(std::abs(r) / 2.0) - chi(4.0 * std::abs(r)); }
}  // namespace

UniformMultiplierResult verify_uniform_multiplier(UniformSymbol sym, int l_lo, int l_hi, int j_lo,
                                                  int j_hi, const UniformMultiplierOptions& opt) {
  UniformMultiplierResult res;
  const int nt = opt.n_tau, nx = opt.n_xi;
  std::vector<std::complex<double>> buf(std::size_t(nt) * nx);
  for (int l = l_lo; l <= l_hi; ++l) {
    for (int j = j_lo; j <= j_hi; ++j) {
      const double st = std::ldexp(1.0, l);  // tau scale 2^l
      const double sx = std::ldexp(1.0, j);
      const double dtau = 2.0 * opt.window_tau * st / nt;
      const double dxi = 2.0 * opt.window_xi * sx / nx;
      // sup of |m| over the support annuli, used to scale-normalize.
      double msup = 1.0;
      if (sym == UniformSymbol::InvL) {
        msup = 0.0;
        for (int a = 0; a < nt; ++a)
          for (int b = 0; b < nx; ++b) {
            const double tau = -opt.window_tau * st + (a + 0.5) * dtau;
            const double xi = -opt.window_xi * sx + (b + 0.5) * dxi;
            if (wide_bump(tau / st) * wide_bump(xi / sx) > 1e-14)
              msup = std::max(msup, 1.0 / std::abs(symbol_L(opt.m, tau, xi, opt.v)));
          }
        if (msup == 0.0) msup = 1.0;
      }
      for (int a = 0; a < nt; ++a)
        for (int b = 0; b < nx; ++b) {
          const double tau = -opt.window_tau * st + (a + 0.5) * dtau;
          const double xi = -opt.window_xi * sx + (b + 0.5) * dxi;
          const double w = wide_bump(tau / st) * wide_bump(xi / sx);
          std::complex<double> mval = 1.0;
          if (sym == UniformSymbol::InvL) mval = 1.0 / (symbol_L(opt.m, tau, xi, opt.v) * msup);
          if (sym == UniformSymbol::Zero) mval = 0.0;
          buf[std::size_t(a) * nx + b] = w * mval;
        }
      fft2(buf, nt, nx, false);
      // L1 norm of the kernel: sum |T| / (nt nx); cyclic index sign/phase do
      // not affect the modulus.
      double total = 0.0, boundary = 0.0;
      for (int a = 0; a < nt; ++a)
        for (int b = 0; b < nx; ++b) {
          const double mag = std::abs(buf[std::size_t(a) * nx + b]);
          total += mag;
          // centered coordinates in [-n/2, n/2)
          const int ca = a < nt / 2 ? a : a - nt;
          const int cb = b < nx / 2 ? b : b - nx;
          if (std::abs(ca) > 0.4 * nt || std::abs(cb) > 0.4 * nx) boundary += mag;
        }
      const double l1 = total / (double(nt) * nx);
      const double bmass = total > 0 ? boundary / total : 0.0;
      res.worst_boundary_mass = std::max(res.worst_boundary_mass, bmass);
      if (bmass > opt.boundary_tol)
        throw numerical_error("kernel mass leaks to the grid boundary; enlarge the window", bmass);
      res.table.push_back({l, j, l1});
    }
  }
  double lo = res.table.front().kernel_l1, hi = lo;
  for (const auto& row : res.table) {
    lo = std::min(lo, row.kernel_l1);
    hi = std::max(hi, row.kernel_l1);
  }
  res.max_over_min = lo > 0 ? hi / lo : 0.0;
  return res;
}

}  // namespace pme::fourier
