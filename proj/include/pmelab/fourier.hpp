#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pmelab/grid.hpp"

namespace pme::fourier {

// In-place complex DFT (FFTW, ESTIMATE plans, deterministic). The inverse
// transform is scaled by 1/n.
void fft(std::vector<std::complex<double>>& data, bool inverse);
void fft2(std::vector<std::complex<double>>& data, int rows, int cols, bool inverse);

// Angular frequency of DFT index k on an n-point grid of extent L.
double freq(int k, int n, double L);

// Smooth cutoff built from the exp(-1/x) transition: 1 for r <= 1, 0 for r >= 2.
double chi(double r);

// Dyadic weights on the discrete frequency axis. Block j carries
// phi_j(xi) = chi(2^-j |xi|) - chi(2^-j+1 |xi|), supported in the annulus
// 2^{j-1} <= |xi| <= 2^{j+1}. Telescoping makes the partition of unity exact.
struct DyadicPartition {
  enum class Mode { Homogeneous, Inhomogeneous };
  Mode mode = Mode::Homogeneous;
  int n = 0;
  double L = 0.0;
  int j_min = 0;  // coarsest resolved annulus (Inhomogeneous: j_min = 1)
  int j_max = 0;
  // w[0] is the low block: aggregated sub-j_min residual (homogeneous) or
  // the cutoff phi_0 (inhomogeneous). w[b], b >= 1, is block j_min + b - 1.
  std::vector<std::vector<double>> w;

  int blocks() const { return int(w.size()); }
  int j_of_block(int b) const { return j_min + b - 1; }
};

DyadicPartition build_partition(int n, double L, DyadicPartition::Mode mode);

// Frequency-multiplier application; w is tabulated per DFT index.
std::vector<double> apply_multiplier(std::span<const double> f, std::span<const double> w);
// Separable (rows x cols) multiplier w_r(row freq) * w_c(col freq).
std::vector<double> apply_multiplier_2d(std::span<const double> f, int rows, int cols,
                                        std::span<const double> wr, std::span<const double> wc);

struct Decomposition {
  int j_min = 0;
  std::vector<std::vector<double>> blocks;  // blocks[0] = low/residual block
};

Decomposition decompose(std::span<const double> f, const DyadicPartition& part);

// Smooth temporal window supported in the open interval (0, T); identically 1
// on the middle [0.15 T, 0.85 T].
double time_cutoff(double t, double T);
SpaceTimeField apply_time_cutoff(const SpaceTimeField& f);

// --- multiplier checks -----------------------------------------------------

// Symbol L(i tau, i xi, v) = i tau + |v|^{m-1} |xi|^2.
std::complex<double> symbol_L(double m, double tau, double xi, double v);

struct MultiplierSampleSpec {
  int n_tau = 9;   // log-spaced |tau| in [2^-4, 2^4], both signs
  int n_xi = 9;    // log-spaced |xi| in [2^-4, 2^4], both signs
  int n_v = 7;     // log-spaced |v| in [2^-3, 2^3], both signs
  double fd_step = 1e-3;       // relative central-difference step
  double richardson_tol = 0.10;
};

struct MultiplierBoundResult {
  double max_normalized = 0.0;  // max over samples of |d^a(1/L)| |L| |tau|^at |xi|^ax
  double worst_richardson_defect = 0.0;
  int samples = 0;
};

// Samples |d_tau^{a_tau} d_xi^{a_xi} (1/L)| |L| |tau|^{a_tau} |xi|^{a_xi}
// by Richardson-validated central differences; |a| <= 4 in 1-d.
MultiplierBoundResult verify_multiplier_bound(double m, int a_tau, int a_xi,
                                              const MultiplierSampleSpec& spec = {});

enum class UniformSymbol { Zero, One, InvL };

struct UniformMultiplierOptions {
  double m = 2.0;
  double v = 1.0;
  int n_tau = 1024;
  int n_xi = 1024;
  double window_tau = 12.0;  // base grid extent [-W, W]; (l,j) grids are dilates
  double window_xi = 12.0;
  double boundary_tol = 0.01;  // kernel mass outside the central 80% box
};

struct UniformMultiplierResult {
  struct Row {
    int l = 0, j = 0;
    double kernel_l1 = 0.0;  // scale-normalized: symbol divided by its annulus sup
  };
  std::vector<Row> table;
  double max_over_min = 0.0;
  double worst_boundary_mass = 0.0;
};

// Kernel L^1 norms of eta~_l phi~_j m after dividing m by its sup on the
// support annulus; the max/min ratio over the table quantifies the uniformity
// of the multiplier bound.
UniformMultiplierResult verify_uniform_multiplier(UniformSymbol sym, int l_lo, int l_hi, int j_lo,
                                                  int j_hi, const UniformMultiplierOptions& opt = {});

}  // namespace pme::fourier
