#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pmelab/fourier.hpp"
#include "pmelab/grid.hpp"

namespace pme::norms {

struct Options {
  bool homogeneous = false;      // top-order seminorm only
  bool whole_line_tail = false;  // far-field correction for decaying 1-d fields
  bool subgrid_completion = false;  // complete the pair sum below h/2 from quotients
  bool refinement_diag = false;  // also evaluate on the 2h coarsening
  bool discontinuous_input = false;
};

struct NormReport {
  double value = 0.0;
  std::string method = "quadrature";
  double sigma_t = 0.0;
  double sigma_x = 0.0;
  double p = 2.0;
  double h = 0.0;
  double dt = 0.0;
  double tail_correction = 0.0;   // contribution added by whole_line_tail
  double refinement_delta = 0.0;  // |value - value_2h| / max(value, eps)
  double residual_block = 0.0;    // spectral norms: size of the low/residual block
  double cutoff_share = 0.0;      // spectral space-time norms: temporal window share
  bool divergence_warning = false;
};

// --- quadrature primitives ---------------------------------------------------

// Lag sums A[r-1] = sum_i |f_i - f_{(i+r) mod n}|^p, r = 1..n/2.
// support window [i0, i1] (inclusive): f vanishes outside; pass 0, n-1 when unknown.
std::vector<double> lag_power_sums(std::span<const double> f, double p, int i0, int i1);
std::vector<double> lag_power_sums(std::span<const double> f, double p);

// Ordered-pair Gagliardo sum on the periodic grid, assembled from lag sums:
//   sum_{i != j} |f_i - f_j|^p d_T(i,j)^{-sigma p - 1} h^2.
double gagliardo_pow_from_lags(std::span<const double> lags, int n, double h, double sigma,
                               double p);

// Far-field correction for a decaying field embedded in a torus window:
// (4/(sigma p)) ||f||_p^p (L/2)^{-sigma p}.
double whole_line_tail_pow(std::span<const double> f, double h, double sigma, double p);

// Completion of the pair sum over the band |x-y| < h/2 from difference
// quotients of the field (the discrete lags cover |x-y| > h/2 only).
double subgrid_completion_pow(const Field& f, double sigma, double p);

// Slobodeckii seminorm^p, sigma in (0,1). 1-d uses lag sums, 2-d uses
// displacement classes.
double slobodeckii_pow(const Field& f, double sigma, double p, bool whole_line_tail = false,
                       bool subgrid_completion = false);

NormReport slobodeckii_seminorm(const Field& f, double sigma, double p, const Options& opt = {});

// Homogeneous seminorm of order sigma in [0,3): sigma = k + r with k-th
// difference quotients; r = 0 gives the plain ||D^k f||_p^p (L^p for k=0).
double fractional_seminorm_pow(const Field& f, double sigma, double p,
                               bool whole_line_tail = false, bool subgrid_completion = false);

// Full Sobolev norm^p: sum of L^p part, difference-quotient L^p parts up to
// order k, and the fractional remainder.
double sobolev_pow(const Field& f, double sigma, double p, bool homogeneous,
                   bool whole_line_tail = false, bool subgrid_completion = false);

NormReport sobolev_norm(const Field& f, double sigma, double p, const Options& opt = {});

// Forward difference quotient (f_{i+1} - f_i)/h and centered second
// difference, periodic; 1-d.
Field diff_quotient(const Field& f);
Field second_difference(const Field& f);

// --- space-time quadrature ---------------------------------------------------

// Slices at (possibly non-uniform) ascending times with trapezoid weights.
struct SliceSeries {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> slices;

  std::vector<double> trapezoid_weights() const;
};

SliceSeries to_series(const SpaceTimeField& f);

// Mixed norm^p over the series' time window:
//   sigma_t = 0: sum_k w_k X(u_k)^p
//   sigma_t > 0: adds the X-valued temporal Gagliardo double sum
// where X is the spatial Sobolev norm of order sigma_x (full or homogeneous).
// Returns one value per sigma_x; the expensive pair scan is shared.
std::vector<double> mixed_pow_multi(const SliceSeries& s, double sigma_t,
                                    std::span<const double> sigmas_x, double p,
                                    bool homogeneous, bool subgrid_completion = false,
                                    bool whole_line_tail = false);

double mixed_pow(const SliceSeries& s, double sigma_t, double sigma_x, double p,
                 bool homogeneous);

NormReport spacetime_sobolev_norm(const SpaceTimeField& f, double sigma_t, double sigma_x,
                                  double p, const Options& opt = {});

// --- spectral (dyadic) norms -------------------------------------------------

// sup_j 2^{sigma_x j} ||block_j f||_p over resolved blocks; the low/residual
// block is reported separately and excluded from the sup in homogeneous mode.
NormReport besov_space_norm(const Field& f, double sigma_x, double p,
                            const fourier::DyadicPartition& part);

// Chemin-Lerner variant: blocks filtered in x, L^p over (t,x).
NormReport besov_space_norm(const SpaceTimeField& f, double sigma_x, double p,
                            const fourier::DyadicPartition& part, bool apply_cutoff = true);

// Time-direction blocks, L^p over (t,x).
NormReport besov_time_norm(const SpaceTimeField& f, double sigma_t, double p,
                           const fourier::DyadicPartition& tpart, bool apply_cutoff = true);

// sup_{l,j} 2^{sigma_t l} 2^{sigma_x j} ||block_{l,j} f||_p (double dyadic array).
NormReport mixed_besov_norm(const SpaceTimeField& f, double sigma_t, double sigma_x, double p,
                            const fourier::DyadicPartition& tpart,
                            const fourier::DyadicPartition& xpart, bool apply_cutoff = true);

}  // namespace pme::norms
