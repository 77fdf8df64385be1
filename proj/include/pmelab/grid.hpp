#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pmelab/common.hpp"

namespace pme {

// Uniform periodic grid over [-L/2, L/2)^dim with cell-centered nodes
// x_i = -L/2 + (i + 1/2) h.
struct Grid {
  int dim = 1;
  std::array<int, 2> n{4, 1};
  std::array<double, 2> extent{1.0, 1.0};

  Grid() = default;
  Grid(int nx, double Lx);
  Grid(int nx, int ny, double Lx, double Ly);

  double spacing(int axis = 0) const { return extent[axis] / n[axis]; }
  double node(int axis, int i) const { return -0.5 * extent[axis] + (i + 0.5) * spacing(axis); }
  std::size_t cells() const { return dim == 1 ? std::size_t(n[0]) : std::size_t(n[0]) * n[1]; }
  // Cell measure h (1-d) or h_x h_y (2-d).
  double cell_measure() const { return dim == 1 ? spacing(0) : spacing(0) * spacing(1); }
  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && extent == o.extent;
  }
};

struct Field {
  Grid grid;
  std::vector<double> v;  // row-major, index = iy*n[0] + ix in 2-d

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), v(g.cells(), fill) {}

  double& at(int ix) { return v[ix]; }
  double at(int ix) const { return v[ix]; }
  double& at(int ix, int iy) { return v[std::size_t(iy) * grid.n[0] + ix]; }
  double at(int ix, int iy) const { return v[std::size_t(iy) * grid.n[0] + ix]; }

  void require_finite(const char* what = "field") const;
  double min() const;
  double max() const;
  double max_abs() const;
  // Discrete integral sum(v) * cell_measure, compensated.
  double mass() const;
  double lp_norm(double p) const;  // (sum |v|^p * measure)^(1/p)
  double l1_distance(const Field& other) const;
};

// Trajectory on a uniform time grid t_k = t0 + k dt, k = 0..nt-1.
struct SpaceTimeField {
  Grid grid;
  double t0 = 0.0;
  double dt = 0.0;
  int nt = 0;
  std::vector<double> v;  // [nt][cells]

  SpaceTimeField() = default;
  SpaceTimeField(const Grid& g, double t0_, double dt_, int nt_)
      : grid(g), t0(t0_), dt(dt_), nt(nt_), v(std::size_t(nt_) * g.cells(), 0.0) {}

  double time(int k) const { return t0 + k * dt; }
  std::span<double> slice(int k) {
    return {v.data() + std::size_t(k) * grid.cells(), grid.cells()};
  }
  std::span<const double> slice(int k) const {
    return {v.data() + std::size_t(k) * grid.cells(), grid.cells()};
  }
  Field slice_field(int k) const;
  void require_finite(const char* what = "trajectory") const;
};

// Centered second difference with periodic wrap; out += scale * Lap(in).
void add_laplacian(const Grid& g, std::span<const double> in, std::span<double> out, double scale);

// Signed power |u|^{m-1} u.
inline double signed_power(double u, double m) {
  if (u == 0.0) return 0.0;
  double a = std::abs(u);
  double p = std::pow(a, m);
  return u > 0 ? p : -p;
}

// Binary trajectory container, magic "PMEF".
void write_pmef(const std::string& path, const SpaceTimeField& f);
SpaceTimeField read_pmef(const std::string& path);
void write_trajectory_csv(const std::string& path, const SpaceTimeField& f);
void write_field_csv(const std::string& path, const Field& f);

}  // namespace pme
