#include "pmelab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace pme {

Grid::Grid(int nx, double Lx) : dim(1), n{nx, 1}, extent{Lx, 1.0} {
  if (nx < 4) throw domain_error("grid needs at least 4 cells per axis");
  if (!(Lx > 0)) throw domain_error("grid extent must be positive");
}

Grid::Grid(int nx, int ny, double Lx, double Ly) : dim(2), n{nx, ny}, extent{Lx, Ly} {
  if (nx < 4 || ny < 4) throw domain_error("grid needs at least 4 cells per axis");
  if (!(Lx > 0) || !(Ly > 0)) throw domain_error("grid extent must be positive");
}

void Field::require_finite(const char* what) const {
  for (double x : v)
    if (!std::isfinite(x)) throw numerical_error(std::string(what) + " contains non-finite values");
}

double Field::min() const {
  double m = v.empty() ? 0.0 : v[0];
  for (double x : v) m = std::min(m, x);
  return m;
}

double Field::max() const {
  double m = v.empty() ? 0.0 : v[0];
  for (double x : v) m = std::max(m, x);
  return m;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double Field::mass() const {
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value() * grid.cell_measure();
}

double Field::lp_norm(double p) const {
  KahanSum s;
  for (double x : v) s.add(std::pow(std::abs(x), p));
  return std::pow(s.value() * grid.cell_measure(), 1.0 / p);
}

double Field::l1_distance(const Field& other) const {
  if (!(grid == other.grid)) throw domain_error("fields live on different grids");
  KahanSum s;
  for (std::size_t i = 0; i < v.size(); ++i) s.add(std::abs(v[i] - other.v[i]));
  return s.value() * grid.cell_measure();
}

Field SpaceTimeField::slice_field(int k) const {
  Field f(grid);
  auto s = slice(k);
  std::copy(s.begin(), s.end(), f.v.begin());
  return f;
}

void SpaceTimeField::require_finite(const char* what) const {
  for (double x : v)
    if (!std::isfinite(x)) throw numerical_error(std::string(what) + " contains non-finite values");
}

void add_laplacian(const Grid& g, std::span<const double> in, std::span<double> out, double scale) {
  const int nx = g.n[0];
  if (g.dim == 1) {
    const double w = scale / (g.spacing(0) * g.spacing(0));
    for (int i = 0; i < nx; ++i) {
      const int l = i == 0 ? nx - 1 : i - 1;
      const int r = i == nx - 1 ? 0 : i + 1;
      out[i] += w * (in[l] - 2.0 * in[i] + in[r]);
    }
    return;
  }
  const int ny = g.n[1];
  const double wx = scale / (g.spacing(0) * g.spacing(0));
  const double wy = scale / (g.spacing(1) * g.spacing(1));
  for (int j = 0; j < ny; ++j) {
    const int d = j == 0 ? ny - 1 : j - 1;
    const int u = j == ny - 1 ? 0 : j + 1;
    for (int i = 0; i < nx; ++i) {
      const int l = i == 0 ? nx - 1 : i - 1;
      const int r = i == nx - 1 ? 0 : i + 1;
      const std::size_t c = std::size_t(j) * nx + i;
      out[c] += wx * (in[std::size_t(j) * nx + l] - 2.0 * in[c] + in[std::size_t(j) * nx + r]) +
                wy * (in[std::size_t(d) * nx + i] - 2.0 * in[c] + in[std::size_t(u) * nx + i]);
    }
  }
}

namespace {
constexpr char kMagic[4] = {'P', 'M', 'E', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void write_pmef(const std::string& path, const SpaceTimeField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, std::uint32_t(f.grid.dim));
  put<std::uint64_t>(os, std::uint64_t(f.nt));
  put<std::uint64_t>(os, std::uint64_t(f.grid.n[0]));
  put<std::uint64_t>(os, std::uint64_t(f.grid.n[1]));
  put<double>(os, f.t0);
  put<double>(os, f.dt);
  put<double>(os, f.grid.extent[0]);
  put<double>(os, f.grid.extent[1]);
  os.write(reinterpret_cast<const char*>(f.v.data()), std::streamsize(f.v.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

SpaceTimeField read_pmef(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a PMEF file: " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw std::runtime_error("unsupported PMEF version");
  const auto dim = get<std::uint32_t>(is);
  const auto nt = get<std::uint64_t>(is);
  const auto nx = get<std::uint64_t>(is);
  const auto ny = get<std::uint64_t>(is);
  const double t0 = get<double>(is);
  const double dt = get<double>(is);
  const double Lx = get<double>(is);
  const double Ly = get<double>(is);
  Grid g = dim == 1 ? Grid(int(nx), Lx) : Grid(int(nx), int(ny), Lx, Ly);
  SpaceTimeField f(g, t0, dt, int(nt));
  is.read(reinterpret_cast<char*>(f.v.data()), std::streamsize(f.v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated PMEF file: " + path);
  return f;
}

void write_trajectory_csv(const std::string& path, const SpaceTimeField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  char buf[128];
  if (f.grid.dim == 1) {
    os << "t,x,value\n";
    for (int k = 0; k < f.nt; ++k) {
      auto s = f.slice(k);
      for (int i = 0; i < f.grid.n[0]; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.time(k), f.grid.node(0, i), s[i]);
        os << buf;
      }
    }
  } else {
    os << "t,x,y,value\n";
    for (int k = 0; k < f.nt; ++k) {
      auto s = f.slice(k);
      for (int j = 0; j < f.grid.n[1]; ++j)
        for (int i = 0; i < f.grid.n[0]; ++i) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", f.time(k), f.grid.node(0, i),
                        f.grid.node(1, j), s[std::size_t(j) * f.grid.n[0] + i]);
          os << buf;
        }
    }
  }
}

void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  char buf[128];
  if (f.grid.dim == 1) {
    os << "x,value\n";
    for (int i = 0; i < f.grid.n[0]; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid.node(0, i), f.v[i]);
      os << buf;
    }
  } else {
    os << "x,y,value\n";
    for (int j = 0; j < f.grid.n[1]; ++j)
      for (int i = 0; i < f.grid.n[0]; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.grid.node(0, i), f.grid.node(1, j),
                      f.at(i, j));
        os << buf;
      }
  }
}

}  // namespace pme
