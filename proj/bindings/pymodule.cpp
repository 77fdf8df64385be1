#include <cstring>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmelab/barenblatt.hpp"
#include "pmelab/exponents.hpp"
#include "pmelab/fourier.hpp"
#include "pmelab/kinetic.hpp"
#include "pmelab/norms.hpp"
#include "pmelab/runner.hpp"
#include "pmelab/scaling.hpp"
#include "pmelab/solver.hpp"
#include "pmelab/sweep.hpp"

namespace py = pybind11;
using namespace pme;

namespace {

Field field_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> arr,
                       double L) {
  if (arr.ndim() != 1) throw domain_error("expected a 1-d array of cell values");
  Field f(Grid(int(arr.shape(0)), L));
  std::copy(arr.data(), arr.data() + arr.shape(0), f.v.begin());
  return f;
}

// allocate a fresh owning array and copy; the pointer constructors of
// py::array_t only wrap the caller's memory
py::array_t<double> copy_to_array(const std::vector<double>& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{py::ssize_t(v.size())});
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::array_t<double> traj_to_array(const SpaceTimeField& u) {
  return copy_to_array(u.v).reshape({py::ssize_t(u.nt), py::ssize_t(u.grid.cells())});
}

py::dict exponent_dict(const exponents::ExponentSet& e) {
  py::dict d;
  d["p"] = e.p;
  d["kappa_t"] = e.kappa_t;
  d["kappa_x"] = e.kappa_x;
  d["source"] = exponents::to_string(e.source);
  d["valid"] = e.valid;
  if (!e.valid) d["reason"] = e.reason;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pmelab, m) {
  m.doc() = "Numerical laboratory for sharp space-time regularity of degenerate diffusion";

  // --- exponent formulas -----------------------------------------------------
  m.def("l1_exponents", [](double mm, double p) { return exponent_dict(exponents::l1_exponents(mm, p)); },
        py::arg("m"), py::arg("p"));
  m.def("l1_local_exponents",
        [](double mm, double s) { return exponent_dict(exponents::l1_local_exponents(mm, s)); },
        py::arg("m"), py::arg("s"));
  m.def("rho_exponents",
        [](double mm, double rho, double p, const std::string& kind, double mu) {
          const auto k = kind == "power" ? exponents::RhoKind::Power : exponents::RhoKind::Mixed;
          return exponent_dict(exponents::rho_exponents(mm, rho, p, k, mu));
        },
        py::arg("m"), py::arg("rho"), py::arg("p"), py::arg("kind") = "mixed",
        py::arg("mu") = 1.0);
  m.def("power_local_exponents", [](double mm, double mu) {
    const auto r = exponents::power_local_exponents(mm, mu);
    return py::make_tuple(r.sigma_x_sup, r.q_max);
  });
  m.def("averaging_exponents",
        [](double mm, double gamma, double mu, double rho, double s, bool time_only) {
          return exponent_dict(exponents::averaging_exponents(mm, gamma, mu, rho, s, time_only));
        },
        py::arg("m"), py::arg("gamma"), py::arg("mu"), py::arg("rho"), py::arg("s") = 1.0,
        py::arg("time_only") = false);
  m.def("prescribed_p_exponents",
        [](double mm, double gamma, double mu, double rho, double p) {
          const auto r = exponents::prescribed_p_exponents(mm, gamma, mu, rho, p);
          py::dict d;
          d["s"] = r.s;
          d["kappa_t"] = r.kappa_t;
          d["kappa_x"] = r.kappa_x;
          d["valid"] = r.valid;
          return d;
        });
  m.def("scaling_admissible",
        [](double mm, double mu, double p, double st, double sx) {
          const auto v = exponents::scaling_admissible(mm, mu, p, st, sx);
          py::dict d;
          d["admissible"] = v.admissible;
          if (!v.admissible) d["violated"] = v.violated;
          return d;
        });

  // --- self-similar profile --------------------------------------------------
  m.def("barenblatt_params", [](double mm, int d, double C) {
    const auto p = bb::params(mm, d, C);
    py::dict out;
    out["m"] = p.m;
    out["d"] = p.d;
    out["C"] = p.C;
    out["alpha"] = p.alpha;
    out["beta"] = p.beta;
    out["k"] = p.k;
    return out;
  }, py::arg("m"), py::arg("d") = 1, py::arg("C") = 1.0);
  m.def("barenblatt_eval", [](double mm, int d, double C, double t, double x, double mu) {
    return bb::eval(bb::params(mm, d, C), t, x, mu);
  }, py::arg("m"), py::arg("d"), py::arg("C"), py::arg("t"), py::arg("x"), py::arg("mu") = 1.0);
  m.def("barenblatt_support_radius", [](double mm, int d, double C, double t) {
    return bb::support_radius(bb::params(mm, d, C), t);
  });
  m.def("barenblatt_threshold", &bb::threshold, py::arg("m"), py::arg("mu"));
  m.def("barenblatt_sample", [](double mm, double C, int n, double L, double t, double mu) {
    const auto r = bb::sample(bb::params(mm, 1, C), Grid(n, L), t, mu);
    return copy_to_array(r.field.v);
  }, py::arg("m"), py::arg("C"), py::arg("n"), py::arg("L"), py::arg("t"), py::arg("mu") = 1.0);
  m.def("barenblatt_total_mass", [](double mm, int d, double C) {
    return bb::total_mass(bb::params(mm, d, C));
  });

  // --- solver ------------------------------------------------------------------
  m.def("solve",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> u0, double L, double m_,
           double T, double dt, double t_start) {
          const Field f = field_from_array(u0, L);
          solver::SolverOptions opts;
          opts.dt = dt;
          solver::SolveReport rep;
          const auto traj = solver::solve(f, solver::SourceFn{}, T, m_, opts, &rep, t_start);
          py::dict info;
          info["t0"] = traj.t0;
          info["dt"] = traj.dt;
          info["max_mass_defect_rel"] = rep.max_mass_defect_rel;
          info["support_warning"] = rep.support_warning;
          return py::make_tuple(traj_to_array(traj), info);
        },
        py::arg("u0"), py::arg("L"), py::arg("m"), py::arg("T"), py::arg("dt"),
        py::arg("t_start") = 0.0);

  // --- norms -------------------------------------------------------------------
  m.def("slobodeckii_seminorm",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f, double L,
           double sigma, double p, bool tail, bool completion) {
          norms::Options opt;
          opt.whole_line_tail = tail;
          opt.subgrid_completion = completion;
          return norms::slobodeckii_seminorm(field_from_array(f, L), sigma, p, opt).value;
        },
        py::arg("f"), py::arg("L"), py::arg("sigma"), py::arg("p"), py::arg("tail") = false,
        py::arg("completion") = false);
  m.def("sobolev_norm",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f, double L,
           double sigma, double p, bool homogeneous) {
          norms::Options opt;
          opt.homogeneous = homogeneous;
          return norms::sobolev_norm(field_from_array(f, L), sigma, p, opt).value;
        },
        py::arg("f"), py::arg("L"), py::arg("sigma"), py::arg("p"),
        py::arg("homogeneous") = false);
  m.def("besov_space_norm",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f, double L,
           double sigma, double p) {
          const Field fld = field_from_array(f, L);
          const auto part = fourier::build_partition(fld.grid.n[0], L,
                                                     fourier::DyadicPartition::Mode::Homogeneous);
          const auto rep = norms::besov_space_norm(fld, sigma, p, part);
          py::dict d;
          d["value"] = rep.value;
          d["residual_block"] = rep.residual_block;
          return d;
        },
        py::arg("f"), py::arg("L"), py::arg("sigma"), py::arg("p"));

  // --- experiment runner ---------------------------------------------------------
  m.def("run_config",
        [](const std::string& config_json, const std::string& out_dir, std::uint64_t seed) {
          const auto cfg = nlohmann::json::parse(config_json);
          const auto out = runner::run_config(cfg, out_dir, seed);
          return out.dump();
        },
        py::arg("config_json"), py::arg("out_dir"), py::arg("seed") = 0,
        "Run one experiment config (JSON string); returns the summary JSON.");

  py::register_exception<pme::domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<pme::numerical_error>(m, "NumericalError", PyExc_RuntimeError);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
