#include "pmelab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "pmelab/barenblatt.hpp"
#include "pmelab/common.hpp"
#include "pmelab/exponents.hpp"
#include "pmelab/fourier.hpp"
#include "pmelab/kinetic.hpp"
#include "pmelab/norms.hpp"
#include "pmelab/scaling.hpp"
#include "pmelab/solver.hpp"
#include "pmelab/sweep.hpp"

namespace pme::runner {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& cfg, const std::set<std::string>& allowed) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (!allowed.count(it.key())) throw domain_error("unknown key: " + it.key());
}

double need_num(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw domain_error("missing key: " + key);
  if (!cfg[key].is_number()) throw domain_error("key must be numeric: " + key);
  return cfg[key].get<double>();
}

double get_num(const json& cfg, const std::string& key, double dflt) {
  if (!cfg.contains(key)) return dflt;
  if (!cfg[key].is_number()) throw domain_error("key must be numeric: " + key);
  return cfg[key].get<double>();
}

std::string get_str(const json& cfg, const std::string& key, const std::string& dflt) {
  if (!cfg.contains(key)) return dflt;
  return cfg[key].get<std::string>();
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

json envelope(const json& cfg, const std::string& kind) {
  const std::string dumped = cfg.dump();
  json j;
  j["artifact_version"] = "v1";
  j["config_hash"] = hex64(fnv1a64({dumped.data(), dumped.size()}));
  j["kind"] = kind;
  return j;
}

json exponent_json(const exponents::ExponentSet& e) {
  json j;
  j["p"] = e.p;
  j["kappa_t"] = e.kappa_t;
  j["kappa_x"] = e.kappa_x;
  j["source"] = exponents::to_string(e.source);
  j["valid"] = e.valid;
  if (!e.valid) j["reason"] = e.reason;
  return j;
}

json run_exponents(const json& cfg) {
  check_keys(cfg, {"kind", "seed", "formula", "m", "p", "s", "rho", "mu", "gamma", "p_tilde",
                   "sigma_t", "sigma_x", "time_only"});
  const std::string formula = get_str(cfg, "formula", "l1");
  const double m = need_num(cfg, "m");
  json out;
  if (formula == "l1") {
    out = exponent_json(exponents::l1_exponents(m, need_num(cfg, "p")));
  } else if (formula == "l1_local") {
    out = exponent_json(exponents::l1_local_exponents(m, need_num(cfg, "s")));
  } else if (formula == "rho_power" || formula == "rho_mixed") {
    const auto kind =
        formula == "rho_power" ? exponents::RhoKind::Power : exponents::RhoKind::Mixed;
    out = exponent_json(exponents::rho_exponents(m, need_num(cfg, "rho"), need_num(cfg, "p"), kind,
                                                 get_num(cfg, "mu", 1.0)));
  } else if (formula == "power_local") {
    const auto r = exponents::power_local_exponents(m, need_num(cfg, "mu"));
    out["sigma_x_sup"] = r.sigma_x_sup;
    out["q_max"] = r.q_max;
  } else if (formula == "averaging" || formula == "averaging_time") {
    const bool time_only = formula == "averaging_time" || cfg.value("time_only", false);
    out = exponent_json(exponents::averaging_exponents(m, need_num(cfg, "gamma"),
                                                       need_num(cfg, "mu"), need_num(cfg, "rho"),
                                                       get_num(cfg, "s", 1.0), time_only));
  } else if (formula == "prescribed_p") {
    const auto r = exponents::prescribed_p_exponents(m, need_num(cfg, "gamma"),
                                                     need_num(cfg, "mu"), need_num(cfg, "rho"),
                                                     need_num(cfg, "p_tilde"));
    out["s"] = r.s;
    out["kappa_t"] = r.kappa_t;
    out["kappa_x"] = r.kappa_x;
    out["valid"] = r.valid;
    if (!r.valid) out["reason"] = r.reason;
  } else if (formula == "scaling") {
    const auto v = exponents::scaling_admissible(m, need_num(cfg, "mu"), need_num(cfg, "p"),
                                                 need_num(cfg, "sigma_t"), need_num(cfg, "sigma_x"));
    out["admissible"] = v.admissible;
    if (!v.admissible) out["violated"] = v.violated;
  } else {
    throw domain_error("unknown formula: " + formula);
  }
  return out;
}

json run_barenblatt(const json& cfg, const std::string& out_dir) {
  check_keys(cfg, {"kind", "seed", "m", "d", "C", "mu", "t", "n", "L"});
  const double m = need_num(cfg, "m");
  const int d = int(get_num(cfg, "d", 1));
  const auto prof = bb::params(m, d, get_num(cfg, "C", 1.0));
  const double t = get_num(cfg, "t", 1.0);
  const double mu = get_num(cfg, "mu", 1.0);
  const int n = int(get_num(cfg, "n", 256));
  const double L = get_num(cfg, "L", 16.0);
  const Grid g = d == 1 ? Grid(n, L) : Grid(n, n, L, L);
  const auto sample = bb::sample(prof, g, t, mu);
  write_field_csv((fs::path(out_dir) / "field.csv").string(), sample.field);
  json out;
  out["m"] = prof.m;
  out["d"] = prof.d;
  out["C"] = prof.C;
  out["alpha"] = prof.alpha;
  out["beta"] = prof.beta;
  out["k"] = prof.k;
  out["t"] = t;
  out["mu"] = mu;
  out["support_radius"] = bb::support_radius(prof, t);
  out["support_contained"] = sample.support_contained;
  out["total_mass_closed_form"] = bb::total_mass(prof);
  out["sampled_mass"] = sample.field.mass();
  out["threshold_sigma"] = bb::threshold(m, mu);
  out["field_csv"] = "field.csv";
  return out;
}

Field initial_field(const json& cfg, const Grid& g, double m) {
  const std::string type = get_str(cfg, "type", "barenblatt");
  if (type == "barenblatt") {
    const auto prof = bb::params(m, g.dim, get_num(cfg, "C", 1.0));
    return bb::sample(prof, g, need_num(cfg, "t0"), get_num(cfg, "mu", 1.0)).field;
  }
  if (type == "bump") {
    const double amp = get_num(cfg, "amp", 1.0);
    const double width = get_num(cfg, "width", 0.25 * g.extent[0]);
    Field f(g);
    for (int i = 0; i < g.n[0]; ++i) {
      const double z = g.node(0, i) / width;
      f.v[i] = z * z < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0;
    }
    return f;
  }
  throw domain_error("unknown initial data type: " + type);
}

json run_solve(const json& cfg, const std::string& out_dir) {
  check_keys(cfg, {"kind", "seed", "m", "n", "L", "T", "dt", "u0", "newton_tol", "eps", "format",
                   "t_start"});
  const double m = need_num(cfg, "m");
  const int n = int(need_num(cfg, "n"));
  const Grid g(n, need_num(cfg, "L"));
  solver::SolverOptions opts;
  opts.dt = need_num(cfg, "dt");
  opts.newton_tol = get_num(cfg, "newton_tol", 1e-10);
  opts.eps = get_num(cfg, "eps", 1e-12);
  if (!cfg.contains("u0")) throw domain_error("missing key: u0");
  double t_start = get_num(cfg, "t_start", 0.0);
  if (cfg["u0"].is_object() && cfg["u0"].value("type", "barenblatt") == "barenblatt" &&
      !cfg.contains("t_start"))
    t_start = cfg["u0"].contains("t0") ? cfg["u0"]["t0"].get<double>() : 0.0;
  const Field u0 = initial_field(cfg["u0"], g, m);
  solver::SolveReport rep;
  const auto traj = solver::solve(u0, solver::SourceFn{}, need_num(cfg, "T"), m, opts, &rep,
                                  t_start);
  const std::string fmt = get_str(cfg, "format", "pmef");
  json out;
  if (fmt == "pmef" || fmt == "both") {
    write_pmef((fs::path(out_dir) / "trajectory.pmef").string(), traj);
    out["trajectory_pmef"] = "trajectory.pmef";
  }
  if (fmt == "csv" || fmt == "both") {
    write_trajectory_csv((fs::path(out_dir) / "trajectory.csv").string(), traj);
    out["trajectory_csv"] = "trajectory.csv";
  }
  out["nt"] = traj.nt;
  out["max_mass_defect_rel"] = rep.max_mass_defect_rel;
  out["max_newton_residual"] = rep.max_residual;
  out["support_warning"] = rep.support_warning;
  int iters = 0;
  for (int k : rep.newton_iters) iters = std::max(iters, k);
  out["max_newton_iters"] = iters;
  return out;
}

SpaceTimeField load_or_make_trajectory(const json& cfg, double m) {
  if (cfg.contains("trajectory")) return read_pmef(cfg["trajectory"].get<std::string>());
  // sampled profile trajectory on a uniform window
  const int n = int(need_num(cfg, "n"));
  const Grid g(n, need_num(cfg, "L"));
  const double t0 = need_num(cfg, "t0");
  const double t1 = need_num(cfg, "t1");
  const int nt = int(get_num(cfg, "nt", 33));
  const auto prof = bb::params(m, 1, get_num(cfg, "C", 1.0));
  const double mu = get_num(cfg, "mu", 1.0);
  SpaceTimeField f(g, t0, (t1 - t0) / (nt - 1), nt);
  for (int k = 0; k < nt; ++k) {
    auto s = f.slice(k);
    for (int i = 0; i < g.n[0]; ++i) s[i] = bb::eval(prof, f.time(k), g.node(0, i), mu);
  }
  return f;
}

json run_norms(const json& cfg, const std::string&) {
  check_keys(cfg, {"kind", "seed", "norm", "m", "n", "L", "t0", "t1", "nt", "C", "mu",
                   "trajectory", "sigma", "sigma_t", "sigma_x", "p", "homogeneous", "tail"});
  const std::string which = get_str(cfg, "norm", "slobodeckii");
  const double p = get_num(cfg, "p", 2.0);
  json out;
  norms::Options no;
  no.homogeneous = cfg.value("homogeneous", false);
  no.whole_line_tail = cfg.value("tail", false);
  no.refinement_diag = true;
  if (which == "slobodeckii" || which == "sobolev" || which == "besov") {
    const double m = get_num(cfg, "m", 2.0);
    const int n = int(need_num(cfg, "n"));
    const Grid g(n, need_num(cfg, "L"));
    const auto prof = bb::params(m, 1, get_num(cfg, "C", 1.0));
    const auto f = bb::sample(prof, g, need_num(cfg, "t0"), get_num(cfg, "mu", 1.0)).field;
    norms::NormReport r;
    if (which == "slobodeckii")
      r = norms::slobodeckii_seminorm(f, need_num(cfg, "sigma"), p, no);
    else if (which == "sobolev")
      r = norms::sobolev_norm(f, need_num(cfg, "sigma"), p, no);
    else {
      const auto part = fourier::build_partition(n, g.extent[0],
                                                 fourier::DyadicPartition::Mode::Homogeneous);
      r = norms::besov_space_norm(f, need_num(cfg, "sigma"), p, part);
    }
    out["value"] = r.value;
    out["method"] = r.method;
    out["refinement_delta"] = r.refinement_delta;
    out["residual_block"] = r.residual_block;
  } else if (which == "spacetime" || which == "mixed_besov") {
    const double m = get_num(cfg, "m", 2.0);
    const auto traj = load_or_make_trajectory(cfg, m);
    norms::NormReport r;
    if (which == "spacetime") {
      r = norms::spacetime_sobolev_norm(traj, need_num(cfg, "sigma_t"), need_num(cfg, "sigma_x"),
                                        p, no);
    } else {
      const auto tp = fourier::build_partition(traj.nt, traj.nt * traj.dt,
                                               fourier::DyadicPartition::Mode::Homogeneous);
      const auto xp = fourier::build_partition(traj.grid.n[0], traj.grid.extent[0],
                                               fourier::DyadicPartition::Mode::Homogeneous);
      r = norms::mixed_besov_norm(traj, need_num(cfg, "sigma_t"), need_num(cfg, "sigma_x"), p, tp,
                                  xp);
    }
    out["value"] = r.value;
    out["method"] = r.method;
    out["cutoff_share"] = r.cutoff_share;
    out["residual_block"] = r.residual_block;
  } else {
    throw domain_error("unknown norm: " + which);
  }
  out["p"] = p;
  return out;
}

json run_sweep(const json& cfg, const std::string& out_dir) {
  check_keys(cfg, {"kind", "seed", "family", "m", "mu", "C", "L", "T", "resolutions", "sigmas",
                   "p", "mode", "sigma_t", "predicted", "slices_per_octave", "t_floor",
                   "dt_scale", "nt"});
  const std::string family_name = get_str(cfg, "family", "barenblatt");
  if (!cfg.contains("resolutions") || !cfg["resolutions"].is_array())
    throw domain_error("missing key: resolutions");
  if (!cfg.contains("sigmas") || !cfg["sigmas"].is_array())
    throw domain_error("missing key: sigmas");
  std::vector<int> resolutions;
  for (const auto& v : cfg["resolutions"]) resolutions.push_back(v.get<int>());
  std::vector<double> sigmas;
  for (const auto& v : cfg["sigmas"]) sigmas.push_back(v.get<double>());

  sweep::SweepOptions opt;
  opt.p = get_num(cfg, "p", 2.0);
  opt.sigma_t = get_num(cfg, "sigma_t", 0.0);
  opt.predicted = get_num(cfg, "predicted", std::numeric_limits<double>::quiet_NaN());
  opt.mode = get_str(cfg, "mode", "spatial") == "mixed" ? sweep::Mode::Mixed
                                                        : sweep::Mode::SpatialLp;
  sweep::Family fam;
  const double m = get_num(cfg, "m", 2.0);
  const double mu = get_num(cfg, "mu", 1.0);
  const double C = get_num(cfg, "C", 1.0);
  const double L = get_num(cfg, "L", 8.0);
  const double T = get_num(cfg, "T", 0.5);
  if (family_name == "barenblatt")
    fam = sweep::barenblatt_family(m, mu, C, L, T, resolutions,
                                   int(get_num(cfg, "slices_per_octave", 4)),
                                   get_num(cfg, "t_floor", 1e-12));
  else if (family_name == "smooth_bump")
    fam = sweep::smooth_bump_family(L, T, resolutions, int(get_num(cfg, "nt", 9)));
  else if (family_name == "barenblatt_mixed")
    fam = sweep::barenblatt_mixed_family(m, mu, C, L, T, resolutions, get_num(cfg, "dt_scale", 1.0));
  else
    throw domain_error("unknown family: " + family_name);

  const auto res = sweep::norm_sweep(fam, sigmas, opt);

  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  csv << "sigma,h,dt,norm,slope,slope_err\n";
  char buf[160];
  for (const auto& r : res.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.sigma, r.h, r.dt,
                  r.norm, r.slope, r.slope_err);
    csv << buf;
  }
  json out;
  out["detected"] = res.detected;
  if (res.detected) {
    out["threshold"] = res.threshold;
    out["ci_lo"] = res.ci_lo;
    out["ci_hi"] = res.ci_hi;
  } else {
    out["threshold"] = nullptr;
  }
  if (std::isfinite(res.predicted)) out["predicted"] = res.predicted;
  out["sweep_csv"] = "sweep.csv";
  return out;
}

json run_kinetic(const json& cfg, const std::string& out_dir) {
  check_keys(cfg, {"kind", "seed", "m", "n", "L", "T", "dt", "t0", "C", "mu", "nv", "gamma",
                   "v0_list", "trajectory"});
  const double m = need_num(cfg, "m");
  SpaceTimeField traj;
  if (cfg.contains("trajectory")) {
    traj = read_pmef(cfg["trajectory"].get<std::string>());
  } else {
    const Grid g(int(need_num(cfg, "n")), need_num(cfg, "L"));
    const auto prof = bb::params(m, 1, get_num(cfg, "C", 1.0));
    const double t0 = get_num(cfg, "t0", 1.0);
    const Field u0 = bb::sample(prof, g, t0, 1.0).field;
    solver::SolverOptions opts;
    opts.dt = need_num(cfg, "dt");
    traj = solver::solve(u0, solver::SourceFn{}, need_num(cfg, "T"), m, opts, nullptr, t0);
  }
  const auto vg = kinetic::suggest_vgrid(traj, int(get_num(cfg, "nv", 64)));
  const auto qm = kinetic::defect_measure(traj, m, nullptr, vg);

  const auto totals = qm.bin_totals();
  std::ofstream csv(fs::path(out_dir) / "qbins.csv");
  csv << "v_center,mass\n";
  char buf[80];
  for (int b = 0; b < vg.nv; ++b) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", vg.center(b), totals[b]);
    csv << buf;
  }

  json out;
  out["total_signed"] = qm.total_signed();
  out["positive_mass"] = qm.positive_mass();
  out["negative_mass"] = qm.negative_mass();
  out["clipped_fraction"] = qm.clipped_fraction();
  const double gamma = get_num(cfg, "gamma", 0.5);
  out["singular_moment_gamma"] = gamma;
  out["singular_moment"] = kinetic::singular_moment(qm, gamma);
  const double rhs = traj.slice_field(0).lp_norm(1.0);
  json levels = json::array();
  if (cfg.contains("v0_list")) {
    for (const auto& v : cfg["v0_list"]) {
      const auto verdict = kinetic::check_level_mass(qm, v.get<double>(), rhs);
      levels.push_back({{"v0", v.get<double>()},
                        {"value", verdict.value},
                        {"rhs", verdict.rhs},
                        {"holds", verdict.holds}});
    }
  }
  out["level_mass"] = levels;
  out["qbins_csv"] = "qbins.csv";
  return out;
}

json run_scaling_check(const json& cfg, const std::string&) {
  check_keys(cfg, {"kind", "seed", "m", "mu", "p", "sigma_t", "sigma_x", "eta", "transform", "n",
                   "L", "t0", "t1", "nt", "C"});
  const double m = need_num(cfg, "m");
  const auto traj = load_or_make_trajectory(cfg, m);
  const auto kind = get_str(cfg, "transform", "time") == "space" ? scaling::Kind::Space
                                                                 : scaling::Kind::Time;
  const auto rep =
      scaling::verify_norm_scaling(traj, m, get_num(cfg, "mu", 1.0), get_num(cfg, "p", 2.0),
                                   get_num(cfg, "sigma_t", 0.0), get_num(cfg, "sigma_x", 0.0),
                                   need_num(cfg, "eta"), kind);
  json out;
  out["measured"] = rep.measured;
  out["predicted"] = rep.predicted;
  out["ratio"] = rep.ratio;
  out["inconclusive"] = rep.inconclusive;
  out["pass"] = rep.pass;
  return out;
}

json run_appendix_b(const json& cfg, const std::string&) {
  check_keys(cfg, {"kind", "seed", "m", "v", "alphas", "l_lo", "l_hi", "j_lo", "j_hi"});
  const double m = get_num(cfg, "m", 2.0);
  json out;
  json bounds = json::array();
  if (cfg.contains("alphas")) {
    for (const auto& a : cfg["alphas"]) {
      const int at = a.at(0).get<int>();
      const int ax = a.at(1).get<int>();
      const auto r = fourier::verify_multiplier_bound(m, at, ax);
      bounds.push_back({{"alpha", {at, ax}},
                        {"max_normalized", r.max_normalized},
                        {"richardson_defect", r.worst_richardson_defect}});
    }
  }
  out["derivative_bounds"] = bounds;
  fourier::UniformMultiplierOptions uopt;
  uopt.m = m;
  uopt.v = get_num(cfg, "v", 1.0);
  const auto u = fourier::verify_uniform_multiplier(
      fourier::UniformSymbol::InvL, int(get_num(cfg, "l_lo", -3)), int(get_num(cfg, "l_hi", 3)),
      int(get_num(cfg, "j_lo", -3)), int(get_num(cfg, "j_hi", 3)), uopt);
  json table = json::array();
  for (const auto& row : u.table)
    table.push_back({{"l", row.l}, {"j", row.j}, {"kernel_l1", row.kernel_l1}});
  out["uniform_table"] = table;
  out["max_over_min"] = u.max_over_min;
  out["worst_boundary_mass"] = u.worst_boundary_mass;
  return out;
}

}  // namespace

json run_config(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  if (!cfg.is_object()) throw domain_error("config must be a JSON object");
  if (!cfg.contains("kind")) throw domain_error("missing key: kind");
  const std::string kind = cfg["kind"].get<std::string>();
  fs::create_directories(out_dir);
  (void)seed;

  json payload;
  if (kind == "exponents")
    payload = run_exponents(cfg);
  else if (kind == "barenblatt")
    payload = run_barenblatt(cfg, out_dir);
  else if (kind == "solve")
    payload = run_solve(cfg, out_dir);
  else if (kind == "norms")
    payload = run_norms(cfg, out_dir);
  else if (kind == "sweep")
    payload = run_sweep(cfg, out_dir);
  else if (kind == "kinetic")
    payload = run_kinetic(cfg, out_dir);
  else if (kind == "scaling-check")
    payload = run_scaling_check(cfg, out_dir);
  else if (kind == "verify-appendix-b")
    payload = run_appendix_b(cfg, out_dir);
  else
    throw domain_error("unknown kind: " + kind);

  json out = envelope(cfg, kind);
  out["result"] = payload;
  write_json((fs::path(out_dir) / "summary.json").string(), out);
  return out;
}

int run(const std::string& config_path, const std::string& out_dir, int threads,
        std::uint64_t seed) {
  set_thread_count(threads);
  json cfg;
  {
    std::ifstream is(config_path);
    if (!is) {
      fprintf(stderr, "cannot open config: %s\n", config_path.c_str());
      return 2;
    }
    try {
      is >> cfg;
    } catch (const std::exception& e) {
      fprintf(stderr, "config parse error: %s\n", e.what());
      return 2;
    }
  }
  try {
    run_config(cfg, out_dir, seed);
    return 0;
  } catch (const domain_error& e) {
    fs::create_directories(out_dir);
    write_json((fs::path(out_dir) / "error.json").string(),
               {{"error", e.what()}, {"class", "validation"}});
    fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fs::create_directories(out_dir);
    write_json((fs::path(out_dir) / "error.json").string(),
               {{"error", e.what()}, {"class", "numerical"}});
    fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}

int compare(const std::string& run_a, const std::string& run_b, const std::string& source_a,
            const std::string& source_b, const std::string& out_dir) {
  try {
    const auto ua = read_pmef(run_a);
    const auto ub = read_pmef(run_b);
    SpaceTimeField sa, sb;
    const bool have_sources = !source_a.empty() && !source_b.empty();
    if (have_sources) {
      sa = read_pmef(source_a);
      sb = read_pmef(source_b);
    }
    solver::ContractionReport rep;
    try {
      rep = solver::check_contraction(ua, ub, have_sources ? &sa : nullptr,
                                      have_sources ? &sb : nullptr);
    } catch (const domain_error& e) {
      fprintf(stderr, "incompatible runs: %s\n", e.what());
      return 2;
    }
    fs::create_directories(out_dir);
    const std::string inputs = run_a + "\n" + run_b + "\n" + source_a + "\n" + source_b;
    write_json((fs::path(out_dir) / "compare.json").string(),
               {{"artifact_version", "v1"},
                {"config_hash", hex64(fnv1a64({inputs.data(), inputs.size()}))},
                {"lhs", rep.lhs},
                {"rhs", rep.rhs},
                {"slack", rep.slack},
                {"holds", rep.holds}});
    return 0;
  } catch (const std::exception& e) {
    fprintf(stderr, "comparison failed: %s\n", e.what());
    return 3;
  }
}

}  // namespace pme::runner
