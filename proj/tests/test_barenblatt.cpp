#include <cmath>

#include "doctest.h"
#include "pmelab/barenblatt.hpp"

using namespace pme;

namespace {

// adaptive Simpson quadrature, test-side oracle
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) return left + right;
  return simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

}  // namespace

TEST_CASE("profile constants from (m, d)") {
  auto p = bb::params(2.0, 1);
  CHECK(p.alpha == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p.k == doctest::Approx(1.0 / 12.0).epsilon(1e-15));

  p = bb::params(2.0, 2);
  CHECK(p.alpha == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.beta == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.k == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

  p = bb::params(3.0, 1);
  CHECK(p.alpha == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.beta == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.k == doctest::Approx(1.0 / 12.0).epsilon(1e-15));

  // recomputing the derived constants reproduces them exactly
  const auto q = bb::params(p.m, p.d, p.C);
  CHECK(q.alpha == p.alpha);
  CHECK(q.beta == p.beta);
  CHECK(q.k == p.k);

  CHECK_THROWS_AS(bb::params(2.0, 3), pme::domain_error);
  CHECK_THROWS_AS(bb::params(0.5, 1), pme::domain_error);
}

TEST_CASE("pointwise evaluation") {
  const auto p = bb::params(2.0, 1);
  CHECK(bb::eval(p, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bb::eval(p, 1.0, std::sqrt(12.0) + 0.01) == 0.0);
  CHECK(bb::eval(p, 1.0, -4.0) == 0.0);
  CHECK_THROWS_AS(bb::eval(p, 0.0, 0.0), pme::domain_error);
  // power evaluation equals the plain power for the nonnegative profile
  CHECK(bb::eval(p, 2.0, 1.0, 2.0) ==
        doctest::Approx(bb::eval(p, 2.0, 1.0) * bb::eval(p, 2.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("support radius") {
  const auto p = bb::params(2.0, 1);
  CHECK(bb::support_radius(p, 1.0) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-15));
  CHECK(bb::support_radius(p, 4.0) / bb::support_radius(p, 1.0) ==
        doctest::Approx(std::pow(4.0, 1.0 / 3.0)).epsilon(1e-14));
  const auto p2 = bb::params(2.0, 2);
  CHECK(bb::support_radius(p2, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(bb::support_radius(p, -1.0), pme::domain_error);
}

TEST_CASE("sharp spatial threshold") {
  CHECK(bb::threshold(2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bb::threshold(3.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(bb::threshold(2.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("total mass: closed form against adaptive quadrature, t-independent") {
  const auto p = bb::params(2.0, 1);
  const double closed = bb::total_mass(p);
  CHECK(closed == doctest::Approx(8.0 * std::sqrt(3.0) / 3.0).epsilon(1e-13));
  for (double t : {0.5, 1.0, 2.0}) {
    const double R = bb::support_radius(p, t);
    const double q =
        integrate([&](double x) { return bb::eval(p, t, x); }, -R, R, 1e-12);
    CHECK(q == doctest::Approx(closed).epsilon(1e-8));
  }
  // another nonlinearity, quadrature only
  const auto p3 = bb::params(3.0, 1, 2.0);
  const double R3 = bb::support_radius(p3, 1.0);
  const double q3 = integrate([&](double x) { return bb::eval(p3, 1.0, x); }, -R3, R3, 1e-12);
  CHECK(bb::total_mass(p3) == doctest::Approx(q3).epsilon(1e-8));
}

TEST_CASE("sampling: values, nonnegativity, discrete mass refinement") {
  const auto p = bb::params(2.0, 1);
  const double closed = bb::total_mass(p);
  double prev_err = 1e9;
  for (int n : {256, 512, 1024}) {
    const Grid g(n, 16.0);
    const auto s = bb::sample(p, g, 1.0);
    CHECK(s.support_contained);
    for (int i = 0; i < n; ++i) {
      CHECK(s.field.v[i] >= 0.0);
      CHECK(s.field.v[i] == bb::eval(p, 1.0, g.node(0, i)));
    }
    const double err = std::abs(s.field.mass() - closed);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < closed * 1e-3);

  // warning flag when the support exceeds the torus
  const Grid small(64, 4.0);
  CHECK_FALSE(bb::sample(p, small, 1.0).support_contained);
}

TEST_CASE("self-similarity: lambda^alpha u(lambda t, lambda^beta x) = u(t, x)") {
  const auto p = bb::params(2.5, 1, 1.3);
  for (double lambda : {0.5, 2.0, 7.0}) {
    for (double x : {0.0, 0.3, 1.1, 2.9}) {
      const double lhs = std::pow(lambda, p.alpha) *
                         bb::eval(p, lambda * 1.7, std::pow(lambda, p.beta) * x);
      const double rhs = bb::eval(p, 1.7, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("2-d sampling mass matches the closed form") {
  const auto p = bb::params(2.0, 2);
  const Grid g(128, 128, 16.0, 16.0);
  const auto s = bb::sample(p, g, 1.0);
  CHECK(s.support_contained);
  CHECK(s.field.mass() == doctest::Approx(bb::total_mass(p)).epsilon(2e-3));
}
