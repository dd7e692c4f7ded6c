#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "graphmass/errors.hpp"
#include "graphmass/expr.hpp"
#include "graphmass/fd.hpp"
#include "graphmass/radial.hpp"

using namespace graphmass;
using namespace graphmass::jets;

namespace {

const std::vector<std::string> kM = {"m"};

Jet3 jet_of(const char* text, int n, std::vector<double> x, ParamBindings params = {}) {
  std::vector<std::string> names;
  for (auto& [k, v] : params) names.push_back(k);
  return eval_jet(parse(text, n, names), params, x);
}

double max_abs_diff(const Jet3& a, const Jet3& b) {
  double d = std::abs(a.value() - b.value());
  for (std::size_t i = 0; i < a.grad_span().size(); ++i) d = std::max(d, std::abs(a.grad_span()[i] - b.grad_span()[i]));
  for (std::size_t i = 0; i < a.hess_packed().size(); ++i)
    d = std::max(d, std::abs(a.hess_packed()[i] - b.hess_packed()[i]));
  for (std::size_t i = 0; i < a.third_packed().size(); ++i)
    d = std::max(d, std::abs(a.third_packed()[i] - b.third_packed()[i]));
  return d;
}

}  // namespace

TEST_CASE("parse accepts the documented forms") {
  const Expr e = parse("sqrt(8*m*(r-2*m))", 3, kM);
  CHECK(e.uses_radius());
  CHECK(e.parameters() == std::vector<std::string>{"m"});
  CHECK(parse("0", 2).root()->kind == NodeKind::Constant);
  CHECK_NOTHROW(parse("x1*x2 + exp(-r^2)", 4));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("x1 + ", 2), ParseError);
  CHECK_THROWS_AS(parse("x3", 2), ParseError);
  CHECK_THROWS_AS(parse("q*x1", 2), ParseError);
  CHECK_THROWS_AS(parse("x1^x2", 2), ParseError);
  try {
    parse("x1 + $", 2);
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("print then parse is structurally stable") {
  for (const char* text : {"sqrt(8*m*(r-2*m))", "x1*x2 + exp(-r^2)", "-x1^-2.5/(1+cos(x2))", "log(2+sin(x1)*x3)"}) {
    const Expr a = parse(text, 3, kM);
    const Expr b = parse(to_string(a), 3, kM);
    CHECK(structurally_equal(a, b));
  }
}

TEST_CASE("unbound parameter is rejected") {
  CHECK_THROWS(eval_jet(parse("m*x1", 1, kM), {}, std::vector<double>{1.0}));
}

TEST_CASE("polynomial jet") {
  const Jet3 j = jet_of("x1^2 + x2^2", 2, {1, 2});
  CHECK(j.value() == 5.0);
  CHECK(j.grad(0) == 2.0);
  CHECK(j.grad(1) == 4.0);
  CHECK(j.hess(0, 0) == 2.0);
  CHECK(j.hess(1, 1) == 2.0);
  CHECK(j.hess(0, 1) == 0.0);
  for (double t : j.third_packed()) CHECK(t == 0.0);
}

TEST_CASE("domain errors name the node") {
  CHECK_THROWS_AS(jet_of("log(x1)", 1, {-1.0}), DomainError);
  CHECK_THROWS_AS(jet_of("sqrt(x1)", 1, {-1.0}), DomainError);
  CHECK_THROWS_AS(jet_of("1/x1", 1, {0.0}), DomainError);
  CHECK_THROWS_AS(jet_of("r", 2, {0.0, 0.0}), DomainError);
}

TEST_CASE("Schwarzschild n=3 expression jet matches the CAS oracle") {
  // sympy values for f = sqrt(8m(r - 2m)), m = 1, at (1, 2, 2)
  const Jet3 j = jet_of("sqrt(8*m*(r-2*m))", 3, {1, 2, 2}, {{"m", 1.0}});
  CHECK(j.value() == doctest::Approx(2.8284271247461900976).epsilon(1e-14));
  CHECK(j.grad(0) == doctest::Approx(0.47140452079103168293).epsilon(1e-14));
  CHECK(j.grad(1) == doctest::Approx(0.94280904158206336587).epsilon(1e-14));
  CHECK(j.grad(2) == doctest::Approx(0.94280904158206336587).epsilon(1e-14));
  CHECK(j.hess(0, 0) == doctest::Approx(0.34045882057130065990).epsilon(1e-13));
  CHECK(j.hess(0, 1) == doctest::Approx(-0.26189140043946204607).epsilon(1e-13));
  CHECK(j.hess(0, 2) == doctest::Approx(-0.26189140043946204607).epsilon(1e-13));
  CHECK(j.hess(1, 1) == doctest::Approx(-0.052378280087892409215).epsilon(1e-13));
  CHECK(j.hess(1, 2) == doctest::Approx(-0.52378280087892409215).epsilon(1e-13));
  CHECK(j.third(0, 0, 0) == doctest::Approx(-0.30990482385336342119).epsilon(1e-12));
  CHECK(j.third(0, 1, 2) == doctest::Approx(0.33172910722331859169).epsilon(1e-12));
  CHECK(j.third(1, 1, 2) == doctest::Approx(0.40156681400717513731).epsilon(1e-12));
  CHECK(j.third(2, 2, 2) == doctest::Approx(-0.12221598687174895483).epsilon(1e-12));
  CHECK(j.third(2, 1, 0) == j.third(0, 1, 2));
}

TEST_CASE("expression jet at (3,0,0) has f_r = sqrt(2m/(r-2m)) along x") {
  const Jet3 j = jet_of("sqrt(8*1*(r-2))", 3, {3, 0, 0});
  CHECK(j.value() == doctest::Approx(std::sqrt(8.0)));
  CHECK(j.grad(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(j.grad(1) == 0.0);
}

TEST_CASE("radial jet agrees with the expression jet") {
  const RadialProfile p = schwarzschild_profile(3, 1.0);
  const Expr e = parse("sqrt(8*m*(r-2*m))", 3, kM);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x = {u(rng), u(rng), u(rng)};
    if (std::hypot(x[0], x[1], x[2]) < 2.1) continue;
    const Jet3 a = radial_jet(p, x);
    const Jet3 b = eval_jet(e, {{"m", 1.0}}, x);
    CHECK(max_abs_diff(a, b) <= 1e-10 * (1.0 + std::abs(b.value())));
  }
}

TEST_CASE("radial jet of r^2 and of a constant") {
  RadialProfile sq{[](double r) { return r * r; }, [](double r) { return 2 * r; }, [](double) { return 2.0; },
                   [](double) { return 0.0; }, 0.0, "r^2"};
  const Jet3 j = radial_jet(sq, std::vector<double>{0, 0, 3});
  CHECK(j.grad(2) == doctest::Approx(6.0));
  CHECK(j.hess(0, 0) == doctest::Approx(2.0));
  CHECK(j.hess(2, 2) == doctest::Approx(2.0));
  CHECK(std::abs(j.hess(0, 2)) < 1e-15);
  for (double t : j.third_packed()) CHECK(std::abs(t) < 1e-14);

  RadialProfile c{[](double) { return 4.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                  [](double) { return 0.0; }, 0.0, "4"};
  const Jet3 k = radial_jet(c, std::vector<double>{1, 2, 3});
  for (double g : k.grad_span()) CHECK(g == 0.0);
  for (double h : k.hess_packed()) CHECK(h == 0.0);
}

TEST_CASE("Schwarzschild radial Hessian along the radius is F''") {
  const RadialProfile p = schwarzschild_profile(3, 1.0);
  const Jet3 j = radial_jet(p, std::vector<double>{4, 0, 0});
  CHECK(j.hess(0, 0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK_THROWS_AS(radial_jet(p, std::vector<double>{1.5, 0, 0}), DomainError);
}

TEST_CASE("higher-dimensional Schwarzschild profile values") {
  const RadialProfile p5 = schwarzschild_profile(5, 1.0);
  CHECK(p5.f_r(2.0) == doctest::Approx(0.57735026918962576451).epsilon(1e-14));
  CHECK(p5.f_rr(2.0) == doctest::Approx(-0.57735026918962576451).epsilon(1e-13));
  CHECK(p5.f_rrr(2.0) == doctest::Approx(1.1547005383792515290).epsilon(1e-13));
  CHECK(p5.f(2.0) == doctest::Approx(1.0199693580381285833).epsilon(1e-12));
  const RadialProfile p4 = schwarzschild_profile(4, 1.0);
  CHECK(p4.f(3.0) == doctest::Approx(1.9577378247367928603).epsilon(1e-13));
}

TEST_CASE("perturbed profile with eps = 0 reduces to Schwarzschild") {
  for (int n : {3, 4, 5}) {
    const RadialProfile a = perturbed_schwarzschild_profile(n, 1.0, 0.0);
    const RadialProfile b = schwarzschild_profile(n, 1.0);
    for (double r : {2.5, 3.0, 7.0, 40.0}) {
      CHECK(a.f_r(r) == doctest::Approx(b.f_r(r)).epsilon(1e-13));
      CHECK(a.f_rr(r) == doctest::Approx(b.f_rr(r)).epsilon(1e-12));
      CHECK(a.f_rrr(r) == doctest::Approx(b.f_rrr(r)).epsilon(1e-11));
      CHECK(a.f(r) == doctest::Approx(b.f(r)).epsilon(1e-10));
    }
  }
}

TEST_CASE("fd jet is exact on quadratics and zero on constants") {
  ExprField q(parse("x1^2 - 3*x1*x2 + 0.5*x3^2 + x2", 3), {});
  const std::vector<double> x = {0.3, -1.2, 2.0};
  const Jet3 f = fd_jet(q, x, 1e-2);
  CHECK(f.hess(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.hess(0, 1) == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(f.hess(2, 2) == doctest::Approx(1.0).epsilon(1e-9));
  ExprField c(parse("2.5", 2), {});
  const Jet3 z = fd_jet(c, std::vector<double>{1.0, 1.0});
  for (double g : z.grad_span()) CHECK(g == 0.0);
  for (double h : z.hess_packed()) CHECK(h == 0.0);
  for (double t : z.third_packed()) CHECK(t == 0.0);
}

TEST_CASE("fd jet of a Gaussian matches the analytic jet") {
  ExprField g(parse("exp(-r^2)", 3), {});
  const std::vector<double> x = {1, 0, 0};
  const Jet3 a = g.jet(x);
  const Jet3 f = fd_jet(g, x, 1e-3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(f.grad(i) - a.grad(i)) <= 1e-6 * std::max(1.0, std::abs(a.grad(i))));
    for (int j = i; j < 3; ++j) {
      CHECK(std::abs(f.hess(i, j) - a.hess(i, j)) <= 1e-6 * std::max(1.0, std::abs(a.hess(i, j))));
      for (int k = j; k < 3; ++k)
        CHECK(std::abs(f.third(i, j, k) - a.third(i, j, k)) <= 1e-6 * std::max(1.0, std::abs(a.third(i, j, k))));
    }
  }
}

TEST_CASE("fd stencil leaving the domain is an error") {
  RadialField s(schwarzschild_profile(3, 1.0), 3);
  CHECK_THROWS_AS(fd_jet(s, std::vector<double>{2.0 + 1e-4, 0, 0}, 1e-3), DomainError);
}

TEST_CASE("linearity of expression jets") {
  const std::vector<double> x = {0.4, -0.7, 1.1};
  const Jet3 a = jet_of("sin(x1)*exp(x2) + r", 3, x);
  const Jet3 b = jet_of("x3^3/(2+x1^2)", 3, x);
  const Jet3 c = jet_of("2.5*(sin(x1)*exp(x2) + r) + x3^3/(2+x1^2)", 3, x);
  const Jet3 d = 2.5 * a + b;
  CHECK(max_abs_diff(c, d) <= 1e-13);
}

TEST_CASE("flatness report") {
  const std::vector<double> radii = {10, 100, 1000, 10000};
  RadialField s(schwarzschild_profile(3, 1.0), 3);
  CHECK_FALSE(flatness_report(s, 1.0, radii).flagged());
  ExprField lin(parse("x1", 3), {});
  const FlatnessReport bad = flatness_report(lin, 1.0, radii);
  CHECK(bad.grad_grows);
  ExprField zero(parse("0", 3), {});
  const FlatnessReport z = flatness_report(zero, 1.0, radii);
  CHECK_FALSE(z.flagged());
  for (const auto& row : z.rows) CHECK(row.grad + row.hess + row.third == 0.0);
}
