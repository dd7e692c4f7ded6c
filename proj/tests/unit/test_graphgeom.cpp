#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "graphmass/errors.hpp"
#include "graphmass/graphgeom.hpp"
#include "graphmass/radial.hpp"
#include "riemann_oracle.hpp"

using namespace graphmass;
using namespace graphmass::geom;

namespace {

ExprField expr_field(const char* text, int n, jets::ParamBindings params = {}) {
  std::vector<std::string> names;
  for (auto& [k, v] : params) names.push_back(k);
  return ExprField(jets::parse(text, n, names), params);
}

std::vector<double> random_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Exterior point with radius in [lo, hi].
std::vector<double> random_shell_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  const double s = u(rng) / norm(x);
  for (double& v : x) v *= s;
  return x;
}

}  // namespace

TEST_CASE("flat and affine graphs") {
  const std::vector<double> x = {0.3, 1.0, -2.0};
  const MetricJet z = metric_jet(expr_field("0", 3), x);
  CHECK(z.g.isIdentity());
  CHECK(z.scalar_curvature == 0.0);
  CHECK(z.v.norm() == 0.0);
  CHECK(z.volume_factor == 1.0);
  for (double c : z.gamma) CHECK(c == 0.0);

  const MetricJet a = metric_jet(expr_field("x1", 3), x);
  CHECK(a.volume_factor == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.scalar_curvature == 0.0);
  CHECK(a.v.norm() == 0.0);
  for (double c : a.gamma) CHECK(c == 0.0);
}

TEST_CASE("metric jet invariants") {
  std::mt19937_64 rng(11);
  const ExprField f = expr_field("x1^2*x2 + 0.3*x3^3 - x1*x3 + sin(x2)", 3);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_point(rng, 3, -2, 2);
    const MetricJet m = metric_jet(f, x);
    CHECK((m.g * m.ginv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12 * (1 + m.grad_norm_sq));
    CHECK((m.g.inverse() - m.ginv).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(m.volume_factor * m.volume_factor - 1.0 - m.grad_norm_sq) <= 1e-12 * (1 + m.grad_norm_sq));
    CHECK(std::abs(m.g.determinant() - 1.0 - m.grad_norm_sq) <= 1e-10 * (1 + m.grad_norm_sq));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(m.christoffel(k, i, j) == m.christoffel(k, j, i));
  }
}

TEST_CASE("Schwarzschild gradient at (4,0,0)") {
  RadialField s(jets::schwarzschild_profile(3, 1.0), 3);
  CHECK(metric_jet(s, std::vector<double>{4, 0, 0}).grad_norm_sq == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("paraboloid curvature at the vertex") {
  for (double eps : {0.1, 0.5, 2.0}) {
    const ExprField f = expr_field("e*(x1^2 + x2^2)/2", 3, {{"e", eps}});
    CHECK(scalar_curvature(f, std::vector<double>{0, 0, 0}) == doctest::Approx(2 * eps * eps).epsilon(1e-14));
  }
}

TEST_CASE("scalar curvature of a cubic against the CAS value") {
  const ExprField f = expr_field("x1^2*x2 + 0.3*x3^3 - x1*x3", 3);
  CHECK(scalar_curvature(f, std::vector<double>{0.3, -0.5, 0.7}) ==
        doctest::Approx(-1.2277126472005920079).epsilon(1e-13));
}

TEST_CASE("closed-form R matches the generic Riemann computation") {
  std::mt19937_64 rng(5);
  const char* exprs[] = {"x1^2*x2 + 0.3*x3^3 - x1*x3", "exp(-r^2)*x1", "sin(x1)*cos(x2) + log(2+x3^2)",
                         "sqrt(1 + x1^2 + 2*x2^2) * x3"};
  for (const char* e : exprs) {
    const ExprField f = expr_field(e, 3);
    for (int t = 0; t < 50; ++t) {
      const auto x = random_point(rng, 3, -1.5, 1.5);
      const Jet3 j = f.jet(x);
      const double a = scalar_curvature(j);
      const double b = oracle::generic_scalar_curvature(j);
      CHECK(std::abs(a - b) <= 1e-10 * (1 + std::abs(b)));
    }
  }
  const ExprField f4 = expr_field("x1*x2*x3 + x4^2*exp(-x1)", 4);
  for (int t = 0; t < 50; ++t) {
    const Jet3 j = f4.jet(random_point(rng, 4, -1, 1));
    CHECK(std::abs(scalar_curvature(j) - oracle::generic_scalar_curvature(j)) <=
          1e-10 * (1 + std::abs(scalar_curvature(j))));
  }
}

TEST_CASE("Schwarzschild graphs are scalar flat") {
  std::mt19937_64 rng(3);
  for (int n : {3, 4, 5}) {
    const auto profile = jets::schwarzschild_profile(n, 1.0);
    RadialField s(profile, n);
    for (int t = 0; t < 1000; ++t) {
      const auto x = random_shell_point(rng, n, profile.r_min * 1.001, 50.0);
      CHECK(std::abs(scalar_curvature(s, x)) <= 1e-9);
    }
  }
}

TEST_CASE("divergence of V equals R") {
  std::mt19937_64 rng(9);
  const ExprField bump = expr_field("0.1*exp(-r^2)", 3);
  const ExprField poly = expr_field("x1^2*x2 + 0.3*x3^3 - x1*x3", 3);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_point(rng, 3, -2.5, 2.5);
    for (const ExprField* f : {&bump, &poly}) {
      const Jet3 j = f->jet(x);
      const double r = scalar_curvature(j);
      CHECK(std::abs(divergence_of_v(j) - r) <= 1e-9 * (1 + std::abs(r)));
    }
  }
}

TEST_CASE("divergence of V against a finite-difference divergence") {
  const ExprField f = expr_field("sin(x1)*x2 + 0.5*exp(-x3^2)*x1", 3);
  const std::vector<double> x = {0.4, -0.3, 0.8};
  double prev = 0.0;
  for (double h : {1e-2, 5e-3}) {
    double div = 0.0;
    for (int j = 0; j < 3; ++j) {
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      div += (div_field_v(f, xp)[j] - div_field_v(f, xm)[j]) / (2 * h);
    }
    const double err = std::abs(div - divergence_of_v(f, x));
    if (prev > 0) CHECK(err / prev == doctest::Approx(0.25).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("V of a radial field is radial with the general-n magnitude") {
  for (int n : {3, 4, 5}) {
    const auto profile = jets::schwarzschild_profile(n, 1.0);
    RadialField s(profile, n);
    std::vector<double> x(n, 0.0);
    x[0] = 1.2;
    x[n - 1] = 2.5;
    const double r = norm(x);
    const Eigen::VectorXd v = div_field_v(s, x);
    const double fr = profile.f_r(r);
    const double expect = (n - 1) * fr * fr / (r * (1 + fr * fr));
    for (int i = 0; i < n; ++i) CHECK(v[i] == doctest::Approx(expect * x[i] / r).epsilon(1e-12));
  }
  CHECK(div_field_v(expr_field("0", 3), std::vector<double>{1, 1, 1}).norm() == 0.0);
  CHECK(div_field_v(expr_field("x1", 3), std::vector<double>{1, 1, 1}).norm() == 0.0);
}

TEST_CASE("flat mean curvature of spheres and planes") {
  for (int n : {2, 3, 4, 5}) {
    RadialField up(jets::regularized_profile(1.0, 0.5), n);
    std::vector<double> x(n, 0.0);
    x[n - 1] = 3.0;
    CHECK(flat_mean_curvature(up, x) == doctest::Approx((n - 1) / 3.0).epsilon(1e-12));
  }
  CHECK(flat_mean_curvature(expr_field("x1", 3), std::vector<double>{1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(flat_mean_curvature(expr_field("x1^2", 3), std::vector<double>{0, 1, 1}), DomainError);
}

TEST_CASE("horizon limits for Schwarzschild n=3") {
  const double m = 1.0;
  RadialField s(jets::schwarzschild_profile(3, m), 3);
  // Cartesian Hessians carry F'' ~ offset^(-3/2), so stay at offset 1e-6.
  const double r = 2 * m * (1 + 1e-6);
  const std::vector<double> x = {0, r, 0};
  CHECK(flat_mean_curvature(s, x) == doctest::Approx(2.0 / r).epsilon(1e-9));
  CHECK(flat_mean_curvature(s, x) == doctest::Approx(1.0 / m).epsilon(1e-5));
  CHECK(std::abs(induced_mean_curvature(s, x)) < 1e-2);
  const std::vector<double> closer = {0, 2 * m * (1 + 1e-10), 0};
  CHECK(std::abs(induced_mean_curvature(s, closer)) < 1e-4);
}

TEST_CASE("induced mean curvature relation") {
  // f = sqrt(2) r has |grad f| = ... use f = r so |grad f| = 1
  const ExprField f = expr_field("r", 3);
  const std::vector<double> x = {0, 2, 0};
  CHECK(induced_mean_curvature(f, x) == doctest::Approx(2.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
  std::mt19937_64 rng(1);
  const ExprField g = expr_field("x1^2*x2 + exp(x3)", 3);
  for (int t = 0; t < 100; ++t) {
    const Jet3 j = g.jet(random_point(rng, 3, -1, 1));
    double gsq = 0;
    for (double v : j.grad_span()) gsq += v * v;
    CHECK(induced_mean_curvature(j) * std::sqrt(1 + gsq) == doctest::Approx(flat_mean_curvature(j)).epsilon(1e-15));
  }
}

TEST_CASE("boundary integrand identity along the inward gradient") {
  std::mt19937_64 rng(21);
  const ExprField fields[] = {expr_field("x1^2*x2 + exp(x3) - r", 3), expr_field("sin(x1+x2)*x3^2 + x1", 3),
                              expr_field("x1*x2*x3*x4 + 0.5*r^2", 4)};
  for (const auto& f : fields) {
    for (int t = 0; t < 1000 / 3 + 1; ++t) {
      const auto x = random_point(rng, f.dim(), -1.5, 1.5);
      const Jet3 j = f.jet(x);
      double gsq = 0;
      for (double v : j.grad_span()) gsq += v * v;
      if (gsq < 1e-6) continue;
      std::vector<double> nu(f.dim());
      for (int i = 0; i < f.dim(); ++i) nu[i] = -j.grad(i) / std::sqrt(gsq);
      const double lhs = -boundary_integrand(j, nu);
      const double rhs = gsq * flat_mean_curvature(j) / (1 + gsq);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(rhs)));
    }
  }
  CHECK(boundary_integrand(expr_field("0", 3), std::vector<double>{1, 1, 1}, std::vector<double>{0, 0, 1}) == 0.0);
}

TEST_CASE("boundary integrand of Schwarzschild along the radius") {
  const auto profile = jets::schwarzschild_profile(3, 1.0);
  RadialField s(profile, 3);
  const std::vector<double> x = {0, 60, 80};
  const std::vector<double> nu = {0, 0.6, 0.8};
  const double fr = profile.f_r(100);
  CHECK(boundary_integrand(s, x, nu) == doctest::Approx(2 * fr * fr / (100 * (1 + fr * fr))).epsilon(1e-13));
}

TEST_CASE("scalar curvature is rotation invariant") {
  std::mt19937_64 rng(17);
  const char* text = "x1^2*x2 + 0.3*x3^3 - x1*x3";
  const ExprField f = expr_field(text, 3);
  for (int t = 0; t < 50; ++t) {
    Eigen::Matrix3d a = Eigen::Matrix3d::Random();
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
    const Eigen::Matrix3d q = qr.householderQ();
    // f o Q as an expression: substitute xi -> (Q x)_i
    std::string sub[3];
    for (int i = 0; i < 3; ++i) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "(%.17g*x1 + %.17g*x2 + %.17g*x3)", q(i, 0), q(i, 1), q(i, 2));
      sub[i] = buf;
    }
    const std::string rotated = "(" + sub[0] + ")^2*" + sub[1] + " + 0.3*" + sub[2] + "^3 - " + sub[0] + "*" + sub[2];
    const ExprField g(jets::parse(rotated, 3), {});
    const auto x = random_point(rng, 3, -1, 1);
    const Eigen::Vector3d qx = q * Eigen::Vector3d(x[0], x[1], x[2]);
    const double rg = scalar_curvature(g, x);
    const double rf = scalar_curvature(f, std::vector<double>{qx[0], qx[1], qx[2]});
    CHECK(std::abs(rg - rf) <= 1e-10 * (1 + std::abs(rf)));
  }
}
