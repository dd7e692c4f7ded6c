#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "graphmass/errors.hpp"
#include "graphmass/quad.hpp"

using namespace graphmass;
using namespace graphmass::quad;

namespace {

constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Exact integral over S^(n-1) of x^alpha: zero unless all even, else
// 2 prod Gamma(b_i) / Gamma(sum b_i) with b_i = (alpha_i + 1) / 2.
double monomial_integral(const std::vector<int>& alpha) {
  double num = 2.0, sum = 0.0;
  for (int a : alpha) {
    if (a % 2) return 0.0;
    num *= std::tgamma((a + 1) / 2.0);
    sum += (a + 1) / 2.0;
  }
  return num / std::tgamma(sum);
}

void for_each_multi_index(int n, int max_degree, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      visit(a);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      a[i] = k;
      rec(i + 1, left - k);
    }
    a[i] = 0;
  };
  rec(0, max_degree);
}

}  // namespace

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(unit_sphere_area(4) == doctest::Approx(2 * kPi * kPi).epsilon(1e-15));
  CHECK(unit_sphere_area(5) == doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-15));
}

TEST_CASE("sphere rule invariants") {
  for (int n = 2; n <= 6; ++n) {
    const SphereRule rules[] = {product_rule(n, 6), qmc_rule(n, 500, 42)};
    for (const auto& rule : rules) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        CHECK(std::abs(norm(rule.node(i)) - 1.0) <= 1e-14);
        sum += rule.weights[i];
      }
      CHECK(std::abs(sum - unit_sphere_area(n)) <= 1e-12 * unit_sphere_area(n));
    }
  }
}

TEST_CASE("product rules integrate monomials through their degree") {
  for (int n = 2; n <= 5; ++n) {
    const int p = n <= 3 ? 8 : 5;
    const SphereRule rule = product_rule(n, p);
    CHECK(rule.degree == 2 * p - 1);
    for_each_multi_index(n, rule.degree, [&](const std::vector<int>& alpha) {
      const Estimate e = sphere_integrate(
          [&](std::span<const double> x) {
            double v = 1.0;
            for (int i = 0; i < n; ++i) v *= std::pow(x[i], alpha[i]);
            return v;
          },
          1.0, rule);
      CHECK(std::abs(e.value - monomial_integral(alpha)) <= 1e-12);
    });
  }
}

TEST_CASE("quasi-Monte-Carlo rules cancel odd monomials") {
  const SphereRule rule = qmc_rule(5, 1000, 3);
  const Estimate e = sphere_integrate([](std::span<const double> x) { return x[0] * x[1] * x[1] + x[3]; }, 1.0, rule);
  CHECK(std::abs(e.value) <= 1e-12);
  const Estimate c = sphere_integrate([](std::span<const double>) { return 1.0; }, 2.0, rule);
  CHECK(c.value == doctest::Approx(unit_sphere_area(5) * 16).epsilon(1e-12));
  CHECK(c.error <= 1e-12);
  // x1^2 averages to 1/n
  const Estimate q = sphere_integrate([](std::span<const double> x) { return x[0] * x[0]; }, 1.0, qmc_rule(5, 20000, 3));
  CHECK(q.value == doctest::Approx(unit_sphere_area(5) / 5).epsilon(5e-3));
}

TEST_CASE("sphere_integrate examples") {
  const SphereRule rule = product_rule(3, 8);
  CHECK(sphere_integrate([](std::span<const double>) { return 1.0; }, 2.0, rule).value ==
        doctest::Approx(16 * kPi).epsilon(1e-14));
  CHECK(std::abs(sphere_integrate([](std::span<const double> x) { return x[0] / norm(x); }, 2.0, rule).value) <= 1e-13);
  // off-center sphere
  const std::vector<double> c = {1, -2, 0.5};
  CHECK(sphere_integrate([&](std::span<const double> x) { return x[0] - c[0]; }, 3.0, rule, c).value ==
        doctest::Approx(0.0).epsilon(1e-12).scale(1));
}

TEST_CASE("quasi-Monte-Carlo rules are reproducible and seed dependent") {
  auto f = [](std::span<const double> x) { return std::exp(x[0]) * std::cos(x[1] + x[2] * x[3]); };
  const double a = sphere_integrate(f, 1.5, qmc_rule(4, 2000, 99)).value;
  const double b = sphere_integrate(f, 1.5, qmc_rule(4, 2000, 99)).value;
  const double c = sphere_integrate(f, 1.5, qmc_rule(4, 2000, 100)).value;
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("serial and parallel evaluation are bit identical") {
  auto f = [](std::span<const double> x) { return std::exp(-x[0] * x[0]) * (1 + x[1]) / (1 + x[2] * x[2]); };
  const SphereRule rule = product_rule(3, 24);
  CHECK(sphere_integrate(f, 2.0, rule, {}, Exec::Serial).value == sphere_integrate(f, 2.0, rule, {}, Exec::Parallel).value);
  QuadConfig cfg;
  cfg.exec = Exec::Serial;
  const double s = exterior_volume_integrate(f, 3, {}, cfg).value;
  cfg.exec = Exec::Parallel;
  CHECK(s == exterior_volume_integrate(f, 3, {}, cfg).value);
}

TEST_CASE("exceptions at nodes propagate") {
  auto bad = [](std::span<const double> x) -> double {
    if (x[0] > 0.9) throw DomainError("outside");
    return 1.0;
  };
  CHECK_THROWS_AS(sphere_integrate(bad, 1.0, product_rule(3, 8)), DomainError);
  CHECK_THROWS_AS(sphere_integrate(bad, 1.0, product_rule(3, 8), {}, Exec::Serial), DomainError);
}

TEST_CASE("Gaussian over all of R^3") {
  QuadConfig cfg;
  const VolumeResult r =
      exterior_volume_integrate([](std::span<const double> x) { return std::exp(-x[0] * x[0] - x[1] * x[1] - x[2] * x[2]); }, 3, {}, cfg);
  CHECK(r.value == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-9));
  CHECK(r.tail == 0.0);
}

TEST_CASE("power law outside the unit ball") {
  for (int n : {3, 4}) {
    QuadConfig cfg;
    const std::vector<Ball> hole = {{std::vector<double>(n, 0.0), 1.0}};
    const VolumeResult r = exterior_volume_integrate(
        [n](std::span<const double> x) { return std::pow(norm(x), -(n + 1)); }, n, hole, cfg);
    CHECK(r.value == doctest::Approx(unit_sphere_area(n)).epsilon(1e-7));
    CHECK(r.decay == doctest::Approx(n + 1).epsilon(1e-9));
  }
}

TEST_CASE("tail soundness on power laws") {
  for (double q : {3.5, 4.0, 5.0, 7.0}) {
    QuadConfig cfg;
    cfg.r_max = 100;
    const std::vector<Ball> hole = {{{0, 0, 0}, 1.0}};
    const VolumeResult r =
        exterior_volume_integrate([q](std::span<const double> x) { return std::pow(norm(x), -q); }, 3, hole, cfg);
    const double true_tail = 4 * kPi * std::pow(100.0, 3 - q) / (q - 3);
    CHECK(r.tail_bound >= true_tail * (1 - 1e-9));
    CHECK(r.tail_bound <= 10 * true_tail);
    CHECK(r.value == doctest::Approx(4 * kPi / (q - 3)).epsilon(1e-7));
  }
}

TEST_CASE("non-integrable decay is reported") {
  QuadConfig cfg;
  cfg.r_max = 100;
  const std::vector<Ball> hole = {{{0, 0, 0}, 1.0}};
  CHECK_THROWS_AS(exterior_volume_integrate([](std::span<const double> x) { return std::pow(norm(x), -2.5); }, 3, hole, cfg),
                  NumericalError);
}

TEST_CASE("halving the tolerance never moves away from the oracle") {
  auto gauss = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 3.0); };
  auto power = [](std::span<const double> x) { return std::pow(1 + norm(x), -5.0); };
  const double gauss_exact = std::pow(3 * kPi, 1.5);
  // integral of 4 pi r^2 (1 + r)^-5 over r > 0 is 4 pi / 12
  const double power_exact = 4 * kPi / 12.0;
  for (auto [fn, exact] : {std::pair<PointFn, double>{gauss, gauss_exact}, {power, power_exact}}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double tol : {1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5}) {
      QuadConfig cfg;
      cfg.rel_tol = tol;
      cfg.abs_tol = tol;
      const double err = std::abs(exterior_volume_integrate(fn, 3, {}, cfg).value - exact);
      CHECK(err <= prev);
      prev = err;
    }
  }
}

TEST_CASE("two off-center holes through the partition of unity") {
  const std::vector<Ball> holes = {{{6, 0, 0}, 1.0}, {{-6, 0, 0}, 1.0}};
  auto f = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 50.0); };
  QuadConfig cfg;
  cfg.volume_sphere_order = 48;
  const VolumeResult r = exterior_volume_integrate(f, 3, holes, cfg);
  // subtract the two unit balls: integral of f over a unit ball at distance 6, by radial shells
  double ball = 0.0;
  {
    const SphereRule rule = product_rule(3, 16);
    const std::vector<double> c = {6, 0, 0};
    for (int i = 0; i < 200; ++i) {
      const double rr = (i + 0.5) / 200;
      ball += sphere_integrate(f, rr, rule, c).value / 200;
    }
  }
  const double whole = std::pow(50 * kPi, 1.5);
  CHECK(r.value == doctest::Approx(whole - 2 * ball).epsilon(1e-6));
}

TEST_CASE("graded mesh toward a hole with an inverse square root layer") {
  // f = (|x| - 1)^-1/2 r^-4 outside the unit ball; radial integral 4 pi int_1^inf (r-1)^-1/2 r^-2 dr = 4 pi * pi/2
  QuadConfig cfg;
  const std::vector<Ball> hole = {{{0, 0, 0}, 1.0}};
  const VolumeResult r = exterior_volume_integrate(
      [](std::span<const double> x) {
        const double rr = norm(x);
        return std::pow(rr - 1, -0.5) * std::pow(rr, -4);
      },
      3, hole, cfg);
  CHECK(r.value == doctest::Approx(4 * kPi * kPi / 2).epsilon(1e-5));
  CHECK(r.hole_remainder > 0);
}

TEST_CASE("extrapolation") {
  const std::vector<double> r = {50, 100, 200};
  std::vector<double> v;
  for (double x : r) v.push_back(x / (x - 2));
  CHECK(v[0] == doctest::Approx(1.0416666666666666667).epsilon(1e-15));
  const Limit l = extrapolate_limit(r, v);
  CHECK(std::abs(l.value - 1.0) <= 1e-3);
  CHECK_FALSE(l.inflated);

  const std::vector<double> c = {3.25, 3.25, 3.25};
  const Limit lc = extrapolate_limit(r, c);
  CHECK(lc.value == 3.25);
  CHECK(lc.uncertainty == 0.0);

  std::vector<double> w;
  for (double x : r) w.push_back(1 + 1 / x);
  CHECK(extrapolate_limit(r, w).value == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> r4 = {25, 50, 100, 200};
  std::vector<double> v4;
  for (double x : r4) v4.push_back(x / (x - 2));
  const Limit l4 = extrapolate_limit(r4, v4);
  CHECK(std::abs(l4.value - 1.0) <= l4.uncertainty + 1e-12);
  CHECK(l4.uncertainty > 0);

  const std::vector<double> bad = {1.0, 1.2, 1.1};
  const Limit lb = extrapolate_limit(r, bad);
  CHECK(lb.inflated);
  CHECK(lb.value == 1.1);
  CHECK(lb.uncertainty == doctest::Approx(0.2));
  CHECK_THROWS(extrapolate_limit(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
}
