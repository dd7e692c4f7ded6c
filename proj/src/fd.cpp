#include "graphmass/fd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "graphmass/errors.hpp"

namespace graphmass::jets {
namespace {

class Stencil {
 public:
  Stencil(const ScalarField& field, std::span<const double> x) : field_(field), x_(x.begin(), x.end()) {}

  // f(x + h * sum_t s_t e_{i_t})
  double at(std::initializer_list<std::pair<int, double>> moves) {
    std::vector<double> y = x_;
    for (auto [i, s] : moves) y[i] += s;
    if (!field_.in_domain(y)) throw DomainError("finite-difference stencil leaves the domain of " + field_.describe());
    return field_.value(y);
  }

 private:
  const ScalarField& field_;
  std::vector<double> x_;
};

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Jet3 fd_jet_steps(const ScalarField& field, std::span<const double> x, double h1, double h2, double h3) {
  const int n = field.dim();
  if (static_cast<int>(x.size()) != n) throw Error("point dimension does not match field");
  Stencil f(field, x);
  Jet3 j(n, f.at({}));

  for (int i = 0; i < n; ++i) j.set_grad(i, (f.at({{i, h1}}) - f.at({{i, -h1}})) / (2.0 * h1));

  const double f0 = j.value();
  for (int i = 0; i < n; ++i) {
    const double h = h2;
    j.set_hess(i, i, (f.at({{i, h}}) - 2.0 * f0 + f.at({{i, -h}})) / (h * h));
    for (int k = i + 1; k < n; ++k)
      j.set_hess(i, k,
                 (f.at({{i, h}, {k, h}}) - f.at({{i, h}, {k, -h}}) - f.at({{i, -h}, {k, h}}) +
                  f.at({{i, -h}, {k, -h}})) /
                     (4.0 * h * h));
  }

  const double h = h3;
  const double h33 = h * h * h;
  for (int i = 0; i < n; ++i) {
    j.set_third(i, i, i,
                (f.at({{i, 2 * h}}) - 2.0 * f.at({{i, h}}) + 2.0 * f.at({{i, -h}}) - f.at({{i, -2 * h}})) /
                    (2.0 * h33));
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      // d/dx_k of the second difference in x_i
      const double plus = f.at({{i, h}, {k, h}}) - 2.0 * f.at({{k, h}}) + f.at({{i, -h}, {k, h}});
      const double minus = f.at({{i, h}, {k, -h}}) - 2.0 * f.at({{k, -h}}) + f.at({{i, -h}, {k, -h}});
      j.set_third(i, i, k, (plus - minus) / (2.0 * h33));
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        double sum = 0.0;
        for (int s = 0; s < 8; ++s) {
          const double sa = (s & 1) ? -1.0 : 1.0, sb = (s & 2) ? -1.0 : 1.0, sc = (s & 4) ? -1.0 : 1.0;
          sum += sa * sb * sc * f.at({{a, sa * h}, {b, sb * h}, {c, sc * h}});
        }
        j.set_third(a, b, c, sum / (8.0 * h33));
      }
  return j;
}

}  // namespace

Jet3 fd_jet(const ScalarField& field, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  return fd_jet_steps(field, x, h, h, h);
}

Jet3 fd_jet(const ScalarField& field, std::span<const double> x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, norm(x));
  return fd_jet_steps(field, x, std::cbrt(eps) * scale, std::pow(eps, 0.25) * scale, std::pow(eps, 0.2) * scale);
}

FlatnessReport flatness_report(const ScalarField& field, double decay, std::span<const double> radii,
                               int directions) {
  const int n = field.dim();
  FlatnessReport report;
  report.decay = decay;

  std::mt19937_64 rng(0x5eedf1a7ULL);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
    e[i] = -1.0;
    dirs.push_back(e);
  }
  while (static_cast<int>(dirs.size()) < std::max(directions, 2 * n)) {
    std::vector<double> d(n);
    for (double& v : d) v = normal(rng);
    const double len = norm(d);
    for (double& v : d) v /= len;
    dirs.push_back(d);
  }

  for (double r : radii) {
    FlatnessRow row;
    row.radius = r;
    for (const auto& d : dirs) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = r * d[i];
      const Jet3 j = field.derivatives(x);
      for (double v : j.grad_span()) row.grad = std::max(row.grad, std::abs(v));
      for (double v : j.hess_packed()) row.hess = std::max(row.hess, std::abs(v));
      for (double v : j.third_packed()) row.third = std::max(row.third, std::abs(v));
    }
    row.grad *= std::pow(r, decay / 2.0);
    row.hess *= std::pow(r, 1.0 + decay / 2.0);
    row.third *= std::pow(r, 2.0 + decay / 2.0);
    report.rows.push_back(row);
  }

  if (report.rows.size() >= 2) {
    const auto& a = report.rows[report.rows.size() - 2];
    const auto& b = report.rows.back();
    auto grows = [](double prev, double last) { return last > 1e-300 && last > 1.05 * prev; };
    report.grad_grows = grows(a.grad, b.grad);
    report.hess_grows = grows(a.hess, b.hess);
    report.third_grows = grows(a.third, b.third);
  }
  return report;
}

}  // namespace graphmass::jets
