#include "graphmass/radial.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <memory>

#include "graphmass/errors.hpp"

namespace graphmass::jets {
namespace {

struct Polar {
  std::array<double, kMaxDim> y{};
  double r = 0.0;
};

Polar to_polar(std::span<const double> x, std::span<const double> center) {
  Polar p;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.y[i] = x[i] - (center.empty() ? 0.0 : center[i]);
    r2 += p.y[i] * p.y[i];
  }
  p.r = std::sqrt(r2);
  return p;
}

Jet3 assemble(int n, const Polar& p, double value, double f1, double f2, double f3) {
  const double r = p.r;
  // f_ij = A y_i y_j + B delta_ij and f_ijk = C y_i y_j y_k + A (delta_ij y_k + ...)
  const double b = f1 / r;
  const double a = (f2 - b) / (r * r);
  const double c = ((f3 - (f2 - b) / r) / (r * r) - 2.0 * a / r) / r;
  Jet3 j(n, value);
  for (int i = 0; i < n; ++i) {
    j.set_grad(i, b * p.y[i]);
    for (int k = i; k < n; ++k) {
      j.set_hess(i, k, a * p.y[i] * p.y[k] + (i == k ? b : 0.0));
      for (int l = k; l < n; ++l) {
        const double delta = (i == k ? p.y[l] : 0.0) + (i == l ? p.y[k] : 0.0) + (k == l ? p.y[i] : 0.0);
        j.set_third(i, k, l, c * p.y[i] * p.y[k] * p.y[l] + a * delta);
      }
    }
  }
  return j;
}

void check_outside(const RadialProfile& profile, const Polar& p) {
  if (!(p.r > profile.r_min) || p.r == 0.0)
    throw DomainError("point at radius " + std::to_string(p.r) + " is not outside r_min = " +
                      std::to_string(profile.r_min));
}

// (r^k - r0^k) / (r - r0) without cancellation.
double power_difference_quotient(double r, double r0, int k) {
  double sum = 0.0;
  for (int j = 0; j < k; ++j) sum += std::pow(r, j) * std::pow(r0, k - 1 - j);
  return sum;
}

}  // namespace

Jet3 radial_jet(const RadialProfile& profile, std::span<const double> x, std::span<const double> center) {
  const Polar p = to_polar(x, center);
  check_outside(profile, p);
  return assemble(static_cast<int>(x.size()), p, profile.f(p.r), profile.f_r(p.r), profile.f_rr(p.r),
                  profile.f_rrr(p.r));
}

Jet3 radial_derivatives(const RadialProfile& profile, std::span<const double> x, std::span<const double> center) {
  const Polar p = to_polar(x, center);
  check_outside(profile, p);
  return assemble(static_cast<int>(x.size()), p, 0.0, profile.f_r(p.r), profile.f_rr(p.r), profile.f_rrr(p.r));
}

double integrate_profile_slope(const std::function<double(double)>& f_r, double r_min, double r) {
  if (r <= r_min) return 0.0;
  auto g = [&](double t) { return 2.0 * t * f_r(r_min + t * t); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, std::sqrt(r - r_min), 15, 1e-10);
}

RadialProfile schwarzschild_profile(int n, double m) {
  if (n < 3) throw Error("Schwarzschild profile needs n >= 3");
  if (!(m > 0.0)) throw Error("Schwarzschild mass must be positive");
  const int k = n - 2;
  const double r0 = std::pow(2.0 * m, 1.0 / k);
  const double c = std::sqrt(2.0 * m);
  // D(r) = r^k - 2m = (r - r0) P(r)
  auto gap = [=](double r) { return (r - r0) * power_difference_quotient(r, r0, k); };

  RadialProfile p;
  p.r_min = r0;
  p.name = "schwarzschild(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")";
  p.f_r = [=](double r) { return c / std::sqrt(gap(r)); };
  p.f_rr = [=](double r) {
    const double d = gap(r);
    return -0.5 * k * std::pow(r, k - 1) * c / (d * std::sqrt(d));
  };
  p.f_rrr = [=](double r) {
    const double d = gap(r);
    const double d32 = d * std::sqrt(d);
    return -0.5 * k * c * ((k - 1) * std::pow(r, k - 2) / d32 - 1.5 * k * std::pow(r, 2 * k - 2) / (d32 * d));
  };
  if (k == 1) {
    p.f = [=](double r) { return std::sqrt(8.0 * m * (r - r0)); };
  } else if (k == 2) {
    p.f = [=](double r) { return c * std::acosh(r / c); };
  } else {
    // r0 * integral_1^{r/r0} (u^k - 1)^(-1/2) du as a complementary incomplete beta.
    const double a = 0.5 - 1.0 / k;
    const double full = boost::math::beta(a, 0.5);
    p.f = [=](double r) { return r0 / k * full * boost::math::ibetac(a, 0.5, std::pow(r0 / r, k)); };
  }
  return p;
}

RadialProfile perturbed_schwarzschild_profile(int n, double m, double eps) {
  if (n < 3) throw Error("perturbed Schwarzschild profile needs n >= 3");
  if (!(m > 0.0)) throw Error("mass must be positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw Error("perturbation must lie in [0, 1)");
  const int k = n - 2;
  const double r0 = std::pow(2.0 * m, 1.0 / k);

  // F' as a one-variable jet in r, with the offset u = r - r0 supplied
  // separately so it stays exact near the horizon:
  // F'^2 = 2 mu / (u D), D = P_k(r) - 2 m eps / r.
  auto slope = [=](double r, double u) {
    const Jet3 rr = Jet3::variable(1, 0, r);
    const Jet3 t = Jet3::variable(1, 0, u);
    Jet3 poly = Jet3::constant(1, 0.0);
    for (int j = 0; j < k; ++j) poly += pow(rr, j) * std::pow(r0, k - 1 - j);
    const Jet3 inv_r = reciprocal(rr);
    const Jet3 d = poly + (-2.0 * m * eps) * inv_r;
    const Jet3 mu = m * (1.0 + eps * (t * inv_r));
    return sqrt(2.0 * mu / (t * d));
  };

  RadialProfile p;
  p.r_min = r0;
  p.name = "perturbed_schwarzschild(n=" + std::to_string(n) + ",m=" + std::to_string(m) +
           ",eps=" + std::to_string(eps) + ")";
  p.f_r = [=](double r) { return slope(r, r - r0).value(); };
  p.f_rr = [=](double r) { return slope(r, r - r0).grad(0); };
  p.f_rrr = [=](double r) { return slope(r, r - r0).hess(0, 0); };
  p.f = [=](double r) {
    if (r <= r0) return 0.0;
    // s = r0 + t^2 absorbs the inverse square root at the horizon:
    // 2 t F'(r0 + t^2) = 2 sqrt(2 mu / D), smooth in t
    auto g = [&](double t) {
      const double rr = r0 + t * t;
      double poly = 0.0;
      for (int j = 0; j < k; ++j) poly += std::pow(rr, j) * std::pow(r0, k - 1 - j);
      const double mu = m * (1.0 + eps * t * t / rr);
      return 2.0 * std::sqrt(2.0 * mu / (poly - 2.0 * m * eps / rr));
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, std::sqrt(r - r0), 15, 1e-10);
  };
  return p;
}

RadialProfile regularized_profile(double m, double s) {
  if (!(m >= 0.0) || !(s > 0.0)) throw Error("regularized profile needs m >= 0 and s > 0");
  const double c = std::sqrt(2.0 * m);
  RadialProfile p;
  p.r_min = 0.0;
  p.name = "regularized(m=" + std::to_string(m) + ",s=" + std::to_string(s) + ")";
  p.f = [=](double r) { return std::sqrt(8.0 * m) * std::pow(r * r + s * s, 0.25); };
  p.f_r = [=](double r) { return c * r * std::pow(r * r + s * s, -0.75); };
  p.f_rr = [=](double r) {
    const double q = r * r + s * s;
    return c * (std::pow(q, -0.75) - 1.5 * r * r * std::pow(q, -1.75));
  };
  p.f_rrr = [=](double r) {
    const double q = r * r + s * s;
    return c * (-4.5 * r * std::pow(q, -1.75) + 5.25 * r * r * r * std::pow(q, -2.75));
  };
  return p;
}

RadialProfile profile_from_expression(const Expr& e, const ParamBindings& params, double r_min) {
  if (e.dim() != 1) throw Error("radial profile expressions are parsed with dimension 1");
  auto compiled = std::make_shared<const CompiledExpr>(e, params);
  RadialProfile p;
  p.r_min = r_min;
  p.name = to_string(e);
  p.f = [compiled](double r) { return compiled->value(std::span<const double>(&r, 1)); };
  p.f_r = [compiled](double r) { return compiled->jet(std::span<const double>(&r, 1)).grad(0); };
  p.f_rr = [compiled](double r) { return compiled->jet(std::span<const double>(&r, 1)).hess(0, 0); };
  p.f_rrr = [compiled](double r) { return compiled->jet(std::span<const double>(&r, 1)).third(0, 0, 0); };
  return p;
}

}  // namespace graphmass::jets

namespace graphmass {

RadialField::RadialField(jets::RadialProfile profile, int dim, std::vector<double> center)
    : profile_(std::move(profile)), dim_(dim), center_(std::move(center)) {
  if (dim < 1 || dim > jets::kMaxDim) throw Error("radial field dimension out of range");
  if (!center_.empty() && static_cast<int>(center_.size()) != dim) throw Error("center dimension mismatch");
}

double RadialField::value(std::span<const double> x) const {
  double r2 = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double d = x[i] - (center_.empty() ? 0.0 : center_[i]);
    r2 += d * d;
  }
  const double r = std::sqrt(r2);
  if (r < profile_.r_min) throw DomainError("point inside r_min of " + profile_.name);
  return profile_.f(r);
}

bool RadialField::in_domain(std::span<const double> x) const {
  if (!ScalarField::in_domain(x)) return false;
  double r2 = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double d = x[i] - (center_.empty() ? 0.0 : center_[i]);
    r2 += d * d;
  }
  return std::sqrt(r2) > profile_.r_min && r2 > 0.0;
}

}  // namespace graphmass
