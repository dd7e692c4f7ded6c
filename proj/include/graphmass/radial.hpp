#pragma once

// Spherically symmetric graph functions f(x) = F(|x - c|).

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "graphmass/field.hpp"

namespace graphmass::jets {

/// One-dimensional evaluators for F and its first three radial derivatives,
/// defined for r > r_min.
struct RadialProfile {
  std::function<double(double)> f;
  std::function<double(double)> f_r;
  std::function<double(double)> f_rr;
  std::function<double(double)> f_rrr;
  double r_min = 0.0;
  std::string name;
};

/// Cartesian jet of F(|x - center|) by the chain rule
///   f_i  = F' x_i / r
///   f_ij = F'' x_i x_j / r^2 + F' (delta_ij / r - x_i x_j / r^3)
/// and one further differentiation for f_ijk. Throws DomainError for |x| <= r_min.
Jet3 radial_jet(const RadialProfile& profile, std::span<const double> x, std::span<const double> center = {});

/// Same as radial_jet but skips F itself (value slot is zero).
Jet3 radial_derivatives(const RadialProfile& profile, std::span<const double> x,
                        std::span<const double> center = {});

/// Outer end of the n-dimensional Schwarzschild metric as a graph:
/// F'(r)^2 = 2m / (r^(n-2) - 2m), horizon at r0 = (2m)^(1/(n-2)).
/// For n = 3 this is F(r) = sqrt(8m(r - 2m)).
RadialProfile schwarzschild_profile(int n, double m);

/// Schwarzschild-like profile with increasing mass function
/// mu(r) = m (1 + eps (r - r0) / r), F'^2 = 2 mu / (r^(n-2) - 2 mu).
/// Horizon r0 = (2m)^(1/(n-2)); ADM mass m (1 + eps); R >= 0.
RadialProfile perturbed_schwarzschild_profile(int n, double m, double eps);

/// Smooth profile sqrt(8m) (r^2 + s^2)^(1/4): no horizon, ADM mass m, R >= 0.
RadialProfile regularized_profile(double m, double s);

/// Profile from an expression in r (parsed with dimension 1), derivatives by
/// one-variable jets.
RadialProfile profile_from_expression(const Expr& e, const ParamBindings& params, double r_min = 0.0);

/// F(r) = integral of F' from r_min, for profiles that only know F'. The
/// substitution s = r_min + t^2 absorbs an inverse square-root singularity.
double integrate_profile_slope(const std::function<double(double)>& f_r, double r_min, double r);

}  // namespace graphmass::jets

namespace graphmass {

class RadialField final : public ScalarField {
 public:
  RadialField(jets::RadialProfile profile, int dim, std::vector<double> center = {});

  int dim() const override { return dim_; }
  Jet3 jet(std::span<const double> x) const override { return jets::radial_jet(profile_, x, center_); }
  Jet3 derivatives(std::span<const double> x) const override {
    return jets::radial_derivatives(profile_, x, center_);
  }
  double value(std::span<const double> x) const override;
  bool in_domain(std::span<const double> x) const override;
  std::string describe() const override { return "radial:" + profile_.name; }

  const jets::RadialProfile& profile() const noexcept { return profile_; }
  std::span<const double> center() const noexcept { return center_; }

 private:
  jets::RadialProfile profile_;
  int dim_;
  std::vector<double> center_;
};

}  // namespace graphmass
