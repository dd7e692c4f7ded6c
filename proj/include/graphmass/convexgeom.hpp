#pragma once

// Convex bodies in R^n, their curvatures and quermassintegrals.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "graphmass/field.hpp"
#include "graphmass/quad.hpp"

namespace graphmass::convex {

/// Image of a unit direction theta on the boundary, with the area element
/// relative to the unit sphere: dSigma = jacobian * dS^(n-1)(theta).
struct SurfacePoint {
  std::vector<double> x;
  double jacobian = 0.0;
};

/// A smooth convex body {phi <= level}; phi increases outward.
class ConvexBody {
 public:
  virtual ~ConvexBody() = default;

  virtual int dim() const = 0;
  virtual std::string describe() const = 0;
  /// Jet of the defining function phi.
  virtual Jet3 defining_jet(std::span<const double> x) const = 0;
  virtual double level() const { return 0.0; }
  virtual SurfacePoint surface_point(std::span<const double> theta) const = 0;
  /// Interior point the surface parametrization is centered on.
  virtual std::span<const double> center() const = 0;
  /// Radius of a ball around center() containing the body.
  virtual double bounding_radius() const = 0;
  /// Typical length, used for on-surface tolerances and horizon offsets.
  virtual double scale() const = 0;
};

using BodyPtr = std::shared_ptr<const ConvexBody>;

class Sphere final : public ConvexBody {
 public:
  Sphere(std::vector<double> center, double radius);
  int dim() const override { return static_cast<int>(center_.size()); }
  std::string describe() const override;
  Jet3 defining_jet(std::span<const double> x) const override;
  SurfacePoint surface_point(std::span<const double> theta) const override;
  std::span<const double> center() const override { return center_; }
  double bounding_radius() const override { return radius_; }
  double scale() const override { return radius_; }
  double radius() const noexcept { return radius_; }

 private:
  std::vector<double> center_;
  double radius_;
};

/// Axis-aligned ellipsoid sum ((x_i - c_i) / a_i)^2 <= 1.
class Ellipsoid final : public ConvexBody {
 public:
  Ellipsoid(std::vector<double> center, std::vector<double> semiaxes);
  int dim() const override { return static_cast<int>(center_.size()); }
  std::string describe() const override;
  Jet3 defining_jet(std::span<const double> x) const override;
  SurfacePoint surface_point(std::span<const double> theta) const override;
  std::span<const double> center() const override { return center_; }
  double bounding_radius() const override;
  double scale() const override;
  const std::vector<double>& semiaxes() const noexcept { return axes_; }

 private:
  std::vector<double> center_;
  std::vector<double> axes_;
};

/// {phi <= level} for a convex phi, parametrized as a radial graph over
/// `center`, which must be interior. Radii are found by bracketing and
/// bisection along each ray.
class SmoothLevelSet final : public ConvexBody {
 public:
  SmoothLevelSet(FieldPtr phi, double level, std::vector<double> center);
  int dim() const override { return phi_->dim(); }
  std::string describe() const override;
  Jet3 defining_jet(std::span<const double> x) const override { return phi_->jet(x); }
  double level() const override { return level_; }
  SurfacePoint surface_point(std::span<const double> theta) const override;
  std::span<const double> center() const override { return center_; }
  double bounding_radius() const override { return bounding_; }
  double scale() const override { return mean_radius_; }

  double ray_radius(std::span<const double> theta) const;

 private:
  FieldPtr phi_;
  double level_;
  std::vector<double> center_;
  double bounding_ = 0.0;
  double mean_radius_ = 0.0;
};

/// Outward unit normal of the body at a boundary point.
std::vector<double> outward_normal(const ConvexBody& body, std::span<const double> x);

/// Eigenvalues of the Weingarten map T^t Hess(phi) T / |grad phi| on an
/// orthonormal tangent frame T, ascending. Throws DomainError if x is not on
/// the surface and HypothesisError if a curvature is below -1e-10 (relative
/// to the largest).
std::vector<double> principal_curvatures(const ConvexBody& body, std::span<const double> x);

/// Elementary symmetric polynomial of degree j divided by binomial(len, j).
double sigma_j(std::span<const double> kappas, int j);

/// V_0 .. V_(n-1) by integrating sigma_k over the surface with a product
/// rule of order p. The error is the difference to the rule of order p/2.
std::vector<quad::Estimate> quermassintegrals(const ConvexBody& body, int order = 48);
quad::Estimate quermassintegral(const ConvexBody& body, int k, int order = 48);

/// Integral over the boundary of fn(x, kappas).
quad::Estimate surface_integrate(const ConvexBody& body,
                                 const std::function<double(std::span<const double>, std::span<const double>)>& fn,
                                 int order = 48);

/// V_1^(n-1) - V_0^(n-2) V_(n-1) from precomputed quermassintegrals.
double af_gap(std::span<const quad::Estimate> v);
double af_gap(const ConvexBody& body, int order = 48);

struct ChainEntry {
  int i = 0, j = 0, k = 0;
  double lhs = 0.0;  // V_j^(k-i)
  double rhs = 0.0;  // V_i^(k-j) V_k^(j-i)
};

/// Every instance 0 <= i < j < k <= n-1 of V_j^(k-i) >= V_i^(k-j) V_k^(j-i).
std::vector<ChainEntry> af_chain(std::span<const quad::Estimate> v);

/// Disjoint convex bodies. Construction rejects pairs whose bounding balls meet.
class HorizonSet {
 public:
  HorizonSet() = default;
  explicit HorizonSet(std::vector<BodyPtr> bodies);

  const std::vector<BodyPtr>& bodies() const noexcept { return bodies_; }
  bool empty() const noexcept { return bodies_.empty(); }
  std::size_t size() const noexcept { return bodies_.size(); }

 private:
  std::vector<BodyPtr> bodies_;
};

/// sum_i (1/2) (|Sigma_i| / omega)^((n-2)/(n-1)) from areas.
double penrose_bound_from_areas(std::span<const double> areas, int n);
double penrose_bound(const HorizonSet& horizons, int n, int order = 48);

/// Left minus right of sum_i (1/2)(A_i/omega)^e >= (1/2)(sum A_i/omega)^e.
double superadditivity_gap(std::span<const double> areas, int n);

/// sum_i integral of H0 over Sigma_i / (2 (n-1) omega) = sum_i V_1 / (2 omega).
quad::Estimate horizon_mean_curvature_term(const HorizonSet& horizons, int n, int order = 48);

}  // namespace graphmass::convex
