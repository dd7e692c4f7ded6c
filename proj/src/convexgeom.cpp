#include "graphmass/convexgeom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphmass/errors.hpp"
#include "parallel.hpp"

namespace graphmass::convex {
namespace {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::string join(std::span<const double> v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

// Orthonormal basis of the complement of the unit vector nu, as columns.
Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& nu) {
  const int n = static_cast<int>(nu.size());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(nu);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

Sphere::Sphere(std::vector<double> center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 2 || static_cast<int>(center_.size()) > jets::kMaxDim) throw Error("sphere dimension out of range");
  if (!(radius > 0)) throw Error("sphere radius must be positive");
}

std::string Sphere::describe() const { return "sphere(center=" + join(center_) + ",radius=" + std::to_string(radius_) + ")"; }

Jet3 Sphere::defining_jet(std::span<const double> x) const {
  const int n = dim();
  Jet3 j(n, -radius_ * radius_);
  double v = -radius_ * radius_;
  for (int i = 0; i < n; ++i) {
    const double y = x[i] - center_[i];
    v += y * y;
    j.set_grad(i, 2 * y);
    j.set_hess(i, i, 2.0);
  }
  j.set_value(v);
  return j;
}

SurfacePoint Sphere::surface_point(std::span<const double> theta) const {
  SurfacePoint p;
  p.x.resize(center_.size());
  for (std::size_t i = 0; i < center_.size(); ++i) p.x[i] = center_[i] + radius_ * theta[i];
  p.jacobian = std::pow(radius_, dim() - 1);
  return p;
}

Ellipsoid::Ellipsoid(std::vector<double> center, std::vector<double> semiaxes)
    : center_(std::move(center)), axes_(std::move(semiaxes)) {
  if (center_.size() < 2 || static_cast<int>(center_.size()) > jets::kMaxDim) throw Error("ellipsoid dimension out of range");
  if (axes_.size() != center_.size()) throw Error("ellipsoid needs one semiaxis per dimension");
  for (double a : axes_)
    if (!(a > 0)) throw Error("ellipsoid semiaxes must be positive");
}

std::string Ellipsoid::describe() const { return "ellipsoid(center=" + join(center_) + ",semiaxes=" + join(axes_) + ")"; }

Jet3 Ellipsoid::defining_jet(std::span<const double> x) const {
  const int n = dim();
  Jet3 j(n);
  double v = -1.0;
  for (int i = 0; i < n; ++i) {
    const double a2 = axes_[i] * axes_[i];
    const double y = x[i] - center_[i];
    v += y * y / a2;
    j.set_grad(i, 2 * y / a2);
    j.set_hess(i, i, 2 / a2);
  }
  j.set_value(v);
  return j;
}

SurfacePoint Ellipsoid::surface_point(std::span<const double> theta) const {
  // x = c + A theta; dSigma = det(A) |A^-1 theta| dS
  const int n = dim();
  SurfacePoint p;
  p.x.resize(n);
  double det = 1.0, s = 0.0;
  for (int i = 0; i < n; ++i) {
    p.x[i] = center_[i] + axes_[i] * theta[i];
    det *= axes_[i];
    s += theta[i] * theta[i] / (axes_[i] * axes_[i]);
  }
  p.jacobian = det * std::sqrt(s);
  return p;
}

double Ellipsoid::bounding_radius() const { return *std::max_element(axes_.begin(), axes_.end()); }

double Ellipsoid::scale() const {
  double p = 1.0;
  for (double a : axes_) p *= a;
  return std::pow(p, 1.0 / dim());
}

SmoothLevelSet::SmoothLevelSet(FieldPtr phi, double level, std::vector<double> center)
    : phi_(std::move(phi)), level_(level), center_(std::move(center)) {
  if (!phi_) throw Error("level set needs a defining function");
  if (static_cast<int>(center_.size()) != phi_->dim()) throw Error("level set center dimension mismatch");
  if (!(phi_->value(center_) < level_)) throw Error("level set center must lie inside {phi < level}");
  const quad::SphereRule rule = quad::product_rule(dim(), 8);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = ray_radius(rule.node(i));
    bounding_ = std::max(bounding_, r);
    sum += r * rule.weights[i];
  }
  bounding_ *= 1.05;
  mean_radius_ = sum / quad::unit_sphere_area(dim());
}

std::string SmoothLevelSet::describe() const {
  return "level_set(" + phi_->describe() + " <= " + std::to_string(level_) + ")";
}

double SmoothLevelSet::ray_radius(std::span<const double> theta) const {
  const int n = dim();
  std::vector<double> x(n);
  auto g = [&](double r) {
    for (int i = 0; i < n; ++i) x[i] = center_[i] + r * theta[i];
    return phi_->value(x) - level_;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; g(hi) < 0; ++it) {
    lo = hi;
    hi *= 2;
    if (it > 200) throw DomainError("level set is unbounded along a ray");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SurfacePoint SmoothLevelSet::surface_point(std::span<const double> theta) const {
  // radial graph: dSigma = rho^(n-1) / (nu . theta) dS
  const int n = dim();
  const double rho = ray_radius(theta);
  SurfacePoint p;
  p.x.resize(n);
  for (int i = 0; i < n; ++i) p.x[i] = center_[i] + rho * theta[i];
  const Jet3 j = phi_->jet(p.x);
  double gn = 0.0, dot = 0.0;
  for (int i = 0; i < n; ++i) {
    gn += j.grad(i) * j.grad(i);
    dot += j.grad(i) * theta[i];
  }
  gn = std::sqrt(gn);
  if (!(dot > 0)) throw DomainError("level set is not star-shaped about its center");
  p.jacobian = std::pow(rho, n - 1) * gn / dot;
  return p;
}

std::vector<double> outward_normal(const ConvexBody& body, std::span<const double> x) {
  const Jet3 j = body.defining_jet(x);
  std::vector<double> nu(j.grad_span().begin(), j.grad_span().end());
  const double g = norm(nu);
  if (g == 0.0) throw DomainError("defining function has a critical point on the surface");
  for (double& v : nu) v /= g;
  return nu;
}

std::vector<double> principal_curvatures(const ConvexBody& body, std::span<const double> x) {
  const int n = body.dim();
  const Jet3 j = body.defining_jet(x);
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) grad[i] = j.grad(i);
  const double g = grad.norm();
  if (g == 0.0) throw DomainError("defining function has a critical point on the surface");
  if (std::abs(j.value() - body.level()) / g > 1e-10 * std::max(1.0, body.scale()))
    throw DomainError("point is not on the surface of " + body.describe());
  Eigen::MatrixXd h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) h(a, b) = j.hess(a, b);
  const Eigen::MatrixXd t = tangent_frame(grad / g);
  const Eigen::MatrixXd s = t.transpose() * h * t / g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> k(solver.eigenvalues().data(), solver.eigenvalues().data() + (n - 1));
  const double top = std::max(std::abs(k.front()), std::abs(k.back()));
  if (k.front() < -1e-10 * std::max(1.0, top))
    throw HypothesisError("body is not convex: principal curvature " + std::to_string(k.front()) + " at " + join(x) +
                          " on " + body.describe());
  return k;
}

double sigma_j(std::span<const double> kappas, int j) {
  const int m = static_cast<int>(kappas.size());
  if (j < 0 || j > m) throw Error("sigma_j degree out of range");
  std::vector<double> e(j + 1, 0.0);
  e[0] = 1.0;
  for (double k : kappas)
    for (int d = j; d >= 1; --d) e[d] += k * e[d - 1];
  return e[j] / binomial(m, j);
}

quad::Estimate surface_integrate(const ConvexBody& body,
                                 const std::function<double(std::span<const double>, std::span<const double>)>& fn,
                                 int order) {
  const quad::SphereRule rule = quad::product_rule(body.dim(), order);
  auto integrate = [&](const quad::SphereRule& q) {
    std::vector<double> vals(q.size());
    detail::for_each_index(q.size(), quad::Exec::Parallel, [&](std::size_t i) {
      const SurfacePoint p = body.surface_point(q.node(i));
      const std::vector<double> k = principal_curvatures(body, p.x);
      vals[i] = q.weights[i] * p.jacobian * fn(p.x, k);
    });
    return quad::pairwise_sum(vals);
  };
  quad::Estimate e;
  e.value = integrate(rule);
  if (rule.coarse) e.error = std::abs(e.value - integrate(*rule.coarse));
  return e;
}

std::vector<quad::Estimate> quermassintegrals(const ConvexBody& body, int order) {
  const int n = body.dim();
  const quad::SphereRule rule = quad::product_rule(n, order);
  auto integrate = [&](const quad::SphereRule& q) {
    // per node, sigma_0 .. sigma_(n-1) times weight and area element
    std::vector<double> vals(q.size() * n);
    detail::for_each_index(q.size(), quad::Exec::Parallel, [&](std::size_t i) {
      const SurfacePoint p = body.surface_point(q.node(i));
      const std::vector<double> k = principal_curvatures(body, p.x);
      for (int d = 0; d < n; ++d) vals[d * q.size() + i] = q.weights[i] * p.jacobian * sigma_j(k, d);
    });
    std::vector<double> out(n);
    for (int d = 0; d < n; ++d) out[d] = quad::pairwise_sum(std::span<const double>(vals.data() + d * q.size(), q.size()));
    return out;
  };
  const std::vector<double> fine = integrate(rule);
  std::vector<double> coarse(n, 0.0);
  if (rule.coarse) coarse = integrate(*rule.coarse);
  std::vector<quad::Estimate> v(n);
  for (int d = 0; d < n; ++d) v[d] = {fine[d], rule.coarse ? std::abs(fine[d] - coarse[d]) : 0.0};
  return v;
}

quad::Estimate quermassintegral(const ConvexBody& body, int k, int order) {
  if (k < 0 || k >= body.dim()) throw Error("quermassintegral index out of range");
  return quermassintegrals(body, order)[k];
}

double af_gap(std::span<const quad::Estimate> v) {
  const int n = static_cast<int>(v.size());
  return std::pow(v[1].value, n - 1) - std::pow(v[0].value, n - 2) * v[n - 1].value;
}

double af_gap(const ConvexBody& body, int order) { return af_gap(quermassintegrals(body, order)); }

std::vector<ChainEntry> af_chain(std::span<const quad::Estimate> v) {
  const int n = static_cast<int>(v.size());
  std::vector<ChainEntry> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        out.push_back({i, j, k, std::pow(v[j].value, k - i), std::pow(v[i].value, k - j) * std::pow(v[k].value, j - i)});
  return out;
}

HorizonSet::HorizonSet(std::vector<BodyPtr> bodies) : bodies_(std::move(bodies)) {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    if (!bodies_[i]) throw Error("null horizon body");
    if (bodies_[i]->dim() != bodies_[0]->dim()) throw Error("horizon bodies have different dimensions");
    for (std::size_t j = 0; j < i; ++j) {
      const auto a = bodies_[i]->center(), b = bodies_[j]->center();
      double d = 0.0;
      for (std::size_t q = 0; q < a.size(); ++q) d += (a[q] - b[q]) * (a[q] - b[q]);
      if (!(std::sqrt(d) > bodies_[i]->bounding_radius() + bodies_[j]->bounding_radius()))
        throw ConfigError("horizon components " + bodies_[j]->describe() + " and " + bodies_[i]->describe() +
                          " are not separated");
    }
  }
}

double penrose_bound_from_areas(std::span<const double> areas, int n) {
  const double omega = quad::unit_sphere_area(n);
  const double e = (n - 2.0) / (n - 1.0);
  std::vector<double> terms;
  for (double a : areas) terms.push_back(0.5 * std::pow(a / omega, e));
  return quad::pairwise_sum(terms);
}

double penrose_bound(const HorizonSet& horizons, int n, int order) {
  std::vector<double> areas;
  for (const auto& b : horizons.bodies()) areas.push_back(quermassintegral(*b, 0, order).value);
  return penrose_bound_from_areas(areas, n);
}

double superadditivity_gap(std::span<const double> areas, int n) {
  const double omega = quad::unit_sphere_area(n);
  const double e = (n - 2.0) / (n - 1.0);
  const double total = quad::pairwise_sum(areas);
  return penrose_bound_from_areas(areas, n) - 0.5 * std::pow(total / omega, e);
}

quad::Estimate horizon_mean_curvature_term(const HorizonSet& horizons, int n, int order) {
  const double omega = quad::unit_sphere_area(n);
  quad::Estimate out;
  for (const auto& b : horizons.bodies()) {
    const quad::Estimate v1 = quermassintegral(*b, 1, order);
    out.value += v1.value / (2 * omega);
    out.error += v1.error / (2 * omega);
  }
  return out;
}

}  // namespace graphmass::convex
