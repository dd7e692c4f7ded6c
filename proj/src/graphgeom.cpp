#include "graphmass/graphgeom.hpp"

#include <cmath>

#include "graphmass/errors.hpp"

namespace graphmass::geom {
namespace {

// Contractions shared by R, V and div V.
struct Contractions {
  int n = 0;
  double s = 1.0;      // 1 + |grad f|^2
  double lap = 0.0;    // f_ii
  double hh = 0.0;     // f_ij f_ij
  double ghg = 0.0;    // f_j f_k f_jk
  double hg_sq = 0.0;  // |Hess f grad f|^2
  std::array<double, jets::kMaxDim> hg{};  // (Hess f grad f)_j
};

Contractions contract(const Jet3& f) {
  Contractions c;
  c.n = f.dim();
  double gsq = 0.0;
  for (int i = 0; i < c.n; ++i) {
    gsq += f.grad(i) * f.grad(i);
    c.lap += f.hess(i, i);
    double row = 0.0;
    for (int j = 0; j < c.n; ++j) {
      c.hh += f.hess(i, j) * f.hess(i, j);
      row += f.hess(i, j) * f.grad(j);
    }
    c.hg[i] = row;
    c.ghg += f.grad(i) * row;
    c.hg_sq += row * row;
  }
  c.s = 1.0 + gsq;
  return c;
}

double grad_norm(const Jet3& f) {
  double gsq = 0.0;
  for (int i = 0; i < f.dim(); ++i) gsq += f.grad(i) * f.grad(i);
  return std::sqrt(gsq);
}

}  // namespace

double scalar_curvature(const Jet3& f) {
  const Contractions c = contract(f);
  return (c.lap * c.lap - c.hh - 2.0 / c.s * (c.lap * c.ghg - c.hg_sq)) / c.s;
}

Eigen::VectorXd div_field_v(const Jet3& f) {
  const Contractions c = contract(f);
  Eigen::VectorXd v(c.n);
  for (int j = 0; j < c.n; ++j) v[j] = (c.lap * f.grad(j) - c.hg[j]) / c.s;
  return v;
}

double divergence_of_v(const Jet3& f) {
  // d_j [ (f_ii f_j - f_ij f_i) / s ]
  //   = (f_iij f_j + f_ii f_jj - f_ijj f_i - f_ij f_ij) / s
  //     - 2 f_jk f_k (f_ii f_j - f_ij f_i) / s^2
  const Contractions c = contract(f);
  const int n = c.n;
  double third_lap_grad = 0.0;  // f_iij f_j
  double grad_third_lap = 0.0;  // f_ijj f_i
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      third_lap_grad += f.third(i, i, j) * f.grad(j);
      grad_third_lap += f.third(i, j, j) * f.grad(i);
    }
  double flux = 0.0;
  for (int j = 0; j < n; ++j) flux += c.hg[j] * (c.lap * f.grad(j) - c.hg[j]);
  return (third_lap_grad + c.lap * c.lap - grad_third_lap - c.hh) / c.s - 2.0 * flux / (c.s * c.s);
}

MetricJet metric_jet(const Jet3& f) {
  const int n = f.dim();
  MetricJet m;
  m.n = n;
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) grad[i] = f.grad(i);
  m.grad_norm_sq = grad.squaredNorm();
  const double s = 1.0 + m.grad_norm_sq;
  m.g = Eigen::MatrixXd::Identity(n, n) + grad * grad.transpose();
  m.ginv = Eigen::MatrixXd::Identity(n, n) - grad * grad.transpose() / s;
  m.gamma.assign(static_cast<std::size_t>(n * n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.gamma[(k * n + i) * n + j] = f.hess(i, j) * f.grad(k) / s;
  m.volume_factor = std::sqrt(s);
  m.scalar_curvature = scalar_curvature(f);
  m.v = div_field_v(f);
  return m;
}

double flat_mean_curvature(const Jet3& f) {
  const double norm = grad_norm(f);
  if (norm == 0.0) throw DomainError("level set is degenerate where grad f vanishes");
  const Contractions c = contract(f);
  return (c.lap - c.ghg / (norm * norm)) / norm;
}

double induced_mean_curvature(const Jet3& f) {
  const double norm = grad_norm(f);
  return flat_mean_curvature(f) / std::sqrt(1.0 + norm * norm);
}

double boundary_integrand(const Jet3& f, std::span<const double> nu) {
  const Contractions c = contract(f);
  double sum = 0.0;
  for (int j = 0; j < c.n; ++j) sum += (c.lap * f.grad(j) - c.hg[j]) * nu[j];
  return sum / c.s;
}

MetricJet metric_jet(const ScalarField& field, std::span<const double> x) { return metric_jet(field.derivatives(x)); }
double scalar_curvature(const ScalarField& field, std::span<const double> x) {
  return scalar_curvature(field.derivatives(x));
}
Eigen::VectorXd div_field_v(const ScalarField& field, std::span<const double> x) {
  return div_field_v(field.derivatives(x));
}
double divergence_of_v(const ScalarField& field, std::span<const double> x) {
  return divergence_of_v(field.derivatives(x));
}
double flat_mean_curvature(const ScalarField& field, std::span<const double> x) {
  return flat_mean_curvature(field.derivatives(x));
}
double induced_mean_curvature(const ScalarField& field, std::span<const double> x) {
  return induced_mean_curvature(field.derivatives(x));
}
double boundary_integrand(const ScalarField& field, std::span<const double> x, std::span<const double> nu) {
  return boundary_integrand(field.derivatives(x), nu);
}

}  // namespace graphmass::geom
