#pragma once

// Pointwise geometry of the graph metric g = delta + df (x) df.
//
// Every quantity is a closed-form function of the third-order jet of f, so
// each operation has a jet overload (used in quadrature kernels) and a field
// overload that evaluates the jet first.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "graphmass/field.hpp"

namespace graphmass::geom {

struct MetricJet {
  int n = 0;
  double grad_norm_sq = 0.0;  // |grad f|^2 in the flat metric
  Eigen::MatrixXd g;          // delta_ij + f_i f_j
  Eigen::MatrixXd ginv;       // delta_ij - f_i f_j / (1 + |grad f|^2)
  std::vector<double> gamma;  // Gamma^k_ij = f_ij f_k / (1 + |grad f|^2), stored [k][i][j]
  double volume_factor = 1.0; // sqrt(det g) = sqrt(1 + |grad f|^2)
  double scalar_curvature = 0.0;
  Eigen::VectorXd v;          // V_j = (f_ii f_j - f_ij f_i) / (1 + |grad f|^2)

  double christoffel(int k, int i, int j) const { return gamma[(k * n + i) * n + j]; }
};

MetricJet metric_jet(const Jet3& f);
MetricJet metric_jet(const ScalarField& field, std::span<const double> x);

/// R = (f_ii f_jj - f_ij f_ij - 2 f_j f_k (f_ii f_jk - f_ij f_ik) / (1 + |grad f|^2)) / (1 + |grad f|^2)
double scalar_curvature(const Jet3& f);
double scalar_curvature(const ScalarField& field, std::span<const double> x);

/// The divergence-form vector field V_j = (f_ii f_j - f_ij f_i) / (1 + |grad f|^2).
Eigen::VectorXd div_field_v(const Jet3& f);
Eigen::VectorXd div_field_v(const ScalarField& field, std::span<const double> x);

/// Flat divergence of V, expanded by the quotient rule from the third-order
/// jet. Equals the scalar curvature identically.
double divergence_of_v(const Jet3& f);
double divergence_of_v(const ScalarField& field, std::span<const double> x);

/// Flat mean curvature of the level set of f through x, taken as the
/// divergence of grad f / |grad f|:
///   H0 = (Laplacian f - Hess f(grad f, grad f) / |grad f|^2) / |grad f|.
/// A round sphere of radius a around a region where f increases outward gets
/// H0 = (n - 1) / a. Throws DomainError when grad f vanishes.
double flat_mean_curvature(const Jet3& f);
double flat_mean_curvature(const ScalarField& field, std::span<const double> x);

/// Mean curvature of the same level set inside the graph: H0 / sqrt(1 + |grad f|^2).
double induced_mean_curvature(const Jet3& f);
double induced_mean_curvature(const ScalarField& field, std::span<const double> x);

/// (f_ii f_j - f_ij f_i) nu_j / (1 + |grad f|^2) for a unit vector nu.
double boundary_integrand(const Jet3& f, std::span<const double> nu);
double boundary_integrand(const ScalarField& field, std::span<const double> x, std::span<const double> nu);

}  // namespace graphmass::geom
