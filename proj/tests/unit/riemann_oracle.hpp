#pragma once

// Scalar curvature of g = delta + df (x) df by brute force: numerically
// inverted metric, Christoffels from metric derivatives, Riemann, Ricci,
// trace. Shares nothing with the closed form in the library.

#include <Eigen/Dense>
#include <vector>

#include "graphmass/jet.hpp"

namespace oracle {

inline double generic_scalar_curvature(const graphmass::jets::Jet3& f) {
  const int n = f.dim();
  auto f1 = [&](int i) { return f.grad(i); };
  auto f2 = [&](int i, int j) { return f.hess(i, j); };
  auto f3 = [&](int i, int j, int k) { return f.third(i, j, k); };

  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = (i == j ? 1.0 : 0.0) + f1(i) * f1(j);
  const Eigen::MatrixXd gi = g.inverse();

  auto idx3 = [n](int a, int b, int c) { return (a * n + b) * n + c; };
  auto idx4 = [n](int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; };
  // dg[k][i][j] = d_k g_ij, ddg[l][k][i][j] = d_l d_k g_ij
  std::vector<double> dg(n * n * n), ddg(n * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dg[idx3(k, i, j)] = f2(i, k) * f1(j) + f1(i) * f2(j, k);
        for (int l = 0; l < n; ++l)
          ddg[idx4(l, k, i, j)] =
              f3(i, k, l) * f1(j) + f2(i, k) * f2(j, l) + f2(i, l) * f2(j, k) + f1(i) * f3(j, k, l);
      }

  // lowered Christoffels and their derivatives
  std::vector<double> gl(n * n * n), dgl(n * n * n * n);
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        gl[idx3(d, b, c)] = 0.5 * (dg[idx3(b, d, c)] + dg[idx3(c, d, b)] - dg[idx3(d, b, c)]);
        for (int e = 0; e < n; ++e)
          dgl[idx4(e, d, b, c)] = 0.5 * (ddg[idx4(e, b, d, c)] + ddg[idx4(e, c, d, b)] - ddg[idx4(e, d, b, c)]);
      }

  // Gamma^a_bc and d_e Gamma^a_bc
  std::vector<double> gam(n * n * n, 0.0), dgam(n * n * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) gam[idx3(a, b, c)] += gi(a, d) * gl[idx3(d, b, c)];
  for (int e = 0; e < n; ++e) {
    // d_e g^{ad} = -g^{ap} d_e g_pq g^{qd}
    Eigen::MatrixXd dge(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) dge(p, q) = dg[idx3(e, p, q)];
    const Eigen::MatrixXd dgi = -gi * dge * gi;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double s = 0.0;
          for (int d = 0; d < n; ++d) s += dgi(a, d) * gl[idx3(d, b, c)] + gi(a, d) * dgl[idx4(e, d, b, c)];
          dgam[idx4(e, a, b, c)] = s;
        }
  }

  // Ric_bd = R^a_bad = d_a Gamma^a_db - d_d Gamma^a_ab + Gamma^a_ae Gamma^e_db - Gamma^a_de Gamma^e_ab
  double scalar = 0.0;
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double ric = 0.0;
      for (int a = 0; a < n; ++a) {
        ric += dgam[idx4(a, a, d, b)] - dgam[idx4(d, a, a, b)];
        for (int e = 0; e < n; ++e) ric += gam[idx3(a, a, e)] * gam[idx3(e, d, b)] - gam[idx3(a, d, e)] * gam[idx3(e, a, b)];
      }
      scalar += gi(b, d) * ric;
    }
  return scalar;
}

}  // namespace oracle
