#pragma once

#include <span>
#include <vector>

#include "graphmass/field.hpp"

namespace graphmass::jets {

/// Central-difference jet with one step for every order. Each entry carries
/// an O(h^2) truncation error. Throws DomainError if the stencil leaves the
/// field's domain.
Jet3 fd_jet(const ScalarField& field, std::span<const double> x, double h);

/// Central-difference jet with per-order default steps
/// h_k = eps^(1/(k+2)) * max(1, |x|) for derivative order k.
Jet3 fd_jet(const ScalarField& field, std::span<const double> x);

struct FlatnessRow {
  double radius = 0.0;
  double grad = 0.0;   // sup |f_i| |x|^(p/2)
  double hess = 0.0;   // sup |f_ij| |x|^(1+p/2)
  double third = 0.0;  // sup |f_ijk| |x|^(2+p/2)
};

struct FlatnessReport {
  double decay = 0.0;
  std::vector<FlatnessRow> rows;
  bool grad_grows = false;
  bool hess_grows = false;
  bool third_grows = false;

  bool flagged() const noexcept { return grad_grows || hess_grows || third_grows; }
};

/// Weighted sup-norms of the derivatives over sampled directions at each
/// radius. A column growing by more than 5% between the last two radii is
/// flagged as failing the decay hypothesis.
FlatnessReport flatness_report(const ScalarField& field, double decay, std::span<const double> radii,
                               int directions = 64);

}  // namespace graphmass::jets
