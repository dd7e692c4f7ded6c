#pragma once

// Quadrature on spheres, exteriors of balls, and limits in the radius.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "graphmass/field.hpp"

namespace graphmass::quad {

/// Area of the unit sphere S^(n-1) in R^n: 2 pi^(n/2) / Gamma(n/2).
double unit_sphere_area(int n);

/// Serial pairwise summation. Used for every reduction so that results do
/// not depend on the number of threads.
double pairwise_sum(std::span<const double> values);

enum class Exec { Serial, Parallel };

/// Nodes on the unit sphere with weights summing to its area.
struct SphereRule {
  enum class Kind { Product, QuasiMonteCarlo };

  int n = 0;
  Kind kind = Kind::Product;
  int degree = -1;             // polynomial exactness of a product rule
  std::vector<double> nodes;   // size() * n, row-major
  std::vector<double> weights;
  /// Lower-order product rule used for the error estimate.
  std::shared_ptr<const SphereRule> coarse;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> node(std::size_t i) const noexcept { return {nodes.data() + i * n, static_cast<std::size_t>(n)}; }
};

/// Product rule: 2p equispaced angles on the circle and p Gauss-Gegenbauer
/// nodes for each further polar angle. Exact through degree 2p - 1.
/// Carries a coarse rule with p/2 points per angle.
SphereRule product_rule(int n, int p);

/// Antipodal pairs of normalized Gaussian vectors from a shifted Halton
/// sequence. Node i depends only on (seed, i). Odd integrands cancel exactly.
SphereRule qmc_rule(int n, int pairs, std::uint64_t seed);

struct QuadConfig {
  int sphere_order = 32;         // product rule p for flux integrals
  int volume_sphere_order = 12;  // product rule p for shells in volume integrals
  int qmc_pairs = 4096;          // flux integrals for n >= 4
  int volume_qmc_pairs = 384;    // shells in volume integrals for n >= 4
  int product_max_dim = 3;       // product rules up to this n, quasi-Monte-Carlo above
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_panels = 600;
  double r_max = 0.0;            // 0 selects 1e3 * max(1, largest hole radius)
  int horizon_levels = 20;       // graded panels toward a hole, ratio 1/2
  double partition_inner = 0.25; // hole weight is 1 out to a + partition_inner (outer - a)
  int surface_order = 0;         // product rule p on horizon surfaces; 0 picks by dimension
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  std::vector<double> radii;     // extrapolation radii; empty selects the default
  Exec exec = Exec::Parallel;
};

/// Rule used for flux integrals (volume = false) or volume shells.
SphereRule sphere_rule_for(int n, const QuadConfig& cfg, bool volume);

/// surface_order if set, else the largest even p <= 48 with 2 p^(n-1) <= 2.5e5 nodes.
int surface_order_for(int n, const QuadConfig& cfg);

using PointFn = std::function<double(std::span<const double>)>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Integral of fn over the sphere |x - center| = r.
Estimate sphere_integrate(const PointFn& fn, double r, const SphereRule& rule, std::span<const double> center = {},
                          Exec exec = Exec::Parallel);

struct VolumeResult {
  double value = 0.0;            // includes the fitted tail and near-hole remainders
  double error = 0.0;            // radial Kronrod-Gauss and angular errors plus remainder and tail uncertainties
  double tail = 0.0;             // fitted contribution beyond r_max
  double tail_bound = 0.0;
  double decay = 0.0;            // fitted exponent q of fn ~ C r^-q (infinity when fn vanishes)
  double hole_remainder = 0.0;   // estimated contribution of the unresolved layers next to holes
  double angular_error = 0.0;    // sum over panels of |fine - coarse sphere rule|, product rules only
  double min_value = 0.0;        // smallest fn value seen at any node
  double r_max = 0.0;
  std::size_t evaluations = 0;
  int panels = 0;
};

/// Integral of fn over R^n minus the given balls, in the flat volume element.
///
/// Shells around the origin carry GK15 radial panels refined adaptively to
/// max(abs_tol, rel_tol |I|). Each hole gets a graded mesh of panels
/// [a + a 2^-(j+1), a + a 2^-j]; the layer inside the last one is estimated
/// from the ratio of the two innermost panels. Several holes, or one
/// off-center hole, are handled with a smooth partition of unity into
/// hole-centered shells and origin-centered shells. The error includes the
/// difference to the coarse sphere rule on every final panel. Beyond r_max the shell
/// average is fitted to C r^-q; q <= n throws NumericalError.
VolumeResult exterior_volume_integrate(const PointFn& fn, int n, std::span<const Ball> holes, const QuadConfig& cfg);

struct Limit {
  double value = 0.0;
  double uncertainty = 0.0;
  bool inflated = false;  // samples did not approach a limit monotonically
};

/// Fits v(r) = L + c r^-s on every triple of samples (r increasing) and
/// returns the fit on the outermost triple, with the spread over all triples
/// as uncertainty. Non-monotone samples return the last value with the
/// sample spread as uncertainty and the inflated flag set.
Limit extrapolate_limit(std::span<const double> radii, std::span<const double> values);

/// Default extrapolation radii {R/8, R/4, R/2, R}.
std::vector<double> default_radii(double r_max);

}  // namespace graphmass::quad
