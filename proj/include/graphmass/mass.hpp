#pragma once

// Mass of a graph manifold by boundary flux, bulk curvature, and horizon
// geometry, with the positivity and Penrose checks built on them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphmass/convexgeom.hpp"
#include "graphmass/fd.hpp"
#include "graphmass/field.hpp"
#include "graphmass/quad.hpp"
#include "graphmass/radial.hpp"

namespace graphmass::mass {

struct Expected {
  std::optional<double> mass;
  std::optional<double> bound;
  std::optional<double> boundary;
  std::optional<double> bulk;
};

struct Scenario {
  std::string name;
  int n = 3;
  FieldPtr field;
  convex::HorizonSet horizons;
  double decay = 1.0;  // p in f_i = O(|x|^(-p/2))
  /// Set when field is F(|x|) about the origin.
  std::optional<jets::RadialProfile> profile;
  /// Convex-geometry checks only (no graph function is attached).
  bool geometry_only = false;
  /// Built by gluing; the horizon identity is held to the looser tolerance.
  bool glued = false;
  Expected expected;
  quad::QuadConfig quad;
  std::vector<std::string> exercises;
};

// ---------------------------------------------------------------- flux

struct FluxSample {
  double radius = 0.0;
  double mass = 0.0;           // (f_ii f_j - f_ij f_i) nu_j
  double mass_weighted = 0.0;  // same divided by 1 + |grad f|^2
  double error = 0.0;
  std::optional<double> spherical;  // closed form for radial scenarios
};

/// (2 (n-1) omega)^-1 times the flux of (f_ii f_j - f_ij f_i) through S_r with
/// nu = x / r, and the variant with the 1 / (1 + |grad f|^2) factor.
FluxSample adm_flux_mass(const Scenario& s, double r, const quad::SphereRule& rule);
FluxSample adm_flux_mass(const Scenario& s, double r);

struct AdmResult {
  std::vector<FluxSample> samples;
  quad::Limit limit;
  quad::Limit limit_weighted;
  double uncertainty = 0.0;  // extrapolation spread plus sample quadrature error
  bool variants_agree = false;

  double mass() const noexcept { return limit.value; }
};

/// Flux masses at the configured radii, extrapolated in r. Throws
/// NumericalError if the samples do not settle.
AdmResult adm_mass(const Scenario& s);

/// r_max for flux and volume integrals: 1e3 times the largest horizon scale (or 1).
double outer_radius(const Scenario& s);

// ---------------------------------------------------------------- bulk

struct BulkResult {
  double mass = 0.0;  // integral of R dV_flat / (2 (n-1) omega)
  double error = 0.0;
  double tail_bound = 0.0;
  double decay = 0.0;
  double hole_remainder = 0.0;
  double min_r = 0.0;  // smallest R at a quadrature node, after the roundoff floor
  std::size_t evaluations = 0;
  int panels = 0;
};

/// Integral of R over the exterior of the horizons. Spherical horizons only.
BulkResult bulk_mass(const Scenario& s);

/// Roundoff floor for R at a point: R is a difference of terms of size
/// T = (Lap f^2 + |Hess f|^2) / (1 + |grad f|^2), so values above
/// -(1e-9 + 1e-13 T) count as nonnegative.
double curvature_floor(const Jet3& j);

// ---------------------------------------------------------------- horizons

struct OffsetSample {
  double offset = 0.0;  // relative to the horizon scale
  double boundary = 0.0;
  double gap = 0.0;     // boundary flux term minus the geometric term
};

struct HorizonDiagnostics {
  std::string body;
  double level_spread = 0.0;  // variance of f over the surface
  double grad_near = 0.0;     // min |grad f| at offset 1e-6 * scale
  double grad_growth = 0.0;   // min ratio of |grad f| at offsets 1e-6 and 1e-4
  bool level_ok = false;
  bool blowup_ok = false;
  std::vector<OffsetSample> convergence;
  double rate = 0.0;          // fitted exponent of gap ~ offset^rate
  bool rate_measured = false; // false when every gap is at roundoff level
};

struct Decomposition {
  double boundary = 0.0;  // horizon mean-curvature term
  double boundary_error = 0.0;
  double bulk = 0.0;
  double total = 0.0;
  double adm = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool hypotheses_ok = false;
  std::vector<HorizonDiagnostics> horizons;
};

HorizonDiagnostics horizon_diagnostics(const Scenario& s, const convex::ConvexBody& body);
Decomposition mass_decomposition(const Scenario& s, const AdmResult& adm, const BulkResult& bulk);
Decomposition mass_decomposition(const Scenario& s);

/// f_r(r)^2 r^(n-2) / 2, the flux mass of a radial graph at radius r.
double spherical_mass(const jets::RadialProfile& profile, int n, double r);

// ---------------------------------------------------------------- sign of R

struct CurvatureSample {
  std::size_t points = 0;
  double min_r = 0.0;        // raw minimum
  double min_margin = 0.0;   // min of R + floor; negative means R < 0 beyond roundoff
  double max_abs_r = 0.0;
  bool nonnegative = false;
  std::vector<double> witness;  // point of the most negative R
};

/// Up to `count` quasi-random points outside the horizons, flat (count * n).
/// Around each horizon they sit at normal offsets log-spaced from
/// min_offset to 1e3 body scales; without horizons, at radii 0.1 to 1e3.
std::vector<double> exterior_sample_points(const Scenario& s, int count, double min_offset);

/// R at exterior_sample_points.
CurvatureSample sample_scalar_curvature(const Scenario& s, int count, double min_offset = 1e-6);

struct DivergenceSample {
  std::size_t points = 0;
  double max_defect = 0.0;  // max |div V - R| / (1 + |R|)
};

/// divergence_of_v against scalar_curvature at exterior_sample_points. Jets
/// lose about eps * offset^-2 near a horizon, hence the larger default offset.
DivergenceSample sample_divergence_identity(const Scenario& s, int count, double min_offset = 1e-2);

// ---------------------------------------------------------------- checks

enum class Verdict { Pass, Fail, HypothesisViolated, NumericalFailure, NotApplicable };
const char* to_string(Verdict v);

struct PenroseReport {
  double m = 0.0;
  double bound = 0.0;
  double bulk = 0.0;
  double margin = 0.0;  // m - bound - bulk
  double tolerance = 0.0;
  bool convex = false;
  bool r_nonnegative = false;
  bool inequality_holds = false;  // m >= bound - tolerance, whatever the hypotheses
  Verdict verdict = Verdict::NotApplicable;
  std::string detail;
};

PenroseReport penrose_check(const Scenario& s, const AdmResult& adm, const BulkResult& bulk,
                            const CurvatureSample& r_sample);

struct PmtReport {
  double m = 0.0;
  double uncertainty = 0.0;
  double min_r = 0.0;
  bool r_nonnegative = false;
  Verdict verdict = Verdict::NotApplicable;
  std::string detail;
};

/// bulk_min_margin is BulkResult::min_r when the bulk integral ran, else +inf.
PmtReport pmt_check(const Scenario& s, const AdmResult& adm, const CurvatureSample& r_sample,
                    double bulk_min_margin);

// ---------------------------------------------------------------- report

struct Checks {
  bool pmt = true;
  bool penrose = true;
  bool identities = true;
};

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::NotApplicable;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct BulkLevel {
  int sphere_rule = 0;  // product order, or QMC pairs
  double rel_tol = 0.0;
  BulkResult result;
};

struct BodyGeometry {
  std::string body;
  std::vector<quad::Estimate> quermass;  // V_0 .. V_(n-1)
  double af_gap = 0.0;
  double af_gap_error = 0.0;
  double chain_min_slack = 0.0;  // min over the chain of lhs - rhs, relative to lhs
  double gauss_map_error = 0.0;  // |V_(n-1) / omega - 1|
};

/// Quermassintegrals of one body with the Aleksandrov-Fenchel quantities
/// derived from them; af_gap_error propagates the quadrature errors.
BodyGeometry body_geometry(const convex::ConvexBody& body, int order);

struct MassReport {
  std::string scenario;
  int n = 0;
  std::string field;
  bool geometry_only = false;
  bool glued = false;
  std::vector<std::string> exercises;

  std::optional<AdmResult> adm;
  std::vector<BulkLevel> bulk_levels;  // coarse to fine; the last is the reported bulk mass
  std::optional<Decomposition> decomposition;
  std::optional<double> penrose_bound;
  std::optional<PenroseReport> penrose;
  std::optional<PmtReport> pmt;
  std::optional<CurvatureSample> curvature;
  std::optional<DivergenceSample> divergence;
  std::optional<double> radial_max_rel_diff;  // spherical_mass against flux samples
  std::optional<double> superadditivity_gap;
  std::vector<BodyGeometry> geometry;
  std::optional<jets::FlatnessReport> flatness;
  std::vector<CheckResult> checks;

  const BulkResult* bulk() const { return bulk_levels.empty() ? nullptr : &bulk_levels.back().result; }
  /// 1 on any failed check, else 4 on a numerical failure, else 2 on a
  /// violated hypothesis, else 0.
  int exit_code() const;
};

/// Runs every computation the requested checks need and records a verdict per
/// check. Numerical failures and hypothesis violations become verdicts;
/// configuration errors propagate.
MassReport analyze(const Scenario& s, const Checks& checks);

int combine_exit_codes(std::span<const int> codes);

}  // namespace graphmass::mass
