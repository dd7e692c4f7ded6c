#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "graphmass/errors.hpp"
#include "graphmass/mass.hpp"

namespace graphmass::mass {
namespace {

constexpr int kSignSamples = 10000;
constexpr int kDivergenceSamples = 1000;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult within(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), std::abs(value) <= tol ? Verdict::Pass : Verdict::Fail, value, tol, std::move(detail)};
}

bool spherical_horizons(const Scenario& s) {
  for (const auto& b : s.horizons.bodies())
    if (!dynamic_cast<const convex::Sphere*>(b.get())) return false;
  return true;
}

void geometry_checks(const Scenario& s, MassReport& rep) {
  const int order = quad::surface_order_for(s.n, s.quad);
  std::vector<double> areas;
  for (const auto& b : s.horizons.bodies()) {
    rep.geometry.push_back(body_geometry(*b, order));
    areas.push_back(rep.geometry.back().quermass[0].value);
  }
  for (std::size_t i = 0; i < rep.geometry.size(); ++i) {
    const BodyGeometry& g = rep.geometry[i];
    const std::string tag = "[" + std::to_string(i) + "]";
    const double scale = std::pow(g.quermass[1].value, s.n - 1);
    const double tol = std::max(2 * g.af_gap_error, 1e-10 * scale);
    rep.checks.push_back({"af_gap" + tag, g.af_gap >= -tol ? Verdict::Pass : Verdict::Fail, g.af_gap, tol,
                          "V1^(n-1) - V0^(n-2) V(n-1); relative " + fmt(g.af_gap / scale)});
    double rel_err = 0.0;
    for (const auto& q : g.quermass) rel_err += q.error / std::abs(q.value);
    const double chain_tol = 1e-10 + s.n * rel_err;
    rep.checks.push_back({"af_chain" + tag, g.chain_min_slack >= -chain_tol ? Verdict::Pass : Verdict::Fail,
                          g.chain_min_slack, chain_tol, "min relative slack over all (i, j, k)"});
    rep.checks.push_back(within("gauss_map" + tag, g.gauss_map_error, 1e-6, "|V(n-1) / omega - 1|"));
  }
  rep.superadditivity_gap = convex::superadditivity_gap(areas, s.n);
  const double gap = *rep.superadditivity_gap;
  if (areas.size() == 1) {
    rep.checks.push_back({"superadditivity", gap == 0.0 ? Verdict::Pass : Verdict::Fail, gap, 0.0, "single body: zero gap"});
  } else {
    rep.checks.push_back({"superadditivity", gap > 0.0 ? Verdict::Pass : Verdict::Fail, gap, 0.0, "sum of bounds minus combined bound"});
  }
  rep.penrose_bound = convex::penrose_bound_from_areas(areas, s.n);
  if (s.expected.bound)
    rep.checks.push_back(within("penrose_bound", *rep.penrose_bound - *s.expected.bound,
                                1e-8 * std::max(1.0, std::abs(*s.expected.bound)), "against the expected bound"));
}

}  // namespace

BodyGeometry body_geometry(const convex::ConvexBody& body, int order) {
  const int n = body.dim();
  BodyGeometry g;
  g.body = body.describe();
  g.quermass = convex::quermassintegrals(body, order);
  const auto& v = g.quermass;
  g.af_gap = convex::af_gap(v);
  // first-order propagation of the quadrature errors
  g.af_gap_error = (n - 1) * std::pow(v[1].value, n - 2) * v[1].error +
                   (n - 2) * std::pow(v[0].value, std::max(0, n - 3)) * v[n - 1].value * v[0].error +
                   std::pow(v[0].value, n - 2) * v[n - 1].error;
  g.chain_min_slack = 0.0;
  bool first = true;
  for (const auto& c : convex::af_chain(v)) {
    const double slack = (c.lhs - c.rhs) / c.lhs;
    if (first || slack < g.chain_min_slack) g.chain_min_slack = slack;
    first = false;
  }
  g.gauss_map_error = std::abs(v[n - 1].value / quad::unit_sphere_area(n) - 1.0);
  return g;
}

int combine_exit_codes(std::span<const int> codes) {
  auto has = [&](int c) { return std::find(codes.begin(), codes.end(), c) != codes.end(); };
  for (int c : {1, 4, 2, 3})
    if (has(c)) return c;
  return 0;
}

int MassReport::exit_code() const {
  std::vector<int> codes;
  for (const auto& c : checks) {
    switch (c.verdict) {
      case Verdict::Fail: codes.push_back(1); break;
      case Verdict::NumericalFailure: codes.push_back(4); break;
      case Verdict::HypothesisViolated: codes.push_back(2); break;
      default: break;
    }
  }
  return combine_exit_codes(codes);
}

MassReport analyze(const Scenario& s, const Checks& want) {
  MassReport rep;
  rep.scenario = s.name;
  rep.n = s.n;
  rep.geometry_only = s.geometry_only;
  rep.glued = s.glued;
  rep.exercises = s.exercises;
  rep.field = s.field ? s.field->describe() : "none";

  auto numerical = [&](const std::string& stage, const std::exception& e) {
    rep.checks.push_back({stage, Verdict::NumericalFailure, 0.0, 0.0, e.what()});
  };

  if (!s.horizons.empty() && (want.identities || want.penrose || s.geometry_only)) geometry_checks(s, rep);
  if (s.geometry_only) return rep;

  // asymptotic flatness at the flux radii
  {
    const std::vector<double> radii = s.quad.radii.empty() ? quad::default_radii(outer_radius(s)) : s.quad.radii;
    rep.flatness = jets::flatness_report(*s.field, s.decay, radii);
    const bool bad = rep.flatness->flagged();
    rep.checks.push_back({"asymptotic_flatness", bad ? Verdict::HypothesisViolated : Verdict::Pass, s.decay, 0.0,
                          bad ? "weighted derivative norms grow at the outer radii" : "weighted derivative norms bounded"});
  }

  try {
    rep.adm = adm_mass(s);
  } catch (const NumericalError& e) {
    numerical("adm_mass", e);
  }

  const bool bulk_possible = spherical_horizons(s);
  if (bulk_possible) {
    try {
      // coarse level for the convergence table, then the configured one
      Scenario coarse = s;
      coarse.quad.volume_sphere_order = std::max(2, s.quad.volume_sphere_order / 2);
      coarse.quad.volume_qmc_pairs = std::max(16, s.quad.volume_qmc_pairs / 2);
      coarse.quad.rel_tol = s.quad.rel_tol * 100;
      for (const Scenario* sc : std::array<const Scenario*, 2>{&coarse, &s}) {
        BulkLevel level;
        level.sphere_rule = s.n <= sc->quad.product_max_dim ? sc->quad.volume_sphere_order : sc->quad.volume_qmc_pairs;
        level.rel_tol = sc->quad.rel_tol;
        level.result = bulk_mass(*sc);
        rep.bulk_levels.push_back(level);
      }
    } catch (const NumericalError& e) {
      rep.bulk_levels.clear();
      numerical("bulk_mass", e);
    }
  }
  const BulkResult* bulk = rep.bulk();

  if (want.pmt || want.penrose) {
    try {
      rep.curvature = sample_scalar_curvature(s, kSignSamples);
    } catch (const NumericalError& e) {
      numerical("curvature_sample", e);
    }
  }

  if (want.identities) {
    if (rep.adm) {
      const AdmResult& a = *rep.adm;
      rep.checks.push_back({"flux_variants_agree", a.variants_agree ? Verdict::Pass : Verdict::Fail,
                            a.limit.value - a.limit_weighted.value, a.uncertainty + a.limit_weighted.uncertainty,
                            "plain and 1/(1+|grad f|^2)-weighted flux limits"});
      if (s.expected.mass) {
        const double tol = std::max(1e-3 * std::max(1.0, std::abs(*s.expected.mass)), 5 * a.uncertainty);
        rep.checks.push_back(within("expected_mass", a.mass() - *s.expected.mass, tol, "flux mass against the closed form"));
      }
      if (s.profile) {
        double worst = 0.0;
        bool nonneg = true;
        for (const auto& f : a.samples) {
          const double sm = *f.spherical;
          nonneg = nonneg && sm >= 0.0;
          worst = std::max(worst, std::abs(sm - f.mass) / std::max(std::abs(sm), 1e-300));
        }
        rep.radial_max_rel_diff = worst;
        rep.checks.push_back(within("radial_consistency", worst, 1e-10, "spherical_mass against the flux at each radius"));
        rep.checks.push_back({"radial_nonnegative", nonneg ? Verdict::Pass : Verdict::Fail, 0.0, 0.0,
                              "f_r^2 r^(n-2) / 2 at the flux radii"});
      }
    }
    if (rep.adm && bulk) {
      const double m = rep.adm->mass();
      if (s.horizons.empty()) {
        const double tol = std::max(0.005 * std::abs(m), 5 * (rep.adm->uncertainty + bulk->error + bulk->tail_bound));
        rep.checks.push_back(within("bulk_identity", m - bulk->mass, tol, "flux mass minus the integral of R"));
      } else {
        rep.decomposition = mass_decomposition(s, *rep.adm, *bulk);
        const Decomposition& d = *rep.decomposition;
        rep.checks.push_back(within("horizon_identity", d.residual, d.tolerance,
                                    "flux mass minus (horizon mean-curvature term + integral of R)"));
        if (s.expected.boundary)
          rep.checks.push_back(within("boundary_term", d.boundary - *s.expected.boundary,
                                      std::max(1e-6 * std::max(1.0, std::abs(*s.expected.boundary)), 5 * d.boundary_error),
                                      "horizon mean-curvature term against the closed form"));
        if (s.expected.bulk)
          rep.checks.push_back(within("expected_bulk", d.bulk - *s.expected.bulk,
                                      std::max(1e-6, 5 * (bulk->error + bulk->tail_bound)), "integral of R against the closed form"));
        bool level = true, blowup = true;
        for (const auto& h : d.horizons) {
          level = level && h.level_ok;
          blowup = blowup && h.blowup_ok;
        }
        rep.checks.push_back({"horizon_level_set", level ? Verdict::Pass : Verdict::HypothesisViolated, 0.0, 1e-8,
                              "variance of f over each horizon"});
        rep.checks.push_back({"horizon_blowup", blowup ? Verdict::Pass : Verdict::HypothesisViolated, 0.0, 1e2,
                              "|grad f| at offset 1e-6 of the horizon scale, and its growth"});
      }
    } else if (rep.adm && !bulk_possible) {
      rep.checks.push_back({"horizon_identity", Verdict::NotApplicable, 0.0, 0.0, "bulk integral needs spherical horizons"});
    }
    try {
      rep.divergence = sample_divergence_identity(s, kDivergenceSamples);
      rep.checks.push_back(within("divergence_identity", rep.divergence->max_defect, 1e-9, "max |div V - R| / (1 + |R|)"));
    } catch (const NumericalError& e) {
      numerical("divergence_identity", e);
    }
  }

  if (want.penrose && !s.horizons.empty() && rep.adm && rep.curvature) {
    BulkResult none;
    none.min_r = std::numeric_limits<double>::infinity();
    rep.penrose = penrose_check(s, *rep.adm, bulk ? *bulk : none, *rep.curvature);
    if (!bulk) rep.penrose->detail += "; bulk term not computed";
    rep.checks.push_back({"penrose", rep.penrose->verdict, rep.penrose->margin, rep.penrose->tolerance, rep.penrose->detail});
    if (!rep.penrose_bound) rep.penrose_bound = rep.penrose->bound;
  }
  if (want.pmt && s.horizons.empty() && rep.adm && rep.curvature) {
    const double bulk_margin = bulk ? bulk->min_r : std::numeric_limits<double>::infinity();
    rep.pmt = pmt_check(s, *rep.adm, *rep.curvature, bulk_margin);
    rep.checks.push_back({"pmt", rep.pmt->verdict, rep.pmt->m, 5 * rep.pmt->uncertainty, rep.pmt->detail});
  }
  return rep;
}

}  // namespace graphmass::mass
