#include "graphmass/mass.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "graphmass/errors.hpp"
#include "graphmass/graphgeom.hpp"
#include "parallel.hpp"

namespace graphmass::mass {
namespace {

constexpr double kGolden = 0.6180339887498948482;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double normalization(int n) { return 1.0 / (2.0 * (n - 1) * quad::unit_sphere_area(n)); }

void atomic_min(std::atomic<double>& slot, double v) {
  double cur = slot.load(std::memory_order_relaxed);
  while (v < cur && !slot.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

void require_field(const Scenario& s, const char* what) {
  if (s.geometry_only || !s.field) throw ConfigError(std::string(what) + " needs a graph function; scenario '" + s.name + "' is geometry-only");
}

// x lies outside every horizon body
bool outside_horizons(const Scenario& s, std::span<const double> x) {
  for (const auto& b : s.horizons.bodies())
    if (!(b->defining_jet(x).value() > b->level())) return false;
  return true;
}

std::vector<Ball> spherical_holes(const Scenario& s) {
  std::vector<Ball> holes;
  for (const auto& b : s.horizons.bodies()) {
    const auto* sp = dynamic_cast<const convex::Sphere*>(b.get());
    if (!sp) throw ConfigError("bulk integral needs spherical horizons; got " + b->describe());
    holes.push_back({std::vector<double>(sp->center().begin(), sp->center().end()), sp->radius()});
  }
  return holes;
}

double horizon_scale(const Scenario& s) {
  double a = 0.0;
  for (const auto& b : s.horizons.bodies()) a = std::max(a, norm(b->center()) + b->bounding_radius());
  return a;
}

// Quasi-random exterior points. Directions come from an antipodal sphere
// rule; the radial coordinate is a Weyl sequence, log-spaced. Points are
// placed round-robin around each horizon (offset along the normal, in units
// of the body scale) and, without horizons or for glued fields, around the
// origin.
std::vector<double> exterior_points(const Scenario& s, int count, double min_offset, std::uint64_t salt) {
  const int n = s.n;
  const int pairs = std::max(1, (count + 1) / 2);
  const quad::SphereRule dirs = quad::qmc_rule(n, pairs, s.quad.seed ^ salt);
  const double shift = static_cast<double>((s.quad.seed ^ salt) >> 11) * 0x1.0p-53;

  std::vector<int> anchors;  // -1 origin, else horizon index
  if (s.horizons.empty() || s.glued) anchors.push_back(-1);
  for (std::size_t h = 0; h < s.horizons.size(); ++h) anchors.push_back(static_cast<int>(h));

  const double lo = std::log10(min_offset), hi = 3.0;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count) * n);
  std::size_t k = 0;
  for (int i = 0; i < count * 4 && static_cast<int>(pts.size() / n) < count; ++i) {
    const auto theta = dirs.node(static_cast<std::size_t>(i) % dirs.size());
    double u = shift + kGolden * i;
    u -= std::floor(u);
    const int anchor = anchors[k++ % anchors.size()];
    std::vector<double> x(n);
    if (anchor < 0) {
      const double r = std::pow(10.0, -1.0 + 4.0 * u) * std::max(1.0, horizon_scale(s) * 0.25);
      for (int d = 0; d < n; ++d) x[d] = r * theta[d];
    } else {
      const auto& body = *s.horizons.bodies()[anchor];
      const convex::SurfacePoint p = body.surface_point(theta);
      const std::vector<double> nu = convex::outward_normal(body, p.x);
      const double t = body.scale() * std::pow(10.0, lo + (hi - lo) * u);
      for (int d = 0; d < n; ++d) x[d] = p.x[d] + t * nu[d];
    }
    if (!s.field->in_domain(x) || !outside_horizons(s, x)) continue;
    pts.insert(pts.end(), x.begin(), x.end());
  }
  return pts;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::HypothesisViolated: return "hypothesis_violated";
    case Verdict::NumericalFailure: return "numerical_failure";
    case Verdict::NotApplicable: return "not_applicable";
  }
  return "?";
}

double outer_radius(const Scenario& s) {
  if (s.quad.r_max > 0) return s.quad.r_max;
  return 1e3 * std::max(1.0, horizon_scale(s));
}

// ---------------------------------------------------------------- flux

FluxSample adm_flux_mass(const Scenario& s, double r, const quad::SphereRule& rule) {
  require_field(s, "flux mass");
  const int n = s.n;
  const ScalarField& f = *s.field;
  auto plain = [&](std::span<const double> x) {
    const Jet3 j = f.derivatives(x);
    double lap = 0.0;
    for (int i = 0; i < n; ++i) lap += j.hess(i, i);
    double flux = 0.0;
    for (int k = 0; k < n; ++k) {
      double hg = 0.0;
      for (int i = 0; i < n; ++i) hg += j.hess(k, i) * j.grad(i);
      flux += (lap * j.grad(k) - hg) * x[k];
    }
    return flux / r;
  };
  auto weighted = [&](std::span<const double> x) {
    const Jet3 j = f.derivatives(x);
    std::vector<double> nu(x.begin(), x.end());
    for (double& v : nu) v /= r;
    return geom::boundary_integrand(j, nu);
  };
  const double c = normalization(n);
  const quad::Estimate a = quad::sphere_integrate(plain, r, rule, {}, s.quad.exec);
  const quad::Estimate b = quad::sphere_integrate(weighted, r, rule, {}, s.quad.exec);
  FluxSample out;
  out.radius = r;
  out.mass = c * a.value;
  out.mass_weighted = c * b.value;
  out.error = c * std::max(a.error, b.error);
  if (s.profile) out.spherical = spherical_mass(*s.profile, n, r);
  return out;
}

FluxSample adm_flux_mass(const Scenario& s, double r) {
  return adm_flux_mass(s, r, quad::sphere_rule_for(s.n, s.quad, false));
}

AdmResult adm_mass(const Scenario& s) {
  require_field(s, "ADM mass");
  const std::vector<double> radii = s.quad.radii.empty() ? quad::default_radii(outer_radius(s)) : s.quad.radii;
  const quad::SphereRule rule = quad::sphere_rule_for(s.n, s.quad, false);
  AdmResult out;
  std::vector<double> plain, weighted;
  double qerr = 0.0;
  for (double r : radii) {
    out.samples.push_back(adm_flux_mass(s, r, rule));
    plain.push_back(out.samples.back().mass);
    weighted.push_back(out.samples.back().mass_weighted);
    qerr = std::max(qerr, out.samples.back().error);
  }
  out.limit = quad::extrapolate_limit(radii, plain);
  out.limit_weighted = quad::extrapolate_limit(radii, weighted);
  out.uncertainty = out.limit.uncertainty + qerr;
  const double m = out.limit.value;
  const double floor = 1e-12 * std::max(1.0, std::abs(m));
  if (out.limit.inflated && out.limit.uncertainty > 1e-3 * std::max(1.0, std::abs(m))) {
    std::ostringstream os;
    os.precision(6);
    os << "flux mass does not settle over radii " << radii.front() << ".." << radii.back()
       << " (spread " << out.limit.uncertainty << ")";
    throw NumericalError(os.str());
  }
  out.variants_agree = std::abs(out.limit.value - out.limit_weighted.value) <=
                       out.uncertainty + out.limit_weighted.uncertainty + qerr + floor;
  return out;
}

double spherical_mass(const jets::RadialProfile& profile, int n, double r) {
  const double fr = profile.f_r(r);
  return 0.5 * fr * fr * std::pow(r, n - 2);
}

// ---------------------------------------------------------------- bulk

double curvature_floor(const Jet3& j) {
  const int n = j.dim();
  double g2 = 0.0, lap = 0.0, hh = 0.0;
  for (int i = 0; i < n; ++i) {
    g2 += j.grad(i) * j.grad(i);
    lap += j.hess(i, i);
    for (int k = 0; k < n; ++k) hh += j.hess(i, k) * j.hess(i, k);
  }
  return 1e-9 + 1e-13 * (lap * lap + hh) / (1.0 + g2);
}

BulkResult bulk_mass(const Scenario& s) {
  require_field(s, "bulk mass");
  const std::vector<Ball> holes = spherical_holes(s);
  const ScalarField& f = *s.field;
  std::atomic<double> margin{std::numeric_limits<double>::infinity()};
  auto integrand = [&](std::span<const double> x) {
    const Jet3 j = f.derivatives(x);
    const double r = geom::scalar_curvature(j);
    atomic_min(margin, r + curvature_floor(j));
    return r;
  };
  quad::QuadConfig cfg = s.quad;
  cfg.r_max = outer_radius(s);
  const quad::VolumeResult v = quad::exterior_volume_integrate(integrand, s.n, holes, cfg);
  const double c = normalization(s.n);
  BulkResult out;
  out.mass = c * v.value;
  out.error = c * v.error;
  out.tail_bound = c * v.tail_bound;
  out.decay = v.decay;
  out.hole_remainder = c * v.hole_remainder;
  out.min_r = margin.load();
  out.evaluations = v.evaluations;
  out.panels = v.panels;
  return out;
}

// ---------------------------------------------------------------- horizons

HorizonDiagnostics horizon_diagnostics(const Scenario& s, const convex::ConvexBody& body) {
  require_field(s, "horizon diagnostics");
  const int n = s.n;
  const ScalarField& f = *s.field;
  const double scale = body.scale();
  HorizonDiagnostics out;
  out.body = body.describe();

  const quad::SphereRule rule = quad::product_rule(n, 8);
  std::vector<double> vals(rule.size()), g_near(rule.size()), g_ratio(rule.size());
  detail::for_each_index(rule.size(), s.quad.exec, [&](std::size_t i) {
    const convex::SurfacePoint p = body.surface_point(rule.node(i));
    const std::vector<double> nu = convex::outward_normal(body, p.x);
    auto at = [&](double t) {
      std::vector<double> y(p.x);
      for (int d = 0; d < n; ++d) y[d] += t * scale * nu[d];
      return y;
    };
    vals[i] = f.value(at(1e-9));
    auto gnorm = [&](double t) { return norm(f.derivatives(at(t)).grad_span()); };
    g_near[i] = gnorm(1e-6);
    g_ratio[i] = g_near[i] / gnorm(1e-4);
  });
  double mean = quad::pairwise_sum(vals) / static_cast<double>(vals.size());
  std::vector<double> dev(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) dev[i] = (vals[i] - mean) * (vals[i] - mean);
  out.level_spread = quad::pairwise_sum(dev) / static_cast<double>(dev.size());
  out.grad_near = *std::min_element(g_near.begin(), g_near.end());
  out.grad_growth = *std::min_element(g_ratio.begin(), g_ratio.end());
  out.level_ok = std::isfinite(out.level_spread) && out.level_spread <= 1e-8;
  // |grad f| ~ t^(-1/2) gives ratio 10 between the two offsets
  out.blowup_ok = out.grad_near >= 1e2 && out.grad_growth >= 5.0;

  // boundary flux through parallel surfaces against the geometric term
  const int order = quad::surface_order_for(n, s.quad);
  const double c = normalization(n);
  const double geometric = c * convex::quermassintegral(body, 1, order).value * (n - 1);
  std::vector<double> logs_t, logs_gap;
  for (double t : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double h = t * scale;
    auto fn = [&](std::span<const double> x, std::span<const double> kappas) {
      const std::vector<double> nu = convex::outward_normal(body, x);
      std::vector<double> y(x.begin(), x.end());
      for (int d = 0; d < n; ++d) y[d] += h * nu[d];
      const Jet3 j = f.derivatives(y);
      const double g = norm(j.grad_span());
      std::vector<double> dir(n);
      for (int d = 0; d < n; ++d) dir[d] = j.grad(d) / g;
      double area = 1.0;
      for (double k : kappas) area *= 1.0 + h * k;
      return geom::boundary_integrand(j, dir) * area;
    };
    OffsetSample o;
    o.offset = t;
    o.boundary = c * convex::surface_integrate(body, fn, order).value;
    o.gap = o.boundary - geometric;
    out.convergence.push_back(o);
    if (std::abs(o.gap) > 1e-10 * std::max(1.0, std::abs(geometric))) {
      logs_t.push_back(std::log(t));
      logs_gap.push_back(std::log(std::abs(o.gap)));
    }
  }
  if (logs_t.size() >= 3) {
    const double k = static_cast<double>(logs_t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logs_t.size(); ++i) {
      sx += logs_t[i];
      sy += logs_gap[i];
      sxx += logs_t[i] * logs_t[i];
      sxy += logs_t[i] * logs_gap[i];
    }
    out.rate = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    out.rate_measured = true;
  }
  return out;
}

Decomposition mass_decomposition(const Scenario& s, const AdmResult& adm, const BulkResult& bulk) {
  if (s.horizons.empty()) throw ConfigError("mass decomposition needs at least one horizon");
  Decomposition out;
  const quad::Estimate b = convex::horizon_mean_curvature_term(s.horizons, s.n, quad::surface_order_for(s.n, s.quad));
  out.boundary = b.value;
  out.boundary_error = b.error;
  out.bulk = bulk.mass;
  out.total = out.boundary + out.bulk;
  out.adm = adm.mass();
  out.residual = out.adm - out.total;
  const double rel = s.glued ? 0.02 : 0.005;
  out.tolerance = std::max(rel * std::abs(out.adm),
                           5.0 * (adm.uncertainty + bulk.error + bulk.tail_bound + out.boundary_error));
  out.pass = std::abs(out.residual) <= out.tolerance;
  out.hypotheses_ok = true;
  for (const auto& body : s.horizons.bodies()) {
    out.horizons.push_back(horizon_diagnostics(s, *body));
    out.hypotheses_ok = out.hypotheses_ok && out.horizons.back().level_ok && out.horizons.back().blowup_ok;
  }
  return out;
}

Decomposition mass_decomposition(const Scenario& s) { return mass_decomposition(s, adm_mass(s), bulk_mass(s)); }

// ---------------------------------------------------------------- sampling

std::vector<double> exterior_sample_points(const Scenario& s, int count, double min_offset) {
  require_field(s, "sampling");
  return exterior_points(s, count, min_offset, 0x5bd1e995ULL);
}

CurvatureSample sample_scalar_curvature(const Scenario& s, int count, double min_offset) {
  const std::vector<double> pts = exterior_sample_points(s, count, min_offset);
  const int n = s.n;
  const std::size_t m = pts.size() / n;
  std::vector<double> r(m), margin(m);
  detail::for_each_index(m, s.quad.exec, [&](std::size_t i) {
    const Jet3 j = s.field->derivatives({pts.data() + i * n, static_cast<std::size_t>(n)});
    r[i] = geom::scalar_curvature(j);
    margin[i] = r[i] + curvature_floor(j);
  });
  CurvatureSample out;
  out.points = m;
  if (m == 0) throw NumericalError("no sample points in the domain of '" + s.name + "'");
  const auto worst = std::min_element(margin.begin(), margin.end()) - margin.begin();
  out.min_margin = margin[worst];
  out.min_r = *std::min_element(r.begin(), r.end());
  for (double v : r) out.max_abs_r = std::max(out.max_abs_r, std::abs(v));
  out.nonnegative = out.min_margin >= 0;
  out.witness.assign(pts.begin() + worst * n, pts.begin() + (worst + 1) * n);
  return out;
}

DivergenceSample sample_divergence_identity(const Scenario& s, int count, double min_offset) {
  const std::vector<double> pts = exterior_sample_points(s, count, min_offset);
  const int n = s.n;
  const std::size_t m = pts.size() / n;
  std::vector<double> defect(m);
  detail::for_each_index(m, s.quad.exec, [&](std::size_t i) {
    const Jet3 j = s.field->derivatives({pts.data() + i * n, static_cast<std::size_t>(n)});
    const double r = geom::scalar_curvature(j);
    defect[i] = std::abs(geom::divergence_of_v(j) - r) / (1.0 + std::abs(r));
  });
  DivergenceSample out;
  out.points = m;
  for (double d : defect) out.max_defect = std::max(out.max_defect, d);
  return out;
}

// ---------------------------------------------------------------- checks

PenroseReport penrose_check(const Scenario& s, const AdmResult& adm, const BulkResult& bulk,
                            const CurvatureSample& r_sample) {
  PenroseReport out;
  if (s.horizons.empty()) {
    out.detail = "no horizon";
    return out;
  }
  out.m = adm.mass();
  out.bound = convex::penrose_bound(s.horizons, s.n, quad::surface_order_for(s.n, s.quad));
  out.bulk = bulk.mass;
  out.margin = out.m - out.bound - out.bulk;
  out.tolerance = std::max(5.0 * (adm.uncertainty + bulk.error + bulk.tail_bound),
                           1e-3 * std::max(1.0, std::abs(out.bound)));

  out.convex = true;
  const quad::SphereRule probe = quad::product_rule(s.n, 8);
  for (const auto& b : s.horizons.bodies()) {
    try {
      for (std::size_t i = 0; i < probe.size(); ++i) convex::principal_curvatures(*b, b->surface_point(probe.node(i)).x);
    } catch (const HypothesisError& e) {
      out.convex = false;
      out.detail = std::string("horizon not convex: ") + e.what();
    }
  }
  out.r_nonnegative = r_sample.nonnegative && bulk.min_r >= 0;
  out.inequality_holds = out.m >= out.bound - out.tolerance;
  if (!out.convex) {
    out.verdict = Verdict::HypothesisViolated;
    return out;
  }
  if (!out.r_nonnegative) {
    std::ostringstream os;
    os.precision(6);
    os << "sampled R < 0 (min " << std::min(r_sample.min_r, bulk.min_r) << "); m "
       << (out.inequality_holds ? ">=" : "<") << " bound regardless";
    out.detail = os.str();
    out.verdict = Verdict::HypothesisViolated;
    return out;
  }
  out.verdict = out.inequality_holds ? Verdict::Pass : Verdict::Fail;
  out.detail = out.verdict == Verdict::Pass ? "m >= bound (R >= 0 sampled)" : "m below the area bound";
  return out;
}

PmtReport pmt_check(const Scenario& s, const AdmResult& adm, const CurvatureSample& r_sample, double bulk_min_margin) {
  PmtReport out;
  out.m = adm.mass();
  out.uncertainty = adm.uncertainty;
  out.min_r = r_sample.min_r;
  if (!s.horizons.empty()) {
    out.detail = "scenario has horizons";
    return out;
  }
  out.r_nonnegative = r_sample.nonnegative && bulk_min_margin >= 0;
  const double slack = 5.0 * out.uncertainty + 1e-12;
  if (out.r_nonnegative) {
    out.verdict = out.m >= -slack ? Verdict::Pass : Verdict::Fail;
    out.detail = out.verdict == Verdict::Pass ? "R >= 0 sampled, m >= 0" : "R >= 0 sampled but m < 0";
    return out;
  }
  if (s.profile && out.m < -slack) {
    out.verdict = Verdict::Fail;
    out.detail = "radial flux mass negative";
    return out;
  }
  out.verdict = Verdict::HypothesisViolated;
  out.detail = s.profile ? "R changes sign; radial flux mass still nonnegative" : "R changes sign; hypothesis not met";
  return out;
}

}  // namespace graphmass::mass
