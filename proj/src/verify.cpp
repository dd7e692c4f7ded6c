#include "graphmass/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "graphmass/app.hpp"
#include "graphmass/convexgeom.hpp"
#include "graphmass/errors.hpp"
#include "graphmass/fd.hpp"
#include "graphmass/graphgeom.hpp"
#include "graphmass/mass.hpp"
#include "graphmass/radial.hpp"
#include "graphmass/scenarios.hpp"

namespace graphmass::verify {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Case {
  bool ok = true;
  std::vector<std::string>& lines;
  void add(bool pass, std::string line) {
    ok = ok && pass;
    lines.push_back((pass ? "ok    " : "FAIL  ") + std::move(line));
  }
};

scenarios::Params params(std::map<std::string, double> num, std::map<std::string, std::string> text = {}) {
  return {std::move(num), std::move(text)};
}

mass::Scenario scenario(const std::string& name, const scenarios::Params& p, const Options& opt) {
  return scenarios::build(name, p, opt.quad);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const mass::CheckResult* find_check(const mass::MassReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// 1: n = 3 equality case
void schwarzschild_suite(const Options& opt, Case& c) {
  for (double m : {0.5, 1.0, 2.0}) {
    const auto t0 = Clock::now();
    const auto s = scenario("schwarzschild3", params({{"m", m}}), opt);
    const auto r = mass::analyze(s, {true, true, true});
    const double dt = seconds_since(t0);
    if (!r.adm || !r.decomposition || !r.penrose_bound) {
      c.add(false, fmt("m=%g: analysis incomplete", m));
      continue;
    }
    const double adm = r.adm->mass();
    const double boundary = r.decomposition->boundary;
    const double bulk = r.decomposition->bulk;
    const double bound = *r.penrose_bound;
    c.add(std::abs(adm - m) <= 1e-3 * m, fmt("m=%g: flux mass %.9g (tol %.1e)", m, adm, 1e-3 * m));
    c.add(std::abs(boundary - m) <= 1e-6 * m, fmt("m=%g: horizon term %.12g (tol %.1e)", m, boundary, 1e-6 * m));
    c.add(std::abs(bulk) <= 1e-6, fmt("m=%g: bulk term %.3e (tol 1e-6)", m, bulk));
    c.add(std::abs(bound - m) <= 1e-8 * m, fmt("m=%g: area bound %.15g (tol %.1e)", m, bound, 1e-8 * m));
    c.add(std::abs(adm - bound) <= 1e-3 * m, fmt("m=%g: mass minus bound %.3e", m, adm - bound));
    c.add(r.penrose && r.penrose->verdict == mass::Verdict::Pass, fmt("m=%g: inequality verdict %s", m,
                                                                       r.penrose ? mass::to_string(r.penrose->verdict) : "none"));
    c.add(dt <= 10.0, fmt("m=%g: %.2f s (limit 10 s)", m, dt));
  }
}

// 2: n = 4, 5
void higher_dimensions(const Options& opt, Case& c) {
  for (int n : {4, 5}) {
    const auto t0 = Clock::now();
    const auto s = scenario("schwarzschild_n", params({{"n", n}, {"m", 1.0}}), opt);
    const auto r = mass::analyze(s, {false, true, false});
    const auto sample = mass::sample_scalar_curvature(s, 1000, 1e-3);
    const double dt = seconds_since(t0);
    if (!r.adm || !r.penrose) {
      c.add(false, fmt("n=%d: analysis incomplete", n));
      continue;
    }
    const double adm = r.adm->mass();
    c.add(std::abs(adm - 1.0) <= 0.01, fmt("n=%d: flux mass %.9g (tol 1e-2)", n, adm));
    c.add(sample.points >= 1000 && sample.max_abs_r <= 1e-9,
          fmt("n=%d: max |R| %.3e over %d points (tol 1e-9)", n, sample.max_abs_r, sample.points));
    c.add(std::abs(adm - r.penrose->bound) <= 0.01 * r.penrose->bound,
          fmt("n=%d: mass %.9g, area bound %.12g", n, adm, r.penrose->bound));
    c.add(dt <= 60.0, fmt("n=%d: %.2f s (limit 60 s)", n, dt));
  }
}

// 3: div V = R on random exterior points
void divergence_identity(const Options& opt, Case& c) {
  const std::vector<std::pair<std::string, scenarios::Params>> list = {
      {"schwarzschild3", params({{"m", 1}})},
      {"schwarzschild_n", params({{"n", 4}, {"m", 1}})},
      {"schwarzschild_n", params({{"n", 5}, {"m", 0.7}})},
      {"bump", params({{"alpha", 0.2}})},
      {"schwarzschild_perturbed", params({{"eps", 0.3}})},
      {"radial_custom", params({{"m", 1}, {"s", 1}})},
      {"two_body_glued", params({})},
  };
  for (const auto& [name, p] : list) {
    const auto s = scenario(name, p, opt);
    const auto l = mass::sample_divergence_identity(s, 1000);
    c.add(l.points >= 1000 && l.max_defect <= 1e-9,
          fmt("%s n=%d: max |div V - R| / (1 + |R|) = %.3e over %d points", name.c_str(), s.n, l.max_defect, l.points));
  }
}

// 4: flux mass against the integral of R
void bump_routes(const Options& opt, Case& c) {
  for (double alpha : {0.05, 0.1, 0.2}) {
    const auto s = scenario("bump", params({{"alpha", alpha}}), opt);
    const auto r = mass::analyze(s, {false, false, true});
    const auto* chk = find_check(r, "bulk_identity");
    if (!r.adm || !r.bulk() || !chk) {
      c.add(false, fmt("alpha=%g: analysis incomplete", alpha));
      continue;
    }
    const auto* b = r.bulk();
    const double m = r.adm->mass();
    const double tol = std::max(0.005 * std::abs(m), 5 * (r.adm->uncertainty + b->error + b->tail_bound));
    c.add(std::abs(m - b->mass) <= tol,
          fmt("alpha=%g: flux %.3e, bulk %.3e, difference %.3e (tol %.3e)", alpha, m, b->mass, m - b->mass, tol));
  }
}

std::vector<double> zeros(int n) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); }

// 5: Aleksandrov-Fenchel gap and chain
void af_suite(const Options& opt, Case& c) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> radius(0.2, 5.0);
  for (int n : {3, 4}) {
    const int order = quad::surface_order_for(n, opt.quad);
    for (int k = 0; k < 3; ++k) {
      const convex::Sphere body(zeros(n), radius(rng));
      const auto g = mass::body_geometry(body, order);
      const double scale = std::pow(g.quermass[1].value, n - 1);
      c.add(std::abs(g.af_gap) <= 1e-8 * scale, fmt("%s: relative gap %.3e", g.body.c_str(), g.af_gap / scale));
      c.add(g.chain_min_slack >= -1e-10, fmt("%s: chain min slack %.3e", g.body.c_str(), g.chain_min_slack));
    }
  }
  const std::vector<std::vector<double>> axes = {{1, 1, 2}, {1, 2, 4}, {4, 1, 1}, {1, 1.5, 3}, {0.5, 1, 2},
                                                 {1, 1, 1, 2}, {1, 2, 3, 4}, {1, 1, 1, 4}, {4, 2, 1, 1}};
  for (const auto& a : axes) {
    const int n = static_cast<int>(a.size());
    const convex::Ellipsoid body(zeros(n), a);
    const auto g = mass::body_geometry(body, quad::surface_order_for(n, opt.quad));
    c.add(g.af_gap > 2 * g.af_gap_error,
          fmt("%s: gap %.6e > 2 x error %.3e", g.body.c_str(), g.af_gap, 2 * g.af_gap_error));
    double rel_err = 0.0;
    for (const auto& q : g.quermass) rel_err += q.error / std::abs(q.value);
    const double tol = 1e-10 + n * rel_err;
    c.add(g.chain_min_slack >= -tol, fmt("%s: chain min slack %.3e (tol %.1e)", g.body.c_str(), g.chain_min_slack, tol));
  }
}

// 6: V_(n-1) equals the sphere area
void gauss_map(const Options& opt, Case& c) {
  std::vector<convex::BodyPtr> bodies;
  for (int n : {2, 3, 4, 5}) {
    bodies.push_back(std::make_shared<convex::Sphere>(zeros(n), 1.7));
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[i] = 1.0 + i;
    bodies.push_back(std::make_shared<convex::Ellipsoid>(zeros(n), a));
  }
  const std::vector<std::pair<int, std::string>> level_sets = {
      {3, "x1^2 + 2*x2^2 + 0.5*x3^2 + 0.1*x1^4"},
      {3, "exp(x1) + exp(-x1) + x2^2 + x3^2 + x2^4"},
      {4, "x1^2 + x2^2 + 3*x3^2 + x4^2 + 0.2*x4^4"},
  };
  for (const auto& [n, text] : level_sets) {
    auto phi = std::make_shared<ExprField>(jets::parse(text, n), jets::ParamBindings{});
    const double level = text.rfind("exp", 0) == 0 ? 3.0 : 1.0;
    bodies.push_back(std::make_shared<convex::SmoothLevelSet>(phi, level, zeros(n)));
  }
  for (const auto& b : bodies) {
    const int n = b->dim();
    // the automatic order drops to 18 at n = 5, too coarse for axis ratio 5
    const auto v = convex::quermassintegral(*b, n - 1, std::max(32, quad::surface_order_for(n, opt.quad)));
    const double err = std::abs(v.value / quad::unit_sphere_area(n) - 1.0);
    c.add(err <= 1e-6, fmt("%s: |V_%d / omega - 1| = %.3e", b->describe().c_str(), n - 1, err));
  }
}

// 7: spherical mass is nonnegative and matches the flux
void radial_suite(const Options& opt, Case& c) {
  std::mt19937_64 rng(opt.seed + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int negative = 0, nonfinite = 0, total = 0;
  const auto expr = jets::parse("a*sqrt(r) + b*exp(-r) + d*sin(r) + e*log(r)", 1, std::vector<std::string>{"a", "b", "d", "e"});
  for (int i = 0; i < 1000; ++i) {
    const int n = 3 + static_cast<int>(u(rng) * 4);
    const double m = 0.1 + 2.9 * u(rng);
    jets::RadialProfile p;
    double r0 = 0.0;
    switch (i % 4) {
      case 0: p = jets::schwarzschild_profile(n, m); r0 = std::pow(2 * m, 1.0 / (n - 2)); break;
      case 1: p = jets::perturbed_schwarzschild_profile(n, m, u(rng)); r0 = std::pow(2 * m, 1.0 / (n - 2)); break;
      case 2: p = jets::regularized_profile(m, 0.1 + u(rng)); r0 = 0.0; break;
      default:
        p = jets::profile_from_expression(expr, {{"a", 4 * u(rng) - 2}, {"b", 4 * u(rng) - 2}, {"d", 4 * u(rng) - 2}, {"e", 4 * u(rng) - 2}});
        r0 = 0.0;
    }
    const double r = std::max(r0, 0.05) * std::pow(10.0, 3 * u(rng)) * (1 + 1e-9);
    const double sm = mass::spherical_mass(p, n, r);
    ++total;
    if (!std::isfinite(sm)) ++nonfinite;
    else if (sm < 0) ++negative;
  }
  c.add(negative == 0 && nonfinite == 0,
        fmt("%d random profiles and radii: %d negative, %d non-finite", total, negative, nonfinite));

  const std::vector<std::pair<std::string, scenarios::Params>> list = {
      {"schwarzschild3", params({{"m", 1}})},
      {"schwarzschild_n", params({{"n", 4}, {"m", 1}})},
      {"schwarzschild_n", params({{"n", 5}, {"m", 2}})},
      {"schwarzschild_perturbed", params({{"eps", 0.5}})},
      {"radial_custom", params({{"m", 1.5}, {"s", 0.5}})},
  };
  for (const auto& [name, p] : list) {
    const auto s = scenario(name, p, opt);
    const auto a = mass::adm_mass(s);
    double worst = 0.0;
    for (const auto& f : a.samples) worst = std::max(worst, rel(f.mass, *f.spherical));
    c.add(worst <= 1e-10, fmt("%s n=%d: max relative difference %.3e over %zu radii", name.c_str(), s.n, worst, a.samples.size()));
  }
}

// 8: area bound of the parts against the combined area
void superadditivity(const Options& opt, Case& c) {
  std::mt19937_64 rng(opt.seed + 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  double smallest = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const int n = 3 + static_cast<int>(u(rng) * 6);
    const int k = 1 + static_cast<int>(u(rng) * 8);
    std::vector<double> areas(static_cast<std::size_t>(k));
    for (auto& a : areas) a = std::pow(10.0, 6 * u(rng) - 3);
    const double gap = convex::superadditivity_gap(areas, n);
    const bool ok = k == 1 ? gap == 0.0 : gap > 0.0;
    if (!ok) ++bad;
    if (k > 1) smallest = std::min(smallest, gap);
  }
  c.add(bad == 0, fmt("1000 random area vectors: %d violations, smallest positive gap %.3e", bad, smallest));
}

// 9: finite-difference convergence of the jets
double jet_error(const Jet3& a, const Jet3& b, int order) {
  const int n = a.dim();
  double err = 0.0, size = 1.0;
  auto take = [&](double x, double y) {
    err = std::max(err, std::abs(x - y));
    size = std::max(size, std::abs(y));
  };
  for (int i = 0; i < n; ++i) {
    if (order == 1) take(a.grad(i), b.grad(i));
    for (int j = i; j < n; ++j) {
      if (order == 2) take(a.hess(i, j), b.hess(i, j));
      for (int k = j; k < n; ++k)
        if (order == 3) take(a.third(i, j, k), b.third(i, j, k));
    }
  }
  return err / size;
}

struct SlopeStats {
  int measured = 0;
  int exact = 0;
  double lo = INFINITY, hi = -INFINITY;
};

// least-squares slope of log error against log h, per derivative order
bool fd_slopes(const ScalarField& f, std::span<const double> x, SlopeStats& st) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  const double scale = std::max(1.0, std::sqrt(norm));
  const double hs[3] = {1e-2 * scale, 5e-3 * scale, 2.5e-3 * scale};
  const Jet3 exact = f.jet(x);
  Jet3 fd[3];
  for (int i = 0; i < 3; ++i) fd[i] = jets::fd_jet(f, x, hs[i]);
  bool ok = true;
  for (int order = 1; order <= 3; ++order) {
    double e[3];
    for (int i = 0; i < 3; ++i) e[i] = jet_error(fd[i], exact, order);
    // polynomials of low degree are differenced exactly
    if (e[0] <= 1e-9) {
      ++st.exact;
      continue;
    }
    double mx = 0, my = 0;
    for (int i = 0; i < 3; ++i) {
      mx += std::log(hs[i]) / 3;
      my += std::log(std::max(e[i], 1e-300)) / 3;
    }
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (std::log(hs[i]) - mx) * (std::log(std::max(e[i], 1e-300)) - my);
      sxx += (std::log(hs[i]) - mx) * (std::log(hs[i]) - mx);
    }
    const double slope = sxy / sxx;
    ++st.measured;
    st.lo = std::min(st.lo, slope);
    st.hi = std::max(st.hi, slope);
    ok = ok && std::abs(slope - 2.0) <= 0.2;
  }
  return ok;
}

std::string random_expression(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto var = [&] { return "x" + std::to_string(1 + static_cast<int>(u(rng) * n)); };
  auto coef = [&] { return fmt("%.3f", 0.2 + 1.8 * u(rng)); };
  auto atom = [&]() -> std::string {
    switch (static_cast<int>(u(rng) * 8)) {
      case 0: return "sin(" + coef() + "*" + var() + ")";
      case 1: return "cos(" + var() + "*" + var() + ")";
      case 2: return "exp(-" + coef() + "*r^2)";
      case 3: return "sqrt(1 + " + var() + "^2 + " + var() + "^2)";
      case 4: return "log(2 + " + var() + "^2)";
      case 5: return var() + "^3";
      case 6: return "1/(1 + r^2)";
      default: return "exp(" + coef() + "*" + var() + ")";
    }
  };
  std::string s = coef() + "*" + atom();
  const int terms = 1 + static_cast<int>(u(rng) * 3);
  for (int t = 0; t < terms; ++t) s += (u(rng) < 0.5 ? " + " : " - ") + coef() + "*" + atom() + (u(rng) < 0.4 ? "*" + atom() : "");
  return s;
}

void fd_convergence(const Options& opt, Case& c) {
  // built-in fields at exterior points away from the horizons
  for (const auto& info : scenarios::catalog()) {
    const auto s = scenario(info.name, {}, opt);
    if (!s.field) continue;
    SlopeStats st;
    bool ok = true;
    const auto pts = mass::exterior_sample_points(s, 6, 0.3);
    for (std::size_t i = 0; i + s.n <= pts.size(); i += s.n) ok = fd_slopes(*s.field, std::span(pts).subspan(i, s.n), st) && ok;
    c.add(ok, st.measured ? fmt("%s: slopes %.3f .. %.3f (%d measured, %d exact)", info.name.c_str(), st.lo, st.hi, st.measured, st.exact)
                          : fmt("%s: all %d differences exact", info.name.c_str(), st.exact));
  }
  std::mt19937_64 rng(opt.seed + 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + static_cast<int>(u(rng) * 4);
    const std::string text = random_expression(rng, n);
    const ExprField f(jets::parse(text, n), {});
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = 0.5 + 1.5 * u(rng);
    SlopeStats st;
    const bool ok = fd_slopes(f, x, st);
    c.add(ok, fmt("n=%d %s: slopes %.3f .. %.3f", n, text.c_str(), st.lo, st.hi));
  }
}

// 10: the report body does not depend on the run
void determinism(const Options& opt, Case& c) {
  app::RunConfig cfg;
  for (const auto& info : scenarios::catalog()) cfg.scenarios.push_back({info.name, {}, std::nullopt});
  cfg.quad = opt.quad;
  cfg.checks = {true, true, true};
  const auto a = app::to_text(app::run(cfg).body);
  const auto b = app::to_text(app::run(cfg).body);
  c.add(a == b, fmt("two runs over %zu scenarios: %zu and %zu bytes, %s", cfg.scenarios.size(), a.size(), b.size(),
                    a == b ? "identical" : "different"));
}

using Body = std::function<void(const Options&, Case&)>;

const std::vector<std::pair<Criterion, Body>>& table() {
  static const std::vector<std::pair<Criterion, Body>> t = {
      {{1, "Schwarzschild n=3 equality", 30}, schwarzschild_suite},
      {{2, "Schwarzschild n=4,5", 120}, higher_dimensions},
      {{3, "divergence identity", 5}, divergence_identity},
      {{4, "flux and bulk agree on bumps", 60}, bump_routes},
      {{5, "Aleksandrov-Fenchel", 30}, af_suite},
      {{6, "Gauss map normalization", 0}, gauss_map},
      {{7, "radial nonnegativity and consistency", 0}, radial_suite},
      {{8, "superadditivity", 0}, superadditivity},
      {{9, "jet finite-difference convergence", 0}, fd_convergence},
      {{10, "determinism", 0}, determinism},
  };
  return t;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = [] {
    std::vector<Criterion> v;
    for (const auto& [c, _] : table()) v.push_back(c);
    return v;
  }();
  return list;
}

Outcome run(int id, const Options& opt) {
  for (const auto& [crit, body] : table()) {
    if (crit.id != id) continue;
    Outcome o;
    o.id = id;
    o.name = crit.name;
    Case c{true, o.details};
    const auto t0 = Clock::now();
    try {
      body(opt, c);
    } catch (const std::exception& e) {
      c.add(false, std::string("error: ") + e.what());
    }
    o.seconds = seconds_since(t0);
    if (crit.time_limit > 0) c.add(o.seconds <= crit.time_limit, fmt("total %.2f s (limit %g s)", o.seconds, crit.time_limit));
    o.pass = c.ok;
    return o;
  }
  throw ConfigError("unknown criterion " + std::to_string(id));
}

std::string format(const Outcome& o, bool verbose) {
  std::string s = fmt("%s %2d %s (%.2f s)", o.pass ? "PASS" : "FAIL", o.id, o.name.c_str(), o.seconds);
  if (verbose || !o.pass)
    for (const auto& d : o.details)
      if (verbose || d.rfind("FAIL", 0) == 0) s += "\n      " + d;
  return s;
}

std::vector<int> parse_ids(const std::string& list) {
  std::vector<int> ids;
  if (list.empty() || list == "all") {
    for (const auto& c : criteria()) ids.push_back(c.id);
    return ids;
  }
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int a = 0, b = 0;
    char dash = 0;
    std::stringstream is(item);
    if (!(is >> a)) throw ConfigError("bad criterion list '" + list + "'");
    b = a;
    if (is >> dash) {
      if (dash != '-' || !(is >> b)) throw ConfigError("bad criterion list '" + list + "'");
    }
    for (int i = a; i <= b; ++i) {
      if (i < 1 || i > static_cast<int>(criteria().size())) throw ConfigError("unknown criterion " + std::to_string(i));
      ids.push_back(i);
    }
  }
  return ids;
}

}  // namespace graphmass::verify
