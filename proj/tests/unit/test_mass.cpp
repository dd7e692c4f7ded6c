#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "graphmass/errors.hpp"
#include "graphmass/graphgeom.hpp"
#include "graphmass/mass.hpp"
#include "graphmass/radial.hpp"
#include "graphmass/scenarios.hpp"

using namespace graphmass;
using namespace graphmass::mass;
using doctest::Approx;

namespace {

Scenario make(const std::string& name, std::map<std::string, double> num = {},
              std::map<std::string, std::string> text = {}) {
  return scenarios::build(name, {std::move(num), std::move(text)}, quad::QuadConfig{});
}

// frozen by tests/oracles/derive_values.py
constexpr double kSchw3FluxR100 = 1.0204081632653061;
constexpr double kSchw5FluxR10 = 1.0020040080160321;
constexpr double kPerturbedFluxR50 = 1.2516801075268817;
constexpr double kRegularizedFluxR20 = 0.99626168466617923;

const CheckResult* check(const MassReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("flux mass at a finite radius matches the radial closed form") {
  const auto s3 = make("schwarzschild3");
  const auto f = adm_flux_mass(s3, 100.0);
  CHECK(f.mass == Approx(kSchw3FluxR100).epsilon(1e-12));
  REQUIRE(f.spherical);
  CHECK(*f.spherical == Approx(kSchw3FluxR100).epsilon(1e-14));
  // the weighted variant differs at finite r by the 1 / (1 + |grad f|^2) factor
  CHECK(f.mass_weighted == Approx(f.mass / (1 + 2.0 / 98.0)).epsilon(1e-12));

  const auto s5 = make("schwarzschild_n", {{"n", 5}, {"m", 1}});
  CHECK(adm_flux_mass(s5, 10.0).mass == Approx(kSchw5FluxR10).epsilon(1e-12));
  const auto sp = make("schwarzschild_perturbed", {{"m", 1}, {"eps", 0.2}});
  CHECK(adm_flux_mass(sp, 50.0).mass == Approx(kPerturbedFluxR50).epsilon(1e-12));
  const auto sr = make("radial_custom", {{"m", 1}, {"s", 1}});
  CHECK(adm_flux_mass(sr, 20.0).mass == Approx(kRegularizedFluxR20).epsilon(1e-12));
}

TEST_CASE("flat field has zero mass by every route") {
  const auto s = make("flat");
  const auto f = adm_flux_mass(s, 10.0);
  CHECK(f.mass == 0.0);
  CHECK(f.mass_weighted == 0.0);
  const auto a = adm_mass(s);
  CHECK(a.mass() == 0.0);
  const auto b = bulk_mass(s);
  CHECK(b.mass == 0.0);
  const auto r = analyze(s, {true, true, true});
  CHECK(r.exit_code() == 0);
  REQUIRE(r.pmt);
  CHECK(r.pmt->verdict == Verdict::Pass);
}

TEST_CASE("spherical mass agrees with the flux at every radius") {
  for (const auto& [name, num] : std::vector<std::pair<std::string, std::map<std::string, double>>>{
           {"schwarzschild3", {{"m", 0.5}}},
           {"schwarzschild_n", {{"n", 4}, {"m", 2}}},
           {"schwarzschild_perturbed", {{"eps", 0.7}}},
           {"radial_custom", {{"m", 2}, {"s", 0.3}}}}) {
    const auto s = make(name, num);
    REQUIRE(s.profile);
    for (double r : {5.0, 17.0, 230.0, 4000.0}) {
      const auto f = adm_flux_mass(s, r);
      CHECK(f.mass == Approx(spherical_mass(*s.profile, s.n, r)).epsilon(1e-10));
    }
  }
}

TEST_CASE("spherical mass is nonnegative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto e = jets::parse("a*sin(r) + b*log(r)", 1, std::vector<std::string>{"a", "b"});
  for (int i = 0; i < 200; ++i) {
    const auto p = jets::profile_from_expression(e, {{"a", 4 * u(rng) - 2}, {"b", 4 * u(rng) - 2}});
    const int n = 3 + i % 5;
    CHECK(spherical_mass(p, n, 0.1 + 50 * u(rng)) >= 0.0);
  }
  const jets::RadialProfile flat{[](double) { return 0.0; }, [](double) { return 0.0; },
                                 [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, "zero"};
  CHECK(spherical_mass(flat, 3, 2.0) == 0.0);
}

TEST_CASE("extrapolated flux mass") {
  const auto a = adm_mass(make("schwarzschild3", {{"m", 2}}));
  CHECK(a.mass() == Approx(2.0).epsilon(1e-3));
  CHECK(a.variants_agree);
  CHECK(std::abs(a.limit.value - a.limit_weighted.value) <= a.uncertainty + a.limit_weighted.uncertainty);
  const auto a5 = adm_mass(make("schwarzschild_n", {{"n", 5}, {"m", 1}}));
  CHECK(a5.mass() == Approx(1.0).epsilon(1e-2));
  const auto ap = adm_mass(make("schwarzschild_perturbed", {{"eps", 0.2}}));
  CHECK(ap.mass() == Approx(1.2).epsilon(1e-3));
}

TEST_CASE("bulk integral of R") {
  // scalar-flat exterior
  const auto s = make("schwarzschild3");
  const auto b = bulk_mass(s);
  CHECK(std::abs(b.mass) <= 1e-6);
  // compactly concentrated bump: both routes vanish at infinity
  const auto bump = make("bump", {{"alpha", 0.1}});
  const auto bb = bulk_mass(bump);
  CHECK(std::abs(bb.mass) <= std::max(1e-9, 5 * (bb.error + bb.tail_bound)));
  CHECK(bb.min_r < 0);
  // regularized profile: no horizon, R >= 0, integral equals the mass
  const auto reg = make("radial_custom");
  const auto br = bulk_mass(reg);
  CHECK(br.mass == Approx(1.0).epsilon(5e-3));
  CHECK(br.min_r >= 0);
}

TEST_CASE("horizon decomposition for Schwarzschild n = 3 and n = 4") {
  for (int n : {3, 4}) {
    const auto s = n == 3 ? make("schwarzschild3") : make("schwarzschild_n", {{"n", 4}, {"m", 1}});
    const auto d = mass_decomposition(s);
    CHECK(d.boundary == Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(d.bulk) <= 1e-6);
    CHECK(d.pass);
    CHECK(d.hypotheses_ok);
    REQUIRE(d.horizons.size() == 1);
    CHECK(d.horizons[0].level_ok);
    CHECK(d.horizons[0].blowup_ok);
    CHECK(d.horizons[0].level_spread <= 1e-8);
  }
}

TEST_CASE("perturbed Schwarzschild: bulk term carries the excess mass") {
  const auto s = make("schwarzschild_perturbed", {{"eps", 0.2}});
  const auto d = mass_decomposition(s);
  CHECK(d.boundary == Approx(1.0).epsilon(1e-8));
  CHECK(d.bulk == Approx(0.2).epsilon(1e-4));
  CHECK(d.pass);
  // the offset gap shrinks toward the horizon at about first order
  const auto& h = d.horizons.at(0);
  REQUIRE(h.rate_measured);
  CHECK(h.rate == Approx(1.0).epsilon(0.1));
}

TEST_CASE("scalar curvature sampling") {
  const auto s = make("schwarzschild_n", {{"n", 4}, {"m", 1}});
  const auto c = sample_scalar_curvature(s, 500, 1e-3);
  CHECK(c.points == 500);
  CHECK(c.max_abs_r <= 1e-9);
  CHECK(c.nonnegative);
  const auto b = sample_scalar_curvature(make("bump", {{"alpha", 0.1}}), 2000);
  CHECK_FALSE(b.nonnegative);
  CHECK(b.min_r < 0);
  // R at the witness point is the minimum
  CHECK(geom::scalar_curvature(*make("bump", {{"alpha", 0.1}}).field, b.witness) == Approx(b.min_r));
}

TEST_CASE("sample points stay outside the horizons") {
  const auto s = make("two_body_glued");
  const auto pts = exterior_sample_points(s, 400, 1e-6);
  REQUIRE(pts.size() == 400u * 3);
  for (std::size_t i = 0; i < pts.size(); i += 3) {
    const std::span<const double> x(pts.data() + i, 3);
    CHECK(s.field->in_domain(x));
  }
}

TEST_CASE("divergence identity on sampled points") {
  for (const auto& name : {"schwarzschild3", "bump", "schwarzschild_perturbed", "two_body_glued"}) {
    const auto l = sample_divergence_identity(make(name), 300);
    CHECK(l.points == 300);
    CHECK(l.max_defect <= 1e-9);
  }
}

TEST_CASE("positive mass verdicts") {
  const auto bump = analyze(make("bump", {{"alpha", 0.1}}), {true, false, false});
  REQUIRE(bump.pmt);
  CHECK(bump.pmt->verdict == Verdict::HypothesisViolated);
  CHECK(bump.exit_code() == 2);

  const auto reg = analyze(make("radial_custom"), {true, false, false});
  REQUIRE(reg.pmt);
  CHECK(reg.pmt->verdict == Verdict::Pass);
  CHECK(reg.pmt->m == Approx(1.0).epsilon(1e-3));

  // radial profile with R < 0 somewhere: still m >= 0, hypothesis flagged
  const auto rb = analyze(make("radial_custom", {}, {{"profile", "0.3*exp(-r^2)"}}), {true, false, true});
  REQUIRE(rb.pmt);
  CHECK(rb.pmt->verdict == Verdict::HypothesisViolated);
  CHECK(rb.pmt->m >= -5 * rb.pmt->uncertainty - 1e-12);
}

TEST_CASE("area-bound verdicts") {
  const auto eq = analyze(make("schwarzschild3"), {false, true, false});
  REQUIRE(eq.penrose);
  CHECK(eq.penrose->verdict == Verdict::Pass);
  CHECK(eq.penrose->bound == Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(eq.penrose->margin) <= eq.penrose->tolerance);

  const auto strict = analyze(make("schwarzschild_perturbed", {{"eps", 0.2}}), {false, true, false});
  REQUIRE(strict.penrose);
  CHECK(strict.penrose->verdict == Verdict::Pass);
  CHECK(strict.penrose->m - strict.penrose->bound == Approx(0.2).epsilon(1e-3));
}

TEST_CASE("glued two-body field") {
  const auto s = make("two_body_glued");
  const auto r = analyze(s, {false, true, true});
  REQUIRE(r.decomposition);
  CHECK(std::abs(r.decomposition->residual) <= 0.02 * std::abs(r.decomposition->adm));
  CHECK(r.decomposition->boundary == Approx(1.0).epsilon(1e-6));
  REQUIRE(r.penrose);
  // the gluing band has R < 0, so the inequality is reported but not certified
  CHECK(r.penrose->verdict == Verdict::HypothesisViolated);
  CHECK(r.penrose->inequality_holds);
  CHECK(r.penrose->bound == Approx(1.0).epsilon(1e-8));
  REQUIRE(r.superadditivity_gap);
  CHECK(*r.superadditivity_gap > 0);
  CHECK(r.exit_code() == 2);
}

TEST_CASE("geometry-only ellipsoid horizon") {
  const auto r = analyze(make("ellipsoid_horizon"), {true, true, true});
  CHECK(r.geometry_only);
  CHECK_FALSE(r.adm);
  REQUIRE(r.geometry.size() == 1);
  CHECK(r.geometry[0].af_gap > 0);
  CHECK(r.geometry[0].gauss_map_error <= 1e-6);
  CHECK(r.exit_code() == 0);
}

TEST_CASE("exit code precedence") {
  auto combine = [](std::vector<int> v) { return combine_exit_codes(v); };
  CHECK(combine({}) == 0);
  CHECK(combine({0, 0}) == 0);
  CHECK(combine({2, 0}) == 2);
  CHECK(combine({2, 4}) == 4);
  CHECK(combine({4, 1, 2}) == 1);
  CHECK(combine({3, 2}) == 2);
  CHECK(combine({3}) == 3);
}

TEST_CASE("every identity check passes on the equality case") {
  const auto r = analyze(make("schwarzschild3"), {true, true, true});
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.verdict == Verdict::Pass);
  }
  CHECK(check(r, "horizon_identity"));
  CHECK(check(r, "divergence_identity"));
  CHECK(check(r, "radial_consistency"));
}
