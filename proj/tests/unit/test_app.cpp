#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "graphmass/app.hpp"
#include "graphmass/errors.hpp"
#include "graphmass/scenarios.hpp"
#include "graphmass/verify.hpp"

using namespace graphmass;
using app::Json;

namespace {

app::RunConfig parse(const char* text) { return app::config_from_json(Json::parse(text)); }

std::string error_of(const char* text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config: registry entries, parameters and overrides") {
  const auto cfg = parse(R"j({
    "scenarios": ["flat", {"name": "schwarzschild3", "params": {"m": 2}},
                  {"name": "radial_custom", "params": {"profile": "sqrt(8*(r^2+1)^(1/2))"}}],
    "checks": ["pmt", "penrose"],
    "seed": 99,
    "quadrature": {"sphere_order": 16, "radii": [10, 20, 40], "rel_tol": 1e-6},
    "output": {"dir": "out", "format": "both"},
    "workers": 3
  })j");
  REQUIRE(cfg.scenarios.size() == 3);
  CHECK(cfg.scenarios[1].params.num.at("m") == 2);
  CHECK(cfg.scenarios[2].params.text.at("profile") == "sqrt(8*(r^2+1)^(1/2))");
  CHECK(cfg.checks.pmt);
  CHECK(cfg.checks.penrose);
  CHECK_FALSE(cfg.checks.identities);
  CHECK(cfg.quad.seed == 99);
  CHECK(cfg.quad.sphere_order == 16);
  CHECK(cfg.quad.radii == std::vector<double>{10, 20, 40});
  CHECK(cfg.quad.rel_tol == 1e-6);
  CHECK(cfg.out == "out");
  CHECK(cfg.format == app::Format::Both);
  CHECK(cfg.workers == 3);
  CHECK(app::checks_string(cfg.checks) == "pmt,penrose");
}

TEST_CASE("config: inline scenario with horizons") {
  const auto cfg = parse(R"j({"scenarios": [{
    "name": "my_schwarzschild", "dimension": 3, "profile": "sqrt(8*m*(r - 2*m))", "r_min": 2,
    "parameters": {"m": 1},
    "horizons": [{"variant": "sphere", "center": [0, 0, 0], "radius": 2}],
    "expected": {"mass": 1, "bound": 1}
  }]})j");
  REQUIRE(cfg.scenarios[0].inline_spec);
  const auto& s = *cfg.scenarios[0].inline_spec;
  CHECK(s.n == 3);
  CHECK(s.horizons.size() == 1);
  CHECK(*s.expected.mass == 1);
  const auto built = scenarios::build_inline(s, cfg.quad);
  CHECK(built.horizons.size() == 1);
}

TEST_CASE("config errors") {
  CHECK(error_of(R"j({"scenarios": [{"name": "x", "dimension": 0, "f": "x1"}]})j").find("dimension") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": []})j").find("non-empty") != std::string::npos);
  CHECK(error_of(R"j({"scenario": ["flat"]})j").find("unknown key 'scenario'") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": ["flat"], "checks": "pmtt"})j").find("unknown check") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": ["flat"], "seed": -1})j").find("seed") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": ["flat"], "quadrature": {"radii": [3, 2, 1]}})j").find("increase") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": ["flat"], "quadrature": {"sphere_ordr": 3}})j").find("sphere_ordr") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": ["flat"], "output": {"format": "xml"}})j").find("format") != std::string::npos);
  CHECK(error_of(R"j({"scenarios": [{"name": "x", "dimension": 3, "f": "x1",
                     "horizons": [{"variant": "sphere", "center": [0, 0], "radius": 1}]}]})j")
            .find("dimension") != std::string::npos);
  CHECK_THROWS_AS(app::load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("unknown scenarios suggest near matches") {
  app::RunConfig cfg;
  cfg.scenarios.push_back({"schwarschild3", {}, std::nullopt});
  try {
    app::run(cfg);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("schwarzschild3") != std::string::npos);
  }
  const auto near = scenarios::near_matches("bmup");
  CHECK(std::find(near.begin(), near.end(), "bump") != near.end());
}

TEST_CASE("unparsable expressions are config errors") {
  app::RunConfig cfg = parse(R"j({"scenarios": [{"name": "x", "dimension": 3, "f": "x1 +* x2"}]})j");
  CHECK_THROWS_AS(app::run(cfg), ConfigError);
}

TEST_CASE("registry lists the required scenarios") {
  for (const char* name : {"flat", "schwarzschild3", "schwarzschild_n", "radial_custom", "bump", "schwarzschild_perturbed",
                           "ellipsoid_horizon", "two_body_glued"}) {
    const auto* info = scenarios::find(name);
    REQUIRE(info);
    CHECK_FALSE(info->exercises.empty());
    CHECK_FALSE(info->summary.empty());
  }
}

TEST_CASE("number formatting") {
  CHECK(app::to_text(Json(0.1), 0) == "0.10000000000000001");
  CHECK(app::to_text(Json(1.0), 0) == "1");
  CHECK(app::to_text(Json(std::numeric_limits<double>::quiet_NaN()), 0) == "null");
  CHECK(app::to_text(Json(-std::numeric_limits<double>::infinity()), 0) == "null");
  CHECK(app::to_text(Json{{"b", 1}, {"a", {1.5, "x"}}}, 0) == R"j({"b":1,"a":[1.5,"x"]})j");
  // the text parses back to the same doubles
  const double v = 2.0 / 3.0;
  CHECK(Json::parse(app::to_text(Json(v))).get<double>() == v);
}

TEST_CASE("flat run: exit 0, zero masses, deterministic body") {
  app::RunConfig cfg = parse(R"j({"scenarios": ["flat", {"name": "flat", "params": {"n": 5}}], "checks": "all"})j");
  const auto a = app::run(cfg);
  CHECK(a.exit_code == 0);
  for (const auto& s : a.body["scenarios"]) {
    CHECK(s["adm"]["mass"].get<double>() == 0.0);
    CHECK(s["bulk"]["mass"].get<double>() == 0.0);
  }
  CHECK(a.header.contains("timestamp"));
  CHECK_FALSE(a.body.contains("timestamp"));
  cfg.workers = 2;
  const auto b = app::run(cfg);
  CHECK(app::to_text(a.body) == app::to_text(b.body));
}

TEST_CASE("report document and CSV tables") {
  app::RunConfig cfg = parse(R"j({"scenarios": ["schwarzschild3"], "checks": "all", "output": {"format": "both"}})j");
  const auto dir = std::filesystem::temp_directory_path() / "graphmass_test_app";
  std::filesystem::remove_all(dir);
  cfg.out = dir.string();
  const auto res = app::run(cfg);
  CHECK(res.exit_code == 0);
  const auto files = app::write_outputs(cfg, res);
  CHECK(files.size() == 4);
  std::ifstream in(dir / "report.json");
  const Json doc = Json::parse(in);
  CHECK(doc["body"]["scenarios"][0]["adm"]["mass"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(doc["body"]["scenarios"][0]["decomposition"]["boundary_term"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(doc["body"]["config"]["seed"] == cfg.quad.seed);
  const std::string flux = app::flux_csv(res.reports);
  CHECK(flux.rfind("scenario,radius,flux_mass", 0) == 0);
  CHECK(std::count(flux.begin(), flux.end(), '\n') == 5);  // header + four radii
  CHECK(app::bulk_csv(res.reports).find("schwarzschild3,1,") != std::string::npos);
  CHECK(app::horizon_csv(res.reports).find("schwarzschild3,\"sphere") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("hypothesis violations still produce a report") {
  app::RunConfig cfg = parse(R"j({"scenarios": ["flat", {"name": "bump", "params": {"alpha": 0.1}}], "checks": "pmt"})j");
  const auto r = app::run(cfg);
  CHECK(r.exit_code == 2);
  CHECK(r.reports.size() == 2);
  CHECK(r.body["scenarios"][1]["pmt"]["verdict"] == "hypothesis_violated");
}

TEST_CASE("default output directory") {
  ::setenv("GRAPHMASS_OUT_DIR", "/tmp/graphmass_env_dir", 1);
  CHECK(app::default_out_dir() == "/tmp/graphmass_env_dir");
  ::unsetenv("GRAPHMASS_OUT_DIR");
  CHECK(app::default_out_dir() == "graphmass-out");
}

TEST_CASE("criterion id lists") {
  CHECK(verify::parse_ids("all").size() == 10);
  CHECK(verify::parse_ids("1,3,5-7") == std::vector<int>{1, 3, 5, 6, 7});
  CHECK_THROWS_AS(verify::parse_ids("11"), ConfigError);
  CHECK_THROWS_AS(verify::parse_ids("x"), ConfigError);
}
