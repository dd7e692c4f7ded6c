#include "graphmass/app.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "graphmass/errors.hpp"

#ifndef GRAPHMASS_VERSION
#define GRAPHMASS_VERSION "0.0.0"
#endif

namespace graphmass::app {
namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key '" + k + "' in " + where + " (expected one of: " + list + ")");
    }
}

double get_number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(what + " must be finite");
  return d;
}

int get_int(const Json& v, const std::string& what, int lo, int hi) {
  const double d = get_number(v, what);
  if (d != std::floor(d) || d < lo || d > hi)
    throw ConfigError(what + " must be an integer in " + std::to_string(lo) + ".." + std::to_string(hi));
  return static_cast<int>(d);
}

double get_positive(const Json& v, const std::string& what) {
  const double d = get_number(v, what);
  if (!(d > 0)) throw ConfigError(what + " must be positive");
  return d;
}

std::string get_string(const Json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, what + " entry"));
  return out;
}

void check_radii(const std::vector<double>& radii) {
  if (radii.size() < 3) throw ConfigError("radii needs at least three entries");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw ConfigError("radii must be positive");
    if (i && !(radii[i] > radii[i - 1])) throw ConfigError("radii must increase");
  }
}

quad::QuadConfig parse_quadrature(const Json& q, quad::QuadConfig cfg) {
  require_keys(q,
               {"sphere_order", "volume_sphere_order", "qmc_pairs", "volume_qmc_pairs", "product_max_dim", "abs_tol",
                "rel_tol", "max_panels", "r_max", "horizon_levels", "surface_order", "partition_inner", "radii"},
               "quadrature");
  for (const auto& [k, v] : q.items()) {
    const std::string what = "quadrature." + k;
    if (k == "sphere_order") cfg.sphere_order = get_int(v, what, 2, 512);
    else if (k == "volume_sphere_order") cfg.volume_sphere_order = get_int(v, what, 2, 512);
    else if (k == "qmc_pairs") cfg.qmc_pairs = get_int(v, what, 8, 1 << 24);
    else if (k == "volume_qmc_pairs") cfg.volume_qmc_pairs = get_int(v, what, 8, 1 << 24);
    else if (k == "product_max_dim") cfg.product_max_dim = get_int(v, what, 2, jets::kMaxDim);
    else if (k == "abs_tol") cfg.abs_tol = get_positive(v, what);
    else if (k == "rel_tol") cfg.rel_tol = get_positive(v, what);
    else if (k == "max_panels") cfg.max_panels = get_int(v, what, 1, 1 << 20);
    else if (k == "r_max") cfg.r_max = get_positive(v, what);
    else if (k == "horizon_levels") cfg.horizon_levels = get_int(v, what, 2, 60);
    else if (k == "surface_order") cfg.surface_order = get_int(v, what, 2, 512);
    else if (k == "partition_inner") {
      cfg.partition_inner = get_number(v, what);
      if (!(cfg.partition_inner >= 0 && cfg.partition_inner < 1)) throw ConfigError(what + " must lie in [0, 1)");
    } else if (k == "radii") {
      cfg.radii = get_vector(v, what);
      check_radii(cfg.radii);
    }
  }
  return cfg;
}

scenarios::HorizonSpec parse_horizon(const Json& h, const std::string& where) {
  require_keys(h, {"variant", "center", "radius", "semiaxes", "phi", "level"}, where);
  scenarios::HorizonSpec spec;
  if (!h.contains("variant")) throw ConfigError(where + " needs 'variant'");
  spec.variant = get_string(h["variant"], where + ".variant");
  if (!h.contains("center")) throw ConfigError(where + " needs 'center'");
  spec.center = get_vector(h["center"], where + ".center");
  if (h.contains("radius")) spec.radius = get_positive(h["radius"], where + ".radius");
  if (h.contains("semiaxes")) spec.semiaxes = get_vector(h["semiaxes"], where + ".semiaxes");
  if (h.contains("phi")) spec.phi = get_string(h["phi"], where + ".phi");
  if (h.contains("level")) spec.level = get_number(h["level"], where + ".level");
  if (spec.variant == "sphere" && !h.contains("radius")) throw ConfigError(where + ": sphere needs 'radius'");
  if (spec.variant == "ellipsoid" && spec.semiaxes.size() != spec.center.size())
    throw ConfigError(where + ": ellipsoid needs one semiaxis per dimension");
  if (spec.variant == "level_set" && spec.phi.empty()) throw ConfigError(where + ": level_set needs 'phi'");
  return spec;
}

ScenarioEntry parse_entry(const Json& e, std::size_t index) {
  const std::string where = "scenarios[" + std::to_string(index) + "]";
  ScenarioEntry entry;
  if (e.is_string()) {
    entry.name = e.get<std::string>();
    return entry;
  }
  if (!e.is_object()) throw ConfigError(where + " must be a name or an object");
  if (!e.contains("name")) throw ConfigError(where + " needs 'name'");
  entry.name = get_string(e["name"], where + ".name");

  const bool is_inline = e.contains("dimension") || e.contains("f") || e.contains("profile") || e.contains("horizons");
  if (!is_inline) {
    require_keys(e, {"name", "params"}, where);
    if (e.contains("params")) {
      if (!e["params"].is_object()) throw ConfigError(where + ".params must be an object");
      for (const auto& [k, v] : e["params"].items()) {
        if (v.is_string()) entry.params.text[k] = v.get<std::string>();
        else entry.params.num[k] = get_number(v, where + ".params." + k);
      }
    }
    return entry;
  }

  require_keys(e, {"name", "dimension", "f", "profile", "r_min", "parameters", "horizons", "decay", "geometry_only", "expected"},
               where);
  scenarios::InlineSpec spec;
  spec.name = entry.name;
  if (!e.contains("dimension")) throw ConfigError(where + " needs 'dimension'");
  spec.n = get_int(e["dimension"], where + ".dimension", 2, jets::kMaxDim);
  if (e.contains("f")) spec.f = get_string(e["f"], where + ".f");
  if (e.contains("profile")) spec.profile = get_string(e["profile"], where + ".profile");
  if (e.contains("r_min")) spec.r_min = get_number(e["r_min"], where + ".r_min");
  if (e.contains("decay")) spec.decay = get_positive(e["decay"], where + ".decay");
  if (e.contains("geometry_only")) {
    if (!e["geometry_only"].is_boolean()) throw ConfigError(where + ".geometry_only must be true or false");
    spec.geometry_only = e["geometry_only"].get<bool>();
  }
  if (e.contains("parameters")) {
    if (!e["parameters"].is_object()) throw ConfigError(where + ".parameters must be an object");
    for (const auto& [k, v] : e["parameters"].items()) spec.parameters[k] = get_number(v, where + ".parameters." + k);
  }
  if (e.contains("horizons")) {
    if (!e["horizons"].is_array()) throw ConfigError(where + ".horizons must be an array");
    std::size_t i = 0;
    for (const auto& h : e["horizons"]) spec.horizons.push_back(parse_horizon(h, where + ".horizons[" + std::to_string(i++) + "]"));
    for (const auto& h : spec.horizons)
      if (static_cast<int>(h.center.size()) != spec.n)
        throw ConfigError(where + ": horizon center dimension " + std::to_string(h.center.size()) + " differs from dimension " +
                          std::to_string(spec.n));
  }
  if (e.contains("expected")) {
    const Json& x = e["expected"];
    require_keys(x, {"mass", "bound", "boundary", "bulk"}, where + ".expected");
    if (x.contains("mass")) spec.expected.mass = get_number(x["mass"], where + ".expected.mass");
    if (x.contains("bound")) spec.expected.bound = get_number(x["bound"], where + ".expected.bound");
    if (x.contains("boundary")) spec.expected.boundary = get_number(x["boundary"], where + ".expected.boundary");
    if (x.contains("bulk")) spec.expected.bulk = get_number(x["bulk"], where + ".expected.bulk");
  }
  entry.inline_spec = spec;
  return entry;
}

Json estimate_json(const quad::Estimate& e) { return Json{{"value", e.value}, {"error", e.error}}; }

Json bulk_json(const mass::BulkResult& b) {
  return Json{{"mass", b.mass},
              {"error", b.error},
              {"tail_bound", b.tail_bound},
              {"decay", b.decay},
              {"hole_remainder", b.hole_remainder},
              {"min_curvature_margin", b.min_r},
              {"evaluations", b.evaluations},
              {"panels", b.panels}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_text(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(k).dump() << (indent > 0 ? ": " : ":");
        write_text(os, v, indent, depth + 1);
      }
      os << nl << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[" << nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << "," << nl;
        first = false;
        os << pad;
        write_text(os, v, indent, depth + 1);
      }
      os << nl << close << "]";
      return;
    }
    case Json::value_t::number_float: os << num(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

mass::MassReport failed_report(const mass::Scenario& s, mass::Verdict v, const std::string& what) {
  mass::MassReport r;
  r.scenario = s.name;
  r.n = s.n;
  r.geometry_only = s.geometry_only;
  r.glued = s.glued;
  r.exercises = s.exercises;
  r.field = s.field ? s.field->describe() : "none";
  r.checks.push_back({"analysis", v, 0.0, 0.0, what});
  return r;
}

mass::MassReport analyze_guarded(const mass::Scenario& s, const mass::Checks& checks) {
  try {
    return mass::analyze(s, checks);
  } catch (const ConfigError&) {
    throw;
  } catch (const HypothesisError& e) {
    return failed_report(s, mass::Verdict::HypothesisViolated, e.what());
  } catch (const Error& e) {
    return failed_report(s, mass::Verdict::NumericalFailure, e.what());
  }
}

}  // namespace

std::string version() { return GRAPHMASS_VERSION; }

mass::Checks parse_checks(const std::string& list) {
  mass::Checks c{false, false, false};
  std::stringstream ss(list);
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item == "all") c = {true, true, true};
    else if (item == "pmt") c.pmt = true;
    else if (item == "penrose") c.penrose = true;
    else if (item == "identities") c.identities = true;
    else throw ConfigError("unknown check '" + item + "' (pmt, penrose, identities, all)");
    any = true;
  }
  if (!any) throw ConfigError("empty check list");
  return c;
}

std::string checks_string(const mass::Checks& c) {
  if (c.pmt && c.penrose && c.identities) return "all";
  std::string s;
  if (c.pmt) s += "pmt";
  if (c.penrose) s += (s.empty() ? "" : ",") + std::string("penrose");
  if (c.identities) s += (s.empty() ? "" : ",") + std::string("identities");
  return s;
}

RunConfig config_from_json(const Json& doc) {
  require_keys(doc, {"scenarios", "checks", "seed", "quadrature", "output", "workers"}, "config");
  RunConfig cfg;
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array() || doc["scenarios"].empty())
    throw ConfigError("config needs a non-empty 'scenarios' array");
  std::size_t i = 0;
  for (const auto& e : doc["scenarios"]) cfg.scenarios.push_back(parse_entry(e, i++));
  if (doc.contains("checks")) {
    const Json& c = doc["checks"];
    if (c.is_string()) {
      cfg.checks = parse_checks(c.get<std::string>());
    } else if (c.is_array()) {
      std::string list;
      for (const auto& x : c) list += (list.empty() ? "" : ",") + get_string(x, "checks entry");
      cfg.checks = parse_checks(list);
    } else {
      throw ConfigError("checks must be a string or an array of strings");
    }
  }
  if (doc.contains("seed")) {
    const Json& s = doc["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError("seed must be a nonnegative integer");
    cfg.quad.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("quadrature")) cfg.quad = parse_quadrature(doc["quadrature"], cfg.quad);
  if (doc.contains("output")) {
    const Json& o = doc["output"];
    require_keys(o, {"dir", "format"}, "output");
    if (o.contains("dir")) cfg.out = get_string(o["dir"], "output.dir");
    if (o.contains("format")) {
      const std::string f = get_string(o["format"], "output.format");
      if (f == "json") cfg.format = Format::Json;
      else if (f == "csv") cfg.format = Format::Csv;
      else if (f == "both") cfg.format = Format::Both;
      else throw ConfigError("output.format must be json, csv or both");
    }
  }
  if (doc.contains("workers")) cfg.workers = get_int(doc["workers"], "workers", 1, 256);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

std::string default_out_dir() {
  const char* env = std::getenv("GRAPHMASS_OUT_DIR");
  return env && *env ? env : "graphmass-out";
}

Json config_echo(const RunConfig& cfg) {
  Json scen = Json::array();
  for (const auto& e : cfg.scenarios) {
    Json x;
    x["name"] = e.name;
    if (e.inline_spec) {
      const auto& s = *e.inline_spec;
      x["dimension"] = s.n;
      if (!s.f.empty()) x["f"] = s.f;
      if (!s.profile.empty()) {
        x["profile"] = s.profile;
        x["r_min"] = s.r_min;
      }
      Json p = Json::object();
      for (const auto& [k, v] : s.parameters) p[k] = v;
      x["parameters"] = p;
      Json hs = Json::array();
      for (const auto& h : s.horizons) {
        Json hj{{"variant", h.variant}, {"center", h.center}};
        if (h.variant == "sphere") hj["radius"] = h.radius;
        if (h.variant == "ellipsoid") hj["semiaxes"] = h.semiaxes;
        if (h.variant == "level_set") {
          hj["phi"] = h.phi;
          hj["level"] = h.level;
        }
        hs.push_back(hj);
      }
      x["horizons"] = hs;
      x["decay"] = s.decay;
      x["geometry_only"] = s.geometry_only;
    } else {
      Json p = Json::object();
      for (const auto& [k, v] : e.params.num) p[k] = v;
      for (const auto& [k, v] : e.params.text) p[k] = v;
      x["params"] = p;
    }
    scen.push_back(x);
  }
  const quad::QuadConfig& q = cfg.quad;
  Json quadj{{"sphere_order", q.sphere_order},
             {"volume_sphere_order", q.volume_sphere_order},
             {"qmc_pairs", q.qmc_pairs},
             {"volume_qmc_pairs", q.volume_qmc_pairs},
             {"product_max_dim", q.product_max_dim},
             {"abs_tol", q.abs_tol},
             {"rel_tol", q.rel_tol},
             {"max_panels", q.max_panels},
             {"r_max", q.r_max},
             {"horizon_levels", q.horizon_levels},
             {"surface_order", q.surface_order},
             {"partition_inner", q.partition_inner},
             {"radii", q.radii}};
  const char* fmt = cfg.format == Format::Json ? "json" : cfg.format == Format::Csv ? "csv" : "both";
  return Json{{"scenarios", scen}, {"checks", checks_string(cfg.checks)}, {"seed", q.seed}, {"quadrature", quadj},
              {"format", fmt}};
}

Json report_json(const mass::MassReport& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["n"] = r.n;
  j["field"] = r.field;
  j["geometry_only"] = r.geometry_only;
  j["glued"] = r.glued;
  j["exercises"] = r.exercises;
  if (r.adm) {
    const auto& a = *r.adm;
    Json flux = Json::array();
    for (const auto& f : a.samples) {
      Json x{{"radius", f.radius}, {"mass", f.mass}, {"mass_weighted", f.mass_weighted}, {"error", f.error}};
      if (f.spherical) x["spherical_mass"] = *f.spherical;
      flux.push_back(x);
    }
    j["adm"] = Json{{"mass", a.mass()},
                    {"uncertainty", a.uncertainty},
                    {"weighted_mass", a.limit_weighted.value},
                    {"weighted_uncertainty", a.limit_weighted.uncertainty},
                    {"inflated", a.limit.inflated},
                    {"variants_agree", a.variants_agree},
                    {"flux", flux}};
  }
  if (const auto* b = r.bulk()) {
    Json bj = bulk_json(*b);
    Json levels = Json::array();
    for (const auto& l : r.bulk_levels) {
      Json x = bulk_json(l.result);
      x["sphere_rule"] = l.sphere_rule;
      x["rel_tol"] = l.rel_tol;
      levels.push_back(x);
    }
    bj["levels"] = levels;
    j["bulk"] = bj;
  }
  if (r.decomposition) {
    const auto& d = *r.decomposition;
    Json hs = Json::array();
    for (const auto& h : d.horizons) {
      Json conv = Json::array();
      for (const auto& o : h.convergence) conv.push_back(Json{{"offset", o.offset}, {"boundary", o.boundary}, {"gap", o.gap}});
      hs.push_back(Json{{"body", h.body},
                        {"level_variance", h.level_spread},
                        {"grad_near", h.grad_near},
                        {"grad_growth", h.grad_growth},
                        {"level_ok", h.level_ok},
                        {"blowup_ok", h.blowup_ok},
                        {"offset_convergence", conv},
                        {"rate", h.rate_measured ? Json(h.rate) : Json(nullptr)}});
    }
    j["decomposition"] = Json{{"boundary_term", d.boundary},
                              {"boundary_error", d.boundary_error},
                              {"bulk_term", d.bulk},
                              {"total", d.total},
                              {"adm", d.adm},
                              {"residual", d.residual},
                              {"tolerance", d.tolerance},
                              {"pass", d.pass},
                              {"hypotheses_ok", d.hypotheses_ok},
                              {"horizons", hs}};
  }
  if (r.penrose_bound) j["penrose_bound"] = *r.penrose_bound;
  if (r.penrose) {
    const auto& p = *r.penrose;
    j["penrose"] = Json{{"m", p.m},
                        {"bound", p.bound},
                        {"bulk", p.bulk},
                        {"margin", p.margin},
                        {"tolerance", p.tolerance},
                        {"convex", p.convex},
                        {"r_nonnegative_sampled", p.r_nonnegative},
                        {"inequality_holds", p.inequality_holds},
                        {"verdict", mass::to_string(p.verdict)},
                        {"detail", p.detail}};
  }
  if (r.pmt) {
    const auto& p = *r.pmt;
    j["pmt"] = Json{{"m", p.m},
                    {"uncertainty", p.uncertainty},
                    {"min_r", p.min_r},
                    {"r_nonnegative_sampled", p.r_nonnegative},
                    {"verdict", mass::to_string(p.verdict)},
                    {"detail", p.detail}};
  }
  if (r.curvature) {
    const auto& c = *r.curvature;
    j["curvature_sample"] = Json{{"points", c.points},
                                 {"min_r", c.min_r},
                                 {"min_margin", c.min_margin},
                                 {"max_abs_r", c.max_abs_r},
                                 {"nonnegative", c.nonnegative},
                                 {"witness", c.witness}};
  }
  if (r.divergence) j["divergence_sample"] = Json{{"points", r.divergence->points}, {"max_defect", r.divergence->max_defect}};
  if (r.radial_max_rel_diff) j["radial_max_rel_diff"] = *r.radial_max_rel_diff;
  if (r.superadditivity_gap) j["superadditivity_gap"] = *r.superadditivity_gap;
  if (!r.geometry.empty()) {
    Json g = Json::array();
    for (const auto& b : r.geometry) {
      Json q = Json::array();
      for (const auto& e : b.quermass) q.push_back(estimate_json(e));
      g.push_back(Json{{"body", b.body},
                       {"quermassintegrals", q},
                       {"af_gap", b.af_gap},
                       {"af_gap_error", b.af_gap_error},
                       {"chain_min_slack", b.chain_min_slack},
                       {"gauss_map_error", b.gauss_map_error}});
    }
    j["geometry"] = g;
  }
  if (r.flatness) {
    Json rows = Json::array();
    for (const auto& row : r.flatness->rows)
      rows.push_back(Json{{"radius", row.radius}, {"grad", row.grad}, {"hess", row.hess}, {"third", row.third}});
    j["flatness"] = Json{{"decay", r.flatness->decay}, {"rows", rows}, {"flagged", r.flatness->flagged()}};
  }
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name},
                          {"verdict", mass::to_string(c.verdict)},
                          {"value", c.value},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
  j["checks"] = checks;
  j["exit_code"] = r.exit_code();
  return j;
}

RunResult run(const RunConfig& cfg) {
  std::vector<mass::Scenario> built;
  for (const auto& e : cfg.scenarios) {
    mass::Scenario s;
    try {
      s = e.inline_spec ? scenarios::build_inline(*e.inline_spec, cfg.quad) : scenarios::build(e.name, e.params, cfg.quad);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& err) {
      throw ConfigError("scenario '" + e.name + "': " + err.what());
    }
    if (cfg.workers > 1) s.quad.exec = quad::Exec::Serial;
    built.push_back(std::move(s));
  }

  RunResult out;
  out.reports.resize(built.size());
  if (cfg.workers <= 1 || built.size() <= 1) {
    for (std::size_t i = 0; i < built.size(); ++i) out.reports[i] = analyze_guarded(built[i], cfg.checks);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(built.size());
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < built.size();) {
        try {
          out.reports[i] = analyze_guarded(built[i], cfg.checks);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(cfg.workers, static_cast<int>(built.size()));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<int> codes;
  Json reports = Json::array();
  std::map<std::string, int> tally;
  for (const auto& r : out.reports) {
    codes.push_back(r.exit_code());
    reports.push_back(report_json(r));
    for (const auto& c : r.checks) ++tally[mass::to_string(c.verdict)];
  }
  out.exit_code = mass::combine_exit_codes(codes);
  Json summary{{"exit_code", out.exit_code}};
  Json counts = Json::object();
  for (const auto& [k, v] : tally) counts[k] = v;
  summary["verdicts"] = counts;

  out.body = Json{{"config", config_echo(cfg)}, {"scenarios", reports}, {"summary", summary}};
  out.header = Json{{"tool", "graphmass"},
                    {"version", version()},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"boost", BOOST_LIB_VERSION},
                    {"seed", cfg.quad.seed},
                    {"workers", cfg.workers},
                    {"timestamp", utc_timestamp()}};
  return out;
}

std::string to_text(const Json& j, int indent) {
  std::ostringstream os;
  write_text(os, j, indent, 0);
  return os.str();
}

std::string document_text(const RunResult& r) {
  return to_text(Json{{"header", r.header}, {"body", r.body}}) + "\n";
}

std::string flux_csv(const std::vector<mass::MassReport>& reports) {
  std::string s = "scenario,radius,flux_mass,flux_mass_weighted,quadrature_error,spherical_mass\n";
  for (const auto& r : reports) {
    if (!r.adm) continue;
    for (const auto& f : r.adm->samples)
      s += csv_field(r.scenario) + "," + num(f.radius) + "," + num(f.mass) + "," + num(f.mass_weighted) + "," +
           num(f.error) + "," + (f.spherical ? num(*f.spherical) : std::string()) + "\n";
  }
  return s;
}

std::string bulk_csv(const std::vector<mass::MassReport>& reports) {
  std::string s = "scenario,level,sphere_rule,rel_tol,bulk_mass,error,tail_bound,evaluations\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.bulk_levels.size(); ++i) {
      const auto& l = r.bulk_levels[i];
      s += csv_field(r.scenario) + "," + std::to_string(i) + "," + std::to_string(l.sphere_rule) + "," + num(l.rel_tol) +
           "," + num(l.result.mass) + "," + num(l.result.error) + "," + num(l.result.tail_bound) + "," +
           std::to_string(l.result.evaluations) + "\n";
    }
  return s;
}

std::string horizon_csv(const std::vector<mass::MassReport>& reports) {
  std::string s = "scenario,body,offset,boundary_flux,gap\n";
  for (const auto& r : reports) {
    if (!r.decomposition) continue;
    for (const auto& h : r.decomposition->horizons)
      for (const auto& o : h.convergence)
        s += csv_field(r.scenario) + "," + csv_field(h.body) + "," + num(o.offset) + "," + num(o.boundary) + "," +
             num(o.gap) + "\n";
  }
  return s;
}

std::vector<std::filesystem::path> write_outputs(const RunConfig& cfg, const RunResult& r) {
  namespace fs = std::filesystem;
  const fs::path dir = cfg.out.empty() ? fs::path(default_out_dir()) : fs::path(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
    written.push_back(p);
  };
  if (cfg.format != Format::Csv) put("report.json", document_text(r));
  if (cfg.format != Format::Json) {
    put("flux.csv", flux_csv(r.reports));
    put("bulk.csv", bulk_csv(r.reports));
    put("horizon.csv", horizon_csv(r.reports));
  }
  return written;
}

}  // namespace graphmass::app
