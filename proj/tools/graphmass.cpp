// graphmass: run mass computations from a config, list scenarios, run the acceptance suite.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "graphmass/app.hpp"
#include "graphmass/errors.hpp"
#include "graphmass/verify.hpp"

namespace {

using namespace graphmass;

constexpr int kConfigError = 3;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number list: '" + text + "'");
    }
  }
  return out;
}

// Leftover arguments: "--key value" pairs become scenario parameters, a bare
// word is the config file. CLI11 would bind the value of an unknown option to
// a declared positional, so the config path is picked out here.
scenarios::Params extra_params(const std::vector<std::string>& rest, std::string& config) {
  scenarios::Params p;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::string key = rest[i];
    std::string value;
    if (key.rfind("--", 0) != 0) {
      if (!config.empty()) throw ConfigError("unexpected argument '" + key + "'");
      config = key;
      continue;
    }
    key.erase(0, 2);
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= rest.size()) throw ConfigError("parameter --" + key + " needs a value");
      value = rest[++i];
    }
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end && *end == '\0' && !value.empty()) p.num[key] = v;
    else p.text[key] = value;
  }
  return p;
}

struct RunArgs {
  std::string scenario;
  std::string checks;
  std::string radii;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  int workers = 0;
};

int do_run(const RunArgs& a, CLI::App& cmd) {
  std::string config;
  const auto params = extra_params(cmd.remaining(), config);
  app::RunConfig cfg;
  if (!config.empty()) cfg = app::load_config(config);

  if (!a.scenario.empty()) {
    // keep a matching config entry, else take the registry scenario
    std::vector<app::ScenarioEntry> chosen;
    for (const auto& e : cfg.scenarios)
      if (e.name == a.scenario) chosen.push_back(e);
    if (chosen.empty()) chosen.push_back({a.scenario, {}, std::nullopt});
    cfg.scenarios = std::move(chosen);
  }
  if (cfg.scenarios.empty()) throw ConfigError("nothing to run: give a config file or --scenario");
  if (!params.num.empty() || !params.text.empty()) {
    for (auto& e : cfg.scenarios) {
      if (e.inline_spec) {
        for (const auto& [k, v] : params.num) {
          if (!e.inline_spec->parameters.count(k)) throw ConfigError("scenario '" + e.name + "' has no parameter '" + k + "'");
          e.inline_spec->parameters[k] = v;
        }
        if (!params.text.empty()) throw ConfigError("text parameters apply to registry scenarios only");
      } else {
        for (const auto& [k, v] : params.num) e.params.num[k] = v;
        for (const auto& [k, v] : params.text) e.params.text[k] = v;
      }
    }
  }
  if (!a.checks.empty()) cfg.checks = app::parse_checks(a.checks);
  if (cmd.count("--seed")) cfg.quad.seed = a.seed;
  if (!a.radii.empty()) {
    cfg.quad.radii = parse_list(a.radii);
    if (cfg.quad.radii.size() < 3) throw ConfigError("--radii needs at least three values");
    for (std::size_t i = 0; i < cfg.quad.radii.size(); ++i)
      if (!(cfg.quad.radii[i] > 0) || (i && !(cfg.quad.radii[i] > cfg.quad.radii[i - 1])))
        throw ConfigError("--radii must be positive and increasing");
  }
  if (!a.out.empty()) cfg.out = a.out;
  if (!a.format.empty()) cfg.format = a.format == "csv" ? app::Format::Csv : a.format == "both" ? app::Format::Both : app::Format::Json;
  if (a.workers > 0) cfg.workers = a.workers;

  const app::RunResult result = app::run(cfg);
  if (cfg.out == "-") {
    std::cout << app::document_text(result);
  } else {
    for (const auto& p : app::write_outputs(cfg, result)) std::fprintf(stderr, "wrote %s\n", p.c_str());
  }
  for (const auto& r : result.reports) {
    std::fprintf(stderr, "%-26s n=%d exit %d\n", r.scenario.c_str(), r.n, r.exit_code());
    for (const auto& c : r.checks)
      if (c.verdict != mass::Verdict::Pass)
        std::fprintf(stderr, "  %-24s %-20s %s\n", c.name.c_str(), mass::to_string(c.verdict), c.detail.c_str());
  }
  return result.exit_code;
}

int do_list(bool json) {
  if (json) {
    app::Json all = app::Json::array();
    for (const auto& i : scenarios::catalog()) {
      app::Json p = app::Json::object();
      for (const auto& [k, v] : i.defaults.num) p[k] = v;
      for (const auto& [k, v] : i.defaults.text) p[k] = v;
      all.push_back({{"name", i.name}, {"dimensions", i.dims}, {"parameters", p}, {"exercises", i.exercises}, {"summary", i.summary}});
    }
    std::cout << app::to_text(all) << "\n";
    return 0;
  }
  for (const auto& i : scenarios::catalog()) {
    std::string params;
    for (const auto& [k, v] : i.defaults.num) {
      std::ostringstream os;
      os << k << "=" << v;
      params += (params.empty() ? "" : " ") + os.str();
    }
    for (const auto& [k, v] : i.defaults.text) params += (params.empty() ? "" : " ") + k + "=\"" + v + "\"";
    std::string ex;
    for (const auto& e : i.exercises) ex += (ex.empty() ? "" : ", ") + e;
    std::printf("%s\n  dimensions: %s\n  parameters: %s\n  exercises:  %s\n  %s\n", i.name.c_str(), i.dims.c_str(),
                params.empty() ? "none" : params.c_str(), ex.c_str(), i.summary.c_str());
  }
  return 0;
}

int do_verify(const std::string& ids, std::uint64_t seed, bool seeded, bool verbose) {
  verify::Options opt;
  if (seeded) opt.seed = opt.quad.seed = seed;
  int failed = 0;
  const auto list = verify::parse_ids(ids);
  for (int id : list) {
    const auto o = verify::run(id, opt);
    std::printf("%s\n", verify::format(o, verbose).c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu passed, %d failed\n", list.size() - failed, failed);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Mass of graphs over R^n: flux and bulk mass, horizon terms, area bounds"};
  cli.set_version_flag("--version", app::version());
  cli.require_subcommand(1);

  RunArgs ra;
  auto* run = cli.add_subcommand("run", "run [CONFIG] [options] [--PARAM VALUE ...]: scenarios from a JSON config and/or --scenario");
  run->add_option("--scenario", ra.scenario, "registry scenario, or the name of a config entry");
  run->add_option("--checks", ra.checks, "pmt, penrose, identities or all (comma separated)");
  run->add_option("--seed", ra.seed, "seed for quasi-random rules and sampling");
  run->add_option("--radii", ra.radii, "flux extrapolation radii, increasing (a,b,c,...)");
  run->add_option("--out", ra.out, "output directory, or - for JSON on stdout (default $GRAPHMASS_OUT_DIR or graphmass-out)");
  run->add_option("--format", ra.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  run->add_option("--workers", ra.workers, "scenarios run concurrently")->check(CLI::Range(1, 256));
  run->allow_extras();

  bool list_json = false;
  auto* list = cli.add_subcommand("list", "list built-in scenarios");
  list->add_flag("--json", list_json, "machine-readable listing");

  std::string ids = "all";
  std::uint64_t vseed = 0;
  bool verbose = false;
  auto* ver = cli.add_subcommand("verify", "run the acceptance criteria");
  ver->add_option("--criteria", ids, "criterion ids, e.g. 1,3,5-7 (default all)");
  ver->add_option("--seed", vseed, "seed for random cases");
  ver->add_flag("-v,--verbose", verbose, "print every case");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return do_run(ra, *run);
    if (*list) return do_list(list_json);
    return do_verify(ids, vseed, ver->count("--seed") > 0, verbose);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const HypothesisError& e) {
    std::fprintf(stderr, "hypothesis violated: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  }
}
