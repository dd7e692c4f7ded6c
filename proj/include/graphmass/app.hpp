#pragma once

// Run configuration, batch execution and report documents for the CLI.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphmass/mass.hpp"
#include "graphmass/scenarios.hpp"

namespace graphmass::app {

using Json = nlohmann::ordered_json;

struct ScenarioEntry {
  std::string name;
  scenarios::Params params;                       // registry scenarios
  std::optional<scenarios::InlineSpec> inline_spec;  // scenarios defined in the config
};

enum class Format { Json, Csv, Both };

struct RunConfig {
  std::vector<ScenarioEntry> scenarios;
  quad::QuadConfig quad;
  mass::Checks checks;
  std::string out;  // directory, or "-" for JSON on stdout
  Format format = Format::Json;
  int workers = 1;
};

/// Parses "pmt,penrose", "identities" or "all". Throws ConfigError.
mass::Checks parse_checks(const std::string& list);
std::string checks_string(const mass::Checks& c);

/// Builds a RunConfig from a parsed config document. Throws ConfigError.
RunConfig config_from_json(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// The config as it will run, with every default filled in.
Json config_echo(const RunConfig& cfg);

/// Output directory when none is configured: $GRAPHMASS_OUT_DIR, else "graphmass-out".
std::string default_out_dir();

struct RunResult {
  std::vector<mass::MassReport> reports;
  Json body;    // deterministic for identical configs
  Json header;  // timestamp, versions
  int exit_code = 0;
};

/// Builds and analyzes every scenario. With workers > 1 scenarios run
/// concurrently, each with serial quadrature; results keep config order.
/// Throws ConfigError for scenarios that cannot be built.
RunResult run(const RunConfig& cfg);

Json report_json(const mass::MassReport& r);

/// JSON text with every floating-point number written as %.17g and
/// non-finite numbers as null. Object keys keep insertion order.
std::string to_text(const Json& j, int indent = 2);

/// {"header": ..., "body": ...} as one document.
std::string document_text(const RunResult& r);

/// CSV tables: radius -> flux mass, resolution -> bulk mass, offset -> horizon term.
std::string flux_csv(const std::vector<mass::MassReport>& reports);
std::string bulk_csv(const std::vector<mass::MassReport>& reports);
std::string horizon_csv(const std::vector<mass::MassReport>& reports);

/// Writes report.json and/or the CSV tables into cfg.out (created if needed).
/// Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const RunConfig& cfg, const RunResult& r);

std::string version();

}  // namespace graphmass::app
