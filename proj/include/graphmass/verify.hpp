#pragma once

// Acceptance criteria as runnable checks, shared by the CLI and the test suite.

#include <cstdint>
#include <string>
#include <vector>

#include "graphmass/quad.hpp"

namespace graphmass::verify {

struct Criterion {
  int id = 0;
  std::string name;
  double time_limit = 0.0;  // seconds; 0 means none
};

const std::vector<Criterion>& criteria();

struct Options {
  std::uint64_t seed = 20240607;
  quad::QuadConfig quad;
};

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> details;  // one line per case
};

/// Runs one criterion. Throws ConfigError for an unknown id.
Outcome run(int id, const Options& opt);

/// "PASS  3 divergence identity (1.20 s)" followed by indented detail lines
/// when verbose.
std::string format(const Outcome& o, bool verbose = false);

/// Parses "1,3,5-7" or "all".
std::vector<int> parse_ids(const std::string& list);

}  // namespace graphmass::verify
