#pragma once

// Built-in scenarios and scenarios assembled from user definitions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphmass/mass.hpp"

namespace graphmass::scenarios {

/// Named numeric and text parameters, as given on the command line or in a config.
struct Params {
  std::map<std::string, double> num;
  std::map<std::string, std::string> text;
};

struct Info {
  std::string name;
  std::string dims;  // e.g. "3" or "4..8"
  Params defaults;
  std::vector<std::string> exercises;  // mass statements the scenario checks
  std::string summary;
};

const std::vector<Info>& catalog();
const Info* find(const std::string& name);

/// Registered names within edit distance 3 of `name`, or sharing a prefix with it.
std::vector<std::string> near_matches(const std::string& name);

/// Builds a registered scenario. Throws ConfigError for unknown names
/// (listing near matches), unknown parameters, or out-of-range values.
mass::Scenario build(const std::string& name, const Params& params, const quad::QuadConfig& quad);

struct HorizonSpec {
  std::string variant;  // sphere | ellipsoid | level_set
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> semiaxes;
  std::string phi;      // level_set: defining function, convex, increasing outward
  double level = 0.0;
};

/// A scenario defined in a config file: exactly one of `f` (expression in
/// x1..xn, r) or `profile` (expression in r for F(|x|)).
struct InlineSpec {
  std::string name;
  int n = 0;
  std::string f;
  std::string profile;
  double r_min = 0.0;  // profile domain r > r_min
  std::map<std::string, double> parameters;
  std::vector<HorizonSpec> horizons;
  double decay = 1.0;
  bool geometry_only = false;
  mass::Expected expected;
};

mass::Scenario build_inline(const InlineSpec& spec, const quad::QuadConfig& quad);

convex::BodyPtr build_horizon(const HorizonSpec& spec, int n);

/// Sum of chi_i F_i(|x - c_i|) + chi_inf F_inf(|x|) with Schwarzschild pieces
/// F_i, cutoffs chi_i = smooth_step((|x - c_i| - inner) / (outer - inner)),
/// chi_inf = 1 - sum chi_i, and the smooth outer profile
/// F_inf = sqrt(8M) (|x|^2 + s^2)^(1/4).
class GluedField final : public ScalarField {
 public:
  struct Body {
    std::vector<double> center;
    double m = 0.0;
  };
  GluedField(std::vector<Body> bodies, double outer_mass, double softening, double inner, double outer);

  int dim() const override { return 3; }
  Jet3 jet(std::span<const double> x) const override;
  bool in_domain(std::span<const double> x) const override;
  std::string describe() const override;

  const std::vector<Body>& bodies() const noexcept { return bodies_; }
  double horizon_radius(std::size_t i) const noexcept { return 2 * bodies_[i].m; }

 private:
  std::vector<Body> bodies_;
  std::vector<jets::RadialProfile> pieces_;
  double outer_mass_, softening_, inner_, outer_;
};

}  // namespace graphmass::scenarios
