#include "graphmass/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphmass/errors.hpp"

namespace graphmass::scenarios {
namespace {

const char* const kFlux = "flux mass";
const char* const kBulk = "bulk identity";
const char* const kHorizon = "horizon identity";
const char* const kPenrose = "area bound";
const char* const kPmt = "positive mass";
const char* const kRadial = "radial nonnegativity";
const char* const kDivergence = "divergence identity";
const char* const kAf = "Aleksandrov-Fenchel";
const char* const kSuper = "superadditivity";

std::vector<Info> make_catalog() {
  std::vector<Info> c;
  c.push_back({"flat", "2..8", {{{"n", 3}}, {}}, {kFlux, kBulk, kPmt, kDivergence}, "f = 0"});
  c.push_back({"schwarzschild3", "3", {{{"m", 1}}, {}},
               {kFlux, kHorizon, kPenrose, kRadial, kDivergence},
               "sqrt(8m(r - 2m)) outside r = 2m"});
  c.push_back({"schwarzschild_n", "4..8", {{{"n", 4}, {"m", 1}}, {}},
               {kFlux, kHorizon, kPenrose, kRadial, kDivergence},
               "F'^2 = 2m / (r^(n-2) - 2m) outside r = (2m)^(1/(n-2))"});
  c.push_back({"radial_custom", "3..8", {{{"n", 3}, {"m", 1}, {"s", 1}}, {{"profile", ""}}},
               {kFlux, kBulk, kPmt, kRadial, kDivergence},
               "sqrt(8m) (r^2 + s^2)^(1/4), or F(r) from the text parameter 'profile'"});
  c.push_back({"bump", "3..8", {{{"n", 3}, {"alpha", 0.1}}, {}}, {kFlux, kBulk, kPmt, kDivergence},
               "alpha exp(-r^2); R changes sign"});
  c.push_back({"schwarzschild_perturbed", "3..8", {{{"n", 3}, {"m", 1}, {"eps", 0.2}}, {}},
               {kFlux, kHorizon, kPenrose, kRadial, kDivergence},
               "F'^2 = 2mu / (r^(n-2) - 2mu), mu = m (1 + eps (r - r0) / r); strict area bound"});
  c.push_back({"ellipsoid_horizon", "2..8", {{}, {{"semiaxes", "1,1,2"}}}, {kAf, kPenrose, kSuper},
               "axis-aligned ellipsoid; geometry-only"});
  c.push_back({"two_body_glued", "3", {{{"m1", 0.5}, {"m2", 0.5}, {"separation", 12}, {"M", 1.5}, {"s", 1}}, {}},
               {kFlux, kHorizon, kPenrose, kSuper, kDivergence},
               "two Schwarzschild ends glued into sqrt(8M)(r^2 + s^2)^(1/4)"});
  return c;
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Defaults overlaid with user values; unknown names are rejected.
Params resolve(const Info& info, const Params& given) {
  Params p = info.defaults;
  auto allowed = [&] {
    std::string s;
    for (const auto& [k, v] : info.defaults.num) s += (s.empty() ? "" : ", ") + k;
    for (const auto& [k, v] : info.defaults.text) s += (s.empty() ? "" : ", ") + k;
    return s.empty() ? std::string("none") : s;
  };
  for (const auto& [k, v] : given.num) {
    if (!info.defaults.num.count(k))
      throw ConfigError("scenario '" + info.name + "' has no numeric parameter '" + k + "' (parameters: " + allowed() + ")");
    if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' must be finite");
    p.num[k] = v;
  }
  for (const auto& [k, v] : given.text) {
    if (!info.defaults.text.count(k))
      throw ConfigError("scenario '" + info.name + "' has no text parameter '" + k + "' (parameters: " + allowed() + ")");
    p.text[k] = v;
  }
  return p;
}

int dimension(const Params& p, int lo, int hi) {
  const double v = p.num.at("n");
  if (v != std::floor(v) || v < lo || v > hi) {
    std::ostringstream os;
    os << "dimension n = " << v << " outside " << lo << ".." << hi;
    throw ConfigError(os.str());
  }
  return static_cast<int>(v);
}

double positive(const Params& p, const std::string& k) {
  const double v = p.num.at(k);
  if (!(v > 0)) throw ConfigError("parameter '" + k + "' must be positive");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot read " + what + " entry '" + item + "'");
    }
  }
  return out;
}

mass::Scenario radial_scenario(std::string name, int n, jets::RadialProfile profile, double decay,
                               const quad::QuadConfig& q) {
  mass::Scenario s;
  s.name = std::move(name);
  s.n = n;
  s.decay = decay;
  s.quad = q;
  s.field = std::make_shared<RadialField>(profile, n);
  s.profile = std::move(profile);
  return s;
}

void add_horizon_sphere(mass::Scenario& s, double r0) {
  std::vector<double> c(s.n, 0.0);
  s.horizons = convex::HorizonSet({std::make_shared<convex::Sphere>(c, r0)});
  auto field = std::const_pointer_cast<ScalarField>(s.field);
  field->set_excluded({Ball{c, r0}});
}

}  // namespace

const std::vector<Info>& catalog() {
  static const std::vector<Info> c = make_catalog();
  return c;
}

const Info* find(const std::string& name) {
  for (const auto& i : catalog())
    if (i.name == name) return &i;
  return nullptr;
}

std::vector<std::string> near_matches(const std::string& name) {
  std::vector<std::string> out;
  for (const auto& i : catalog()) {
    const std::size_t k = std::min<std::size_t>(4, std::min(name.size(), i.name.size()));
    if (edit_distance(name, i.name) <= 3 || (k >= 3 && name.compare(0, k, i.name, 0, k) == 0)) out.push_back(i.name);
  }
  return out;
}

mass::Scenario build(const std::string& name, const Params& given, const quad::QuadConfig& q) {
  const Info* info = find(name);
  if (!info) {
    std::string msg = "unknown scenario '" + name + "'";
    const auto near = near_matches(name);
    if (!near.empty()) {
      msg += "; did you mean";
      for (std::size_t i = 0; i < near.size(); ++i) msg += (i ? ", " : " ") + near[i];
      msg += "?";
    }
    throw ConfigError(msg);
  }
  const Params p = resolve(*info, given);
  mass::Scenario s;

  if (name == "flat") {
    const int n = dimension(p, 2, jets::kMaxDim);
    s.name = name;
    s.n = n;
    s.quad = q;
    s.decay = n;
    s.field = std::make_shared<ExprField>(jets::parse("0", n), jets::ParamBindings{});
    s.expected = {0.0, std::nullopt, std::nullopt, 0.0};
  } else if (name == "schwarzschild3" || name == "schwarzschild_n") {
    const int n = name == "schwarzschild3" ? 3 : dimension(p, 4, jets::kMaxDim);
    const double m = positive(p, "m");
    s = radial_scenario(name, n, jets::schwarzschild_profile(n, m), n - 2, q);
    add_horizon_sphere(s, std::pow(2 * m, 1.0 / (n - 2)));
    s.expected = {m, m, m, 0.0};
  } else if (name == "schwarzschild_perturbed") {
    const int n = dimension(p, 3, jets::kMaxDim);
    const double m = positive(p, "m"), eps = p.num.at("eps");
    if (!(eps >= 0 && eps < 1)) throw ConfigError("parameter 'eps' must lie in [0, 1)");
    s = radial_scenario(name, n, jets::perturbed_schwarzschild_profile(n, m, eps), n - 2, q);
    add_horizon_sphere(s, std::pow(2 * m, 1.0 / (n - 2)));
    s.expected = {m * (1 + eps), m, m, eps * m};
  } else if (name == "radial_custom") {
    const int n = dimension(p, 3, jets::kMaxDim);
    const std::string& text = p.text.at("profile");
    if (text.empty()) {
      if (n != 3) throw ConfigError("the built-in radial_custom profile has finite mass only for n = 3; pass 'profile'");
      const double m = p.num.at("m"), soft = positive(p, "s");
      if (!(m >= 0)) throw ConfigError("parameter 'm' must be nonnegative");
      s = radial_scenario(name, n, jets::regularized_profile(m, soft), 1.0, q);
      s.expected = {m, std::nullopt, std::nullopt, m};
    } else {
      std::vector<std::string> names;
      jets::ParamBindings bind;
      for (const auto& [k, v] : p.num)
        if (k != "n") {
          names.push_back(k);
          bind[k] = v;
        }
      const jets::Expr e = jets::parse(text, 1, names);
      s = radial_scenario(name, n, jets::profile_from_expression(e, bind, 0.0), 1.0, q);
    }
  } else if (name == "bump") {
    const int n = dimension(p, 3, jets::kMaxDim);
    const double alpha = p.num.at("alpha");
    s.name = name;
    s.n = n;
    s.quad = q;
    s.decay = 8.0;  // faster than any power
    std::string sq;
    for (int i = 1; i <= n; ++i) sq += (i > 1 ? "+x" : "x") + std::to_string(i) + "^2";
    s.field = std::make_shared<ExprField>(jets::parse("alpha*exp(-(" + sq + "))", n, std::vector<std::string>{"alpha"}),
                                          jets::ParamBindings{{"alpha", alpha}});
    s.expected = {0.0, std::nullopt, std::nullopt, 0.0};
  } else if (name == "ellipsoid_horizon") {
    const std::vector<double> axes = parse_list(p.text.at("semiaxes"), "semiaxes");
    if (axes.size() < 2 || static_cast<int>(axes.size()) > jets::kMaxDim)
      throw ConfigError("semiaxes must list between 2 and " + std::to_string(jets::kMaxDim) + " values");
    for (double a : axes)
      if (!(a > 0)) throw ConfigError("semiaxes must be positive");
    s.name = name;
    s.n = static_cast<int>(axes.size());
    s.quad = q;
    s.geometry_only = true;
    s.horizons = convex::HorizonSet({std::make_shared<convex::Ellipsoid>(std::vector<double>(s.n, 0.0), axes)});
  } else if (name == "two_body_glued") {
    const double m1 = positive(p, "m1"), m2 = positive(p, "m2"), d = positive(p, "separation");
    const double big = positive(p, "M"), soft = positive(p, "s");
    // cutoff band [2 r0, 4 r0] around each body has to sit inside the
    // hole-centered shells of the volume integral, before their partition band
    const double r1 = 2 * m1, r2 = 2 * m2;
    if (d < 12 * std::max(r1, r2))
      throw ConfigError("separation must be at least 12 horizon radii (" + std::to_string(12 * std::max(r1, r2)) + ")");
    std::vector<GluedField::Body> bodies{{{-d / 2, 0, 0}, m1}, {{d / 2, 0, 0}, m2}};
    auto field = std::make_shared<GluedField>(bodies, big, soft, 2.0, 4.0);
    s.name = name;
    s.n = 3;
    s.quad = q;
    s.quad.partition_inner = 0.7;
    s.quad.volume_sphere_order = std::max(q.volume_sphere_order, 24);
    s.decay = 1.0;
    s.glued = true;
    s.field = field;
    s.horizons = convex::HorizonSet({std::make_shared<convex::Sphere>(bodies[0].center, r1),
                                     std::make_shared<convex::Sphere>(bodies[1].center, r2)});
    field->set_excluded({Ball{bodies[0].center, r1}, Ball{bodies[1].center, r2}});
    s.expected = {big, m1 + m2, m1 + m2, std::nullopt};
  }
  s.exercises = info->exercises;
  return s;
}

convex::BodyPtr build_horizon(const HorizonSpec& h, int n) {
  if (static_cast<int>(h.center.size()) != n)
    throw ConfigError("horizon center has " + std::to_string(h.center.size()) + " entries, dimension is " + std::to_string(n));
  try {
    if (h.variant == "sphere") return std::make_shared<convex::Sphere>(h.center, h.radius);
    if (h.variant == "ellipsoid") return std::make_shared<convex::Ellipsoid>(h.center, h.semiaxes);
    if (h.variant == "level_set") {
      auto phi = std::make_shared<ExprField>(jets::parse(h.phi, n), jets::ParamBindings{});
      return std::make_shared<convex::SmoothLevelSet>(phi, h.level, h.center);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("horizon: ") + e.what());
  }
  throw ConfigError("unknown horizon variant '" + h.variant + "' (sphere, ellipsoid, level_set)");
}

mass::Scenario build_inline(const InlineSpec& spec, const quad::QuadConfig& q) {
  if (spec.n < 2 || spec.n > jets::kMaxDim)
    throw ConfigError("dimension n = " + std::to_string(spec.n) + " outside 2.." + std::to_string(jets::kMaxDim));
  mass::Scenario s;
  s.name = spec.name;
  s.n = spec.n;
  s.quad = q;
  s.decay = spec.decay;
  s.geometry_only = spec.geometry_only;
  s.expected = spec.expected;
  if (!(spec.decay > 0)) throw ConfigError("decay must be positive");

  std::vector<std::string> names;
  jets::ParamBindings bind;
  for (const auto& [k, v] : spec.parameters) {
    names.push_back(k);
    bind[k] = v;
  }
  if (!spec.geometry_only) {
    if (spec.f.empty() == spec.profile.empty())
      throw ConfigError("scenario '" + spec.name + "' needs exactly one of 'f' and 'profile'");
    if (!spec.f.empty()) {
      s.field = std::make_shared<ExprField>(jets::parse(spec.f, spec.n, names), bind);
    } else {
      auto prof = jets::profile_from_expression(jets::parse(spec.profile, 1, names), bind, spec.r_min);
      s.field = std::make_shared<RadialField>(prof, spec.n);
      s.profile = prof;
    }
  }
  std::vector<convex::BodyPtr> bodies;
  std::vector<Ball> balls;
  for (const auto& h : spec.horizons) {
    bodies.push_back(build_horizon(h, spec.n));
    balls.push_back({std::vector<double>(bodies.back()->center().begin(), bodies.back()->center().end()),
                     bodies.back()->bounding_radius()});
  }
  if (!bodies.empty()) s.horizons = convex::HorizonSet(bodies);
  if (s.field && !balls.empty()) std::const_pointer_cast<ScalarField>(s.field)->set_excluded(balls);
  s.exercises = {kFlux};
  if (spec.geometry_only) {
    s.exercises = {kAf, kPenrose, kSuper};
  } else if (bodies.empty()) {
    s.exercises.insert(s.exercises.end(), {kBulk, kPmt, kDivergence});
  } else {
    s.exercises.insert(s.exercises.end(), {kHorizon, kPenrose, kDivergence});
  }
  if (s.profile) s.exercises.push_back(kRadial);
  return s;
}

// ---------------------------------------------------------------- glued field

GluedField::GluedField(std::vector<Body> bodies, double outer_mass, double softening, double inner, double outer)
    : bodies_(std::move(bodies)), outer_mass_(outer_mass), softening_(softening), inner_(inner), outer_(outer) {
  for (const auto& b : bodies_) {
    if (b.center.size() != 3) throw Error("glued bodies live in R^3");
    pieces_.push_back(jets::schwarzschild_profile(3, b.m));
  }
  if (!(outer > inner && inner > 1)) throw Error("glued cutoff band must satisfy 1 < inner < outer");
}

Jet3 GluedField::jet(std::span<const double> x) const {
  Jet3 q = Jet3::constant(3, softening_ * softening_);
  for (int i = 0; i < 3; ++i) q += Jet3::variable(3, i, x[i]) * Jet3::variable(3, i, x[i]);
  Jet3 far = std::sqrt(8 * outer_mass_) * jets::pow(q, 0.25);

  Jet3 f = Jet3::constant(3, 0.0);
  Jet3 rest = Jet3::constant(3, 1.0);
  for (std::size_t b = 0; b < bodies_.size(); ++b) {
    const double r0 = horizon_radius(b);
    const Jet3 rho = jets::radius(x, bodies_[b].center);
    const Jet3 chi = jets::smooth_step((rho * (1.0 / r0) - inner_) * (1.0 / (outer_ - inner_)));
    if (chi.value() == 0.0) continue;
    f += chi * jets::radial_jet(pieces_[b], x, bodies_[b].center);
    rest -= chi;
  }
  if (rest.value() != 0.0) f += rest * far;
  return f;
}

bool GluedField::in_domain(std::span<const double> x) const {
  for (std::size_t b = 0; b < bodies_.size(); ++b) {
    double r2 = 0.0;
    for (int i = 0; i < 3; ++i) r2 += (x[i] - bodies_[b].center[i]) * (x[i] - bodies_[b].center[i]);
    if (!(std::sqrt(r2) > horizon_radius(b))) return false;
  }
  return true;
}

std::string GluedField::describe() const {
  std::ostringstream os;
  os << "glued(M=" << outer_mass_ << ",s=" << softening_;
  for (const auto& b : bodies_) os << ";m=" << b.m << "@(" << b.center[0] << "," << b.center[1] << "," << b.center[2] << ")";
  os << ")";
  return os.str();
}

}  // namespace graphmass::scenarios
