#include "graphmass/quad.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "graphmass/errors.hpp"
#include "parallel.hpp"

namespace graphmass::quad {
namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- rules

struct Gauss1D {
  std::vector<double> nodes, weights;
};

// Gauss rule for the weight (1 - t^2)^a on [-1, 1] by Golub-Welsch.
Gauss1D gauss_gegenbauer(int p, double a) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd off(std::max(p - 1, 0));
  for (int k = 1; k < p; ++k) {
    const double kk = k;
    off[k - 1] = std::sqrt(kk * (kk + 2 * a) / ((2 * kk + 2 * a - 1) * (2 * kk + 2 * a + 1)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  const double mu0 = std::sqrt(kPi) * std::tgamma(a + 1) / std::tgamma(a + 1.5);
  Gauss1D g;
  for (int i = 0; i < p; ++i) {
    g.nodes.push_back(solver.eigenvalues()[i]);
    const double v = solver.eigenvectors()(0, i);
    g.weights.push_back(mu0 * v * v);
  }
  return g;
}

SphereRule product_rule_raw(int n, int p) {
  SphereRule rule;
  rule.n = n;
  rule.kind = SphereRule::Kind::Product;
  rule.degree = 2 * p - 1;
  // circle
  const int m = 2 * p;
  std::vector<std::vector<double>> pts;
  std::vector<double> wts;
  for (int k = 0; k < m; ++k) {
    const double th = 2 * kPi * (k + 0.5) / m;
    pts.push_back({std::cos(th), std::sin(th)});
    wts.push_back(2 * kPi / m);
  }
  // lift S^(d-2) to S^(d-1) with t = x_d
  for (int d = 3; d <= n; ++d) {
    const Gauss1D g = gauss_gegenbauer(p, (d - 3) / 2.0);
    std::vector<std::vector<double>> next;
    std::vector<double> next_w;
    for (int j = 0; j < p; ++j) {
      const double t = g.nodes[j];
      const double c = std::sqrt(std::max(0.0, 1 - t * t));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<double> x(pts[i].size() + 1);
        for (std::size_t q = 0; q < pts[i].size(); ++q) x[q] = c * pts[i][q];
        x.back() = t;
        next.push_back(std::move(x));
        next_w.push_back(g.weights[j] * wts[i]);
      }
    }
    pts = std::move(next);
    wts = std::move(next_w);
  }
  if (n == 1) {
    pts = {{1.0}, {-1.0}};
    wts = {1.0, 1.0};
  }
  for (const auto& x : pts) rule.nodes.insert(rule.nodes.end(), x.begin(), x.end());
  rule.weights = std::move(wts);
  return rule;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// ---------------------------------------------------------------- GK15 on [-1, 1]

struct Kronrod {
  std::array<double, 15> x{}, wk{}, wg{};
};

const Kronrod& kronrod15() {
  static const Kronrod table = [] {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    Kronrod t;
    const auto& ax = GK::abscissa();
    const auto& w = GK::weights();
    const auto& gw = G::weights();
    int k = 0;
    t.x[k] = 0.0;
    t.wk[k] = w[0];
    t.wg[k] = gw[0];
    ++k;
    for (std::size_t i = 1; i < ax.size(); ++i) {
      const double g = (i % 2 == 0) ? gw[i / 2] : 0.0;
      for (double sign : {-1.0, 1.0}) {
        t.x[k] = sign * ax[i];
        t.wk[k] = w[i];
        t.wg[k] = g;
        ++k;
      }
    }
    return t;
  }();
  return table;
}

// ---------------------------------------------------------------- shells

// One family of concentric shells around `center`. The integrand includes
// any partition weight; it reports the unweighted value in `raw` and clears
// `evaluated` where the weight vanishes and fn was not called.
struct ShellJob {
  std::vector<double> center;
  double inner = 0.0;       // inner radius (0 or hole radius)
  bool graded = false;      // graded mesh toward `inner`
  double outer = 0.0;       // finite outer radius, or r_max with tail fit
  bool infinite = false;
  std::function<double(std::span<const double>, double& raw, bool& evaluated)> fn;
};

struct Panel {
  double a = 0.0, b = 0.0, value = 0.0, error = 0.0;
};

struct ShellIntegrator {
  int n;
  const SphereRule& rule;
  const ShellJob& job;
  Exec exec;
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;

  // Sphere integrals at each of the given radii (already multiplied by r^(n-1)).
  std::vector<double> shells(const std::vector<double>& radii) {
    const std::size_t m = rule.size();
    const std::size_t total = radii.size() * m;
    std::vector<double> vals(total), raws(total);
    std::vector<char> used(total);
    detail::for_each_index(total, exec, [&](std::size_t idx) {
      const std::size_t ri = idx / m, ni = idx % m;
      const double r = radii[ri];
      double x[jets::kMaxDim];
      const auto th = rule.node(ni);
      for (int d = 0; d < n; ++d) x[d] = (job.center.empty() ? 0.0 : job.center[d]) + r * th[d];
      double raw = 0.0;
      bool evaluated = false;
      const double v = job.fn(std::span<const double>(x, n), raw, evaluated);
      vals[idx] = rule.weights[ni] * v;
      raws[idx] = raw;
      used[idx] = evaluated;
    });
    std::vector<double> out(radii.size());
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      out[ri] = pairwise_sum(std::span<const double>(vals.data() + ri * m, m)) * std::pow(radii[ri], n - 1);
      for (std::size_t ni = 0; ni < m; ++ni)
        if (used[ri * m + ni]) {
          min_value = std::min(min_value, raws[ri * m + ni]);
          ++evaluations;
        }
    }
    return out;
  }

  Panel panel(double a, double b) {
    const Kronrod& k = kronrod15();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<double> radii(15);
    for (int i = 0; i < 15; ++i) radii[i] = mid + half * k.x[i];
    const std::vector<double> s = shells(radii);
    std::array<double, 15> tk{}, tg{};
    for (int i = 0; i < 15; ++i) {
      tk[i] = k.wk[i] * s[i];
      tg[i] = k.wg[i] * s[i];
    }
    const double vk = half * pairwise_sum(tk);
    const double vg = half * pairwise_sum(tg);
    return {a, b, vk, std::abs(vk - vg)};
  }
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

struct JobResult {
  double value = 0.0, error = 0.0, tail = 0.0, tail_bound = 0.0, remainder = 0.0, angular_error = 0.0;
  double decay = std::numeric_limits<double>::infinity();
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  int panels = 0;
};

JobResult integrate_job(int n, const ShellJob& job, const SphereRule& rule, const QuadConfig& cfg) {
  ShellIntegrator integ{n, rule, job, cfg.exec};
  std::vector<Panel> initial;
  JobResult res;

  double start = job.inner;
  if (job.graded) {
    const double a = job.inner;
    std::vector<Panel> graded;
    for (int j = 0; j < cfg.horizon_levels; ++j)
      graded.push_back(integ.panel(a + a * std::ldexp(1.0, -j - 1), a + a * std::ldexp(1.0, -j)));
    // layer [a, a + a 2^-L] by the trend of the two innermost panels
    if (graded.size() >= 2) {
      const double last = graded.back().value, prev = graded[graded.size() - 2].value;
      double rem = std::abs(last);
      if (prev != 0.0 && last / prev > 0.0 && last / prev < 1.0) rem = last * (last / prev) / (1.0 - last / prev);
      else if (last != 0.0) rem = last;
      else rem = 0.0;
      res.remainder = rem;
    }
    initial = std::move(graded);
    start = 2 * a;
  }
  // geometric panels out to the outer radius
  double lo = start;
  if (lo == 0.0) {
    const double first = std::min(1.0, job.outer);
    initial.push_back(integ.panel(0.0, first));
    lo = first;
  }
  while (lo < job.outer * (1 - 1e-12)) {
    const double hi = std::min(2 * lo, job.outer);
    initial.push_back(integ.panel(lo, hi));
    lo = hi;
  }

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap(PanelOrder{}, initial);
  auto totals = [&] {
    std::vector<Panel> all;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    std::vector<double> v, e;
    for (const auto& p : all) {
      v.push_back(p.value);
      e.push_back(p.error);
    }
    return std::pair{pairwise_sum(v), pairwise_sum(e)};
  };
  auto [value, error] = totals();
  int panels = static_cast<int>(heap.size());
  while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value)) && panels < cfg.max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (worst.a > 0 && worst.b / worst.a > 4) mid = std::sqrt(worst.a * worst.b);
    heap.push(integ.panel(worst.a, mid));
    heap.push(integ.panel(mid, worst.b));
    ++panels;
    std::tie(value, error) = totals();
  }

  // angular error: the same panels with the coarse sphere rule
  double angular = 0.0;
  if (rule.coarse) {
    ShellIntegrator coarse{n, *rule.coarse, job, cfg.exec};
    std::vector<double> diffs;
    for (auto copy = heap; !copy.empty(); copy.pop()) {
      const Panel& p = copy.top();
      diffs.push_back(std::abs(p.value - coarse.panel(p.a, p.b).value));
    }
    std::sort(diffs.begin(), diffs.end());
    angular = pairwise_sum(diffs);
    integ.evaluations += coarse.evaluations;
  }

  res.value = value + res.remainder;
  res.error = error + angular + std::abs(res.remainder);
  res.angular_error = angular;
  res.panels = panels;

  if (job.infinite) {
    const double big = job.outer;
    const std::vector<double> s = integ.shells({0.5 * big, big});
    const double omega = unit_sphere_area(n);
    // shell averages
    const double phi_half = s[0] / (omega * std::pow(0.5 * big, n - 1));
    const double phi = s[1] / (omega * std::pow(big, n - 1));
    const double naive = omega * std::abs(phi) * std::pow(big, n);
    if (naive <= 1e-2 * cfg.abs_tol) {
      res.tail = 0.0;
      res.tail_bound = naive;
      res.decay = std::numeric_limits<double>::infinity();
    } else {
      if (!(phi_half != 0.0 && phi / phi_half > 0.0))
        throw NumericalError("tail fit failed: outer shell averages change sign");
      const double q = std::log2(phi_half / phi);
      res.decay = q;
      if (!(q > n))
        throw NumericalError("integrand is not integrable at infinity: fitted decay q = " + std::to_string(q) +
                             " <= n = " + std::to_string(n));
      res.tail = omega * phi * std::pow(big, n) / (q - n);
      res.tail_bound = 2 * std::abs(res.tail);
    }
    res.value += res.tail;
    res.error += std::abs(res.tail);
  }
  res.min_value = integ.min_value;
  res.evaluations = integ.evaluations;
  return res;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - (b.empty() ? 0.0 : b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double unit_sphere_area(int n) { return 2 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0); }

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

SphereRule product_rule(int n, int p) {
  if (n < 2 || n > jets::kMaxDim) throw Error("sphere rule dimension out of range");
  if (p < 1) throw Error("sphere rule order must be positive");
  SphereRule rule = product_rule_raw(n, p);
  if (p >= 2) rule.coarse = std::make_shared<const SphereRule>(product_rule_raw(n, std::max(1, p / 2)));
  return rule;
}

SphereRule qmc_rule(int n, int pairs, std::uint64_t seed) {
  if (n < 2 || n > jets::kMaxDim) throw Error("sphere rule dimension out of range");
  if (pairs < 1) throw Error("sample count must be positive");
  SphereRule rule;
  rule.n = n;
  rule.kind = SphereRule::Kind::QuasiMonteCarlo;
  std::vector<double> shift(n);
  for (int d = 0; d < n; ++d)
    shift[d] = static_cast<double>(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(d) + 1)) >> 11) * 0x1.0p-53;
  rule.nodes.resize(static_cast<std::size_t>(2 * pairs) * n);
  const double w = unit_sphere_area(n) / (2.0 * pairs);
  for (int i = 0; i < pairs; ++i) {
    double v[jets::kMaxDim];
    double norm2 = 0.0;
    for (int d = 0; d < n; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[d]) + shift[d];
      u -= std::floor(u);
      u = std::clamp(u, 1e-300, 1 - 1e-16);
      v[d] = -std::sqrt(2.0) * boost::math::erfc_inv(2 * u);
      norm2 += v[d] * v[d];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int d = 0; d < n; ++d) {
      rule.nodes[(2 * i) * n + d] = v[d] * inv;
      rule.nodes[(2 * i + 1) * n + d] = -v[d] * inv;
    }
  }
  rule.weights.assign(static_cast<std::size_t>(2 * pairs), w);
  return rule;
}

int surface_order_for(int n, const QuadConfig& cfg) {
  if (cfg.surface_order > 0) return cfg.surface_order;
  int p = 48;
  while (p > 4 && 2.0 * std::pow(p, n - 1) > 2.5e5) p -= 2;
  return p;
}

SphereRule sphere_rule_for(int n, const QuadConfig& cfg, bool volume) {
  if (n <= cfg.product_max_dim) return product_rule(n, volume ? cfg.volume_sphere_order : cfg.sphere_order);
  return qmc_rule(n, volume ? cfg.volume_qmc_pairs : cfg.qmc_pairs, cfg.seed);
}

Estimate sphere_integrate(const PointFn& fn, double r, const SphereRule& rule, std::span<const double> center,
                          Exec exec) {
  if (!(r > 0)) throw Error("sphere radius must be positive");
  const int n = rule.n;
  auto eval = [&](const SphereRule& q) {
    std::vector<double> vals(q.size());
    detail::for_each_index(q.size(), exec, [&](std::size_t i) {
      double x[jets::kMaxDim];
      const auto th = q.node(i);
      for (int d = 0; d < n; ++d) x[d] = (center.empty() ? 0.0 : center[d]) + r * th[d];
      vals[i] = fn(std::span<const double>(x, n));
    });
    return vals;
  };
  const double scale = std::pow(r, n - 1);
  const std::vector<double> vals = eval(rule);
  std::vector<double> weighted(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) weighted[i] = rule.weights[i] * vals[i];
  Estimate est;
  est.value = scale * pairwise_sum(weighted);
  if (rule.kind == SphereRule::Kind::Product) {
    if (rule.coarse) {
      const std::vector<double> cv = eval(*rule.coarse);
      std::vector<double> cw(cv.size());
      for (std::size_t i = 0; i < cv.size(); ++i) cw[i] = rule.coarse->weights[i] * cv[i];
      est.error = std::abs(est.value - scale * pairwise_sum(cw));
    }
  } else {
    // standard error of the mean over antipodal pairs
    const std::size_t pairs = vals.size() / 2;
    std::vector<double> y(pairs);
    for (std::size_t i = 0; i < pairs; ++i) y[i] = 0.5 * (vals[2 * i] + vals[2 * i + 1]);
    const double mean = pairwise_sum(y) / pairs;
    std::vector<double> sq(pairs);
    for (std::size_t i = 0; i < pairs; ++i) sq[i] = (y[i] - mean) * (y[i] - mean);
    const double var = pairs > 1 ? pairwise_sum(sq) / (pairs - 1) : 0.0;
    est.error = scale * unit_sphere_area(n) * std::sqrt(var / pairs);
  }
  return est;
}

VolumeResult exterior_volume_integrate(const PointFn& fn, int n, std::span<const Ball> holes, const QuadConfig& cfg) {
  double biggest = 1.0;
  for (const Ball& b : holes) {
    if (!(b.radius > 0)) throw Error("hole radius must be positive");
    biggest = std::max(biggest, b.radius);
  }
  const double r_max = cfg.r_max > 0 ? cfg.r_max : 1e3 * biggest;
  if (!(cfg.partition_inner >= 0 && cfg.partition_inner < 1)) throw Error("partition_inner must lie in [0, 1)");
  const SphereRule rule = sphere_rule_for(n, cfg, true);

  std::vector<ShellJob> jobs;
  auto plain = [&fn](std::span<const double> x, double& raw, bool& evaluated) {
    raw = fn(x);
    evaluated = true;
    return raw;
  };

  const bool centered_single =
      holes.size() == 1 && distance(holes[0].center, std::span<const double>{}) == 0.0;
  if (holes.empty() || centered_single) {
    ShellJob job;
    job.center.assign(n, 0.0);
    job.inner = holes.empty() ? 0.0 : holes[0].radius;
    job.graded = !holes.empty();
    job.outer = r_max;
    job.infinite = true;
    job.fn = plain;
    jobs.push_back(std::move(job));
  } else {
    // partition of unity: w_i = 1 on |x - c_i| < inner_i, 0 beyond outer_i
    const std::size_t k = holes.size();
    std::vector<double> pin(k), pout(k);
    for (std::size_t i = 0; i < k; ++i) {
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) gap = std::min(gap, distance(holes[i].center, holes[j].center) - holes[i].radius - holes[j].radius);
      if (!(gap > 0)) throw Error("holes overlap");
      const double a = holes[i].radius;
      pout[i] = std::min(8 * a, a + 0.45 * gap);
      pin[i] = a + cfg.partition_inner * (pout[i] - a);
    }
    auto weight = [=, hs = std::vector<Ball>(holes.begin(), holes.end())](std::size_t i, std::span<const double> x) {
      const double d = distance(x, hs[i].center);
      return jets::smooth_step((d - pin[i]) / (pout[i] - pin[i]));
    };
    for (std::size_t i = 0; i < k; ++i) {
      ShellJob job;
      job.center = holes[i].center;
      job.inner = holes[i].radius;
      job.graded = true;
      job.outer = pout[i];
      job.fn = [&fn, weight, i](std::span<const double> x, double& raw, bool& evaluated) {
        const double w = weight(i, x);
        if (w == 0.0) return 0.0;
        raw = fn(x);
        evaluated = true;
        return w * raw;
      };
      jobs.push_back(std::move(job));
    }
    ShellJob outer;
    outer.center.assign(n, 0.0);
    outer.outer = r_max;
    outer.infinite = true;
    outer.fn = [&fn, weight, k](std::span<const double> x, double& raw, bool& evaluated) {
      double w = 0.0;
      for (std::size_t i = 0; i < k; ++i) w += weight(i, x);
      if (w >= 1.0) return 0.0;
      raw = fn(x);
      evaluated = true;
      return (1.0 - w) * raw;
    };
    jobs.push_back(std::move(outer));
  }

  VolumeResult out;
  out.r_max = r_max;
  out.min_value = std::numeric_limits<double>::infinity();
  out.decay = std::numeric_limits<double>::infinity();
  std::vector<double> values, errors;
  for (const ShellJob& job : jobs) {
    const JobResult r = integrate_job(n, job, rule, cfg);
    values.push_back(r.value);
    errors.push_back(r.error);
    out.tail += r.tail;
    out.tail_bound += r.tail_bound;
    out.hole_remainder += r.remainder;
    out.angular_error += r.angular_error;
    if (job.infinite) out.decay = r.decay;
    out.min_value = std::min(out.min_value, r.min_value);
    out.evaluations += r.evaluations;
    out.panels += r.panels;
  }
  out.value = pairwise_sum(values);
  out.error = pairwise_sum(errors);
  return out;
}

std::vector<double> default_radii(double r_max) { return {r_max / 8, r_max / 4, r_max / 2, r_max}; }

Limit extrapolate_limit(std::span<const double> radii, std::span<const double> values) {
  const std::size_t m = radii.size();
  if (m < 3 || values.size() != m) throw Error("extrapolation needs at least three samples");
  for (std::size_t i = 1; i < m; ++i)
    if (!(radii[i] > radii[i - 1])) throw Error("extrapolation radii must increase");

  double lo = values[0], hi = values[0], scale = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    scale = std::max(scale, std::abs(v));
  }
  const double flat = 16 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  Limit non_monotone{values[m - 1], hi - lo, true};

  std::vector<double> fits;
  double last_fit = values[m - 1];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        const double d1 = values[i] - values[j], d2 = values[j] - values[k];
        double fit;
        if (std::abs(d1) <= flat && std::abs(d2) <= flat) {
          fit = values[k];
        } else {
          if (!(d1 * d2 > 0)) return non_monotone;
          const double a = std::log(radii[j] / radii[i]), b = std::log(radii[k] / radii[j]);
          const double target = d1 / d2;
          // h(s) = e^(s a) expm1(-s a) / expm1(-s b), increasing from a / b
          auto h = [&](double s) { return std::exp(s * a) * std::expm1(-s * a) / std::expm1(-s * b); };
          if (!(target > a / b)) return non_monotone;
          double s_lo = 1e-9, s_hi = 1.0;
          while (h(s_hi) < target && s_hi < 200) s_hi *= 2;
          if (h(s_hi) < target) return non_monotone;
          for (int it = 0; it < 200 && s_hi - s_lo > 1e-15 * s_hi; ++it) {
            const double s = 0.5 * (s_lo + s_hi);
            (h(s) < target ? s_lo : s_hi) = s;
          }
          const double s = 0.5 * (s_lo + s_hi);
          fit = values[k] - d2 / std::expm1(s * b);
        }
        fits.push_back(fit);
        if (i == m - 3 && j == m - 2 && k == m - 1) last_fit = fit;
      }
  double spread = 0.0;
  for (double f : fits) spread = std::max(spread, std::abs(f - last_fit));
  return {last_fit, spread, false};
}

}  // namespace graphmass::quad
