#include "graphmass/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphmass/errors.hpp"

namespace graphmass::jets {
namespace {

struct Pair {
  int i, j;
};
struct Triple {
  int i, j, k;
};

// Packed-order enumerations; the packing is dimension independent so a prefix
// of each table covers any n <= kMaxDim.
struct Tables {
  std::array<Pair, packed_size2(kMaxDim)> pairs{};
  std::array<Triple, packed_size3(kMaxDim)> triples{};
  constexpr Tables() {
    for (int j = 0; j < kMaxDim; ++j)
      for (int i = 0; i <= j; ++i) pairs[index2(i, j)] = {i, j};
    for (int k = 0; k < kMaxDim; ++k)
      for (int j = 0; j <= k; ++j)
        for (int i = 0; i <= j; ++i) triples[index3(i, j, k)] = {i, j, k};
  }
};

constexpr Tables kTables{};

void require_same_dim(const Jet3& a, const Jet3& b) {
  if (a.dim() != b.dim()) throw Error("jet dimension mismatch");
}

}  // namespace

Jet3::Jet3(int dim, double value) : dim_(dim), value_(value) {
  if (dim < 0 || dim > kMaxDim) throw Error("jet dimension must be in 0.." + std::to_string(kMaxDim));
  std::fill_n(grad_.begin(), dim, 0.0);
  std::fill_n(hess_.begin(), packed_size2(dim), 0.0);
  std::fill_n(third_.begin(), packed_size3(dim), 0.0);
}

Jet3 Jet3::variable(int dim, int i, double x_i) {
  Jet3 j(dim, x_i);
  j.grad_[i] = 1.0;
  return j;
}

bool Jet3::finite() const noexcept {
  if (!std::isfinite(value_)) return false;
  for (double v : grad_span())
    if (!std::isfinite(v)) return false;
  for (double v : hess_packed())
    if (!std::isfinite(v)) return false;
  for (double v : third_packed())
    if (!std::isfinite(v)) return false;
  return true;
}

Jet3& Jet3::operator+=(const Jet3& o) noexcept {
  value_ += o.value_;
  for (int i = 0; i < dim_; ++i) grad_[i] += o.grad_[i];
  for (int p = 0; p < packed_size2(dim_); ++p) hess_[p] += o.hess_[p];
  for (int p = 0; p < packed_size3(dim_); ++p) third_[p] += o.third_[p];
  return *this;
}

Jet3& Jet3::operator-=(const Jet3& o) noexcept {
  value_ -= o.value_;
  for (int i = 0; i < dim_; ++i) grad_[i] -= o.grad_[i];
  for (int p = 0; p < packed_size2(dim_); ++p) hess_[p] -= o.hess_[p];
  for (int p = 0; p < packed_size3(dim_); ++p) third_[p] -= o.third_[p];
  return *this;
}

Jet3& Jet3::operator*=(double s) noexcept {
  value_ *= s;
  for (int i = 0; i < dim_; ++i) grad_[i] *= s;
  for (int p = 0; p < packed_size2(dim_); ++p) hess_[p] *= s;
  for (int p = 0; p < packed_size3(dim_); ++p) third_[p] *= s;
  return *this;
}

Jet3 operator*(const Jet3& u, const Jet3& v) noexcept {
  const int n = u.dim();
  Jet3 w(n, u.value_ * v.value_);
  for (int i = 0; i < n; ++i) w.grad_[i] = u.grad_[i] * v.value_ + u.value_ * v.grad_[i];
  for (int p = 0; p < packed_size2(n); ++p) {
    const auto [i, j] = kTables.pairs[p];
    w.hess_[p] = u.hess_[p] * v.value_ + u.grad_[i] * v.grad_[j] + u.grad_[j] * v.grad_[i] + u.value_ * v.hess_[p];
  }
  for (int p = 0; p < packed_size3(n); ++p) {
    const auto [i, j, k] = kTables.triples[p];
    w.third_[p] = u.third_[p] * v.value_ + u.hess(i, j) * v.grad_[k] + u.hess(i, k) * v.grad_[j] +
                  u.hess(j, k) * v.grad_[i] + u.grad_[i] * v.hess(j, k) + u.grad_[j] * v.hess(i, k) +
                  u.grad_[k] * v.hess(i, j) + u.value_ * v.third_[p];
  }
  return w;
}

Jet3 operator/(const Jet3& a, const Jet3& b) {
  require_same_dim(a, b);
  return a * reciprocal(b);
}

Jet3 compose(const Jet3& u, double phi, double d1, double d2, double d3) noexcept {
  const int n = u.dim();
  Jet3 w(n, phi);
  for (int i = 0; i < n; ++i) w.set_grad(i, d1 * u.grad(i));
  for (int p = 0; p < packed_size2(n); ++p) {
    const auto [i, j] = kTables.pairs[p];
    w.set_hess(i, j, d2 * u.grad(i) * u.grad(j) + d1 * u.hess(i, j));
  }
  for (int p = 0; p < packed_size3(n); ++p) {
    const auto [i, j, k] = kTables.triples[p];
    const double gi = u.grad(i), gj = u.grad(j), gk = u.grad(k);
    w.set_third(i, j, k,
                d3 * gi * gj * gk + d2 * (u.hess(i, j) * gk + u.hess(i, k) * gj + u.hess(j, k) * gi) +
                    d1 * u.third(i, j, k));
  }
  return w;
}

Jet3 sqrt(const Jet3& u) {
  const double x = u.value();
  if (x < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(x));
  if (x == 0.0) throw DomainError("sqrt is not differentiable at 0");
  const double s = std::sqrt(x);
  const double d1 = 0.5 / s;
  const double d2 = -0.5 * d1 / x;
  const double d3 = -1.5 * d2 / x;
  return compose(u, s, d1, d2, d3);
}

Jet3 exp(const Jet3& u) {
  const double e = std::exp(u.value());
  return compose(u, e, e, e, e);
}

Jet3 log(const Jet3& u) {
  const double x = u.value();
  if (x <= 0.0) throw DomainError("log of non-positive argument " + std::to_string(x));
  const double inv = 1.0 / x;
  return compose(u, std::log(x), inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet3 sin(const Jet3& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return compose(u, s, c, -s, -c);
}

Jet3 cos(const Jet3& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return compose(u, c, -s, -c, s);
}

Jet3 reciprocal(const Jet3& u) {
  const double x = u.value();
  if (x == 0.0) throw DomainError("division by zero");
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return compose(u, inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2);
}

namespace {
// exp(-1/t) is below the smallest subnormal for t < 1/745.
constexpr double kStepFlat = 1.0 / 700.0;
}  // namespace

double smooth_step(double t) {
  if (t <= kStepFlat) return 1.0;
  if (t >= 1.0 - kStepFlat) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

Jet3 smooth_step(const Jet3& t) {
  const double x = t.value();
  if (x <= kStepFlat) return Jet3::constant(t.dim(), 1.0);
  if (x >= 1.0 - kStepFlat) return Jet3::constant(t.dim(), 0.0);
  const Jet3 s = Jet3::variable(1, 0, x);
  const Jet3 a = exp(-1.0 * reciprocal(1.0 - s));
  const Jet3 b = exp(-1.0 * reciprocal(s));
  const Jet3 chi = a / (a + b);
  return compose(t, chi.value(), chi.grad(0), chi.hess(0, 0), chi.third(0, 0, 0));
}

Jet3 pow(const Jet3& u, double c) {
  const int n = u.dim();
  if (c == 0.0) return Jet3::constant(n, 1.0);
  if (c == 1.0) return u;
  const double x = u.value();
  const bool integral = std::floor(c) == c;
  if (x < 0.0 && !integral) throw DomainError("non-integer power of negative base " + std::to_string(x));

  // phi^(k)(x) = c (c-1) ... (c-k+1) x^(c-k); a vanishing falling factorial
  // makes the term zero even where x^(c-k) would be singular.
  double d[4];
  double falling = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (k > 0) falling *= (c - (k - 1));
    if (falling == 0.0) {
      d[k] = 0.0;
      continue;
    }
    if (x == 0.0 && c - k < 0.0) throw DomainError("power with negative effective exponent at 0");
    d[k] = falling * std::pow(x, c - k);
  }
  return compose(u, d[0], d[1], d[2], d[3]);
}

Jet3 radius(std::span<const double> x, std::span<const double> center) {
  const int n = static_cast<int>(x.size());
  std::array<double, kMaxDim> y{};
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    y[i] = x[i] - (center.empty() ? 0.0 : center[i]);
    r2 += y[i] * y[i];
  }
  if (r2 == 0.0) throw DomainError("radial coordinate is singular at the origin");
  const double r = std::sqrt(r2);
  const double inv = 1.0 / r, inv3 = inv * inv * inv, inv5 = inv3 * inv * inv;
  Jet3 j(n, r);
  for (int i = 0; i < n; ++i) j.set_grad(i, y[i] * inv);
  for (int p = 0; p < packed_size2(n); ++p) {
    const auto [a, b] = kTables.pairs[p];
    j.set_hess(a, b, ((a == b ? 1.0 : 0.0) - y[a] * y[b] * inv * inv) * inv);
  }
  for (int p = 0; p < packed_size3(n); ++p) {
    const auto [a, b, c] = kTables.triples[p];
    const double delta_terms = (a == b ? y[c] : 0.0) + (a == c ? y[b] : 0.0) + (b == c ? y[a] : 0.0);
    j.set_third(a, b, c, -delta_terms * inv3 + 3.0 * y[a] * y[b] * y[c] * inv5);
  }
  return j;
}

}  // namespace graphmass::jets
