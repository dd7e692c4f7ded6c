#pragma once

// Third-order truncated Taylor jets in up to kMaxDim variables.
//
// A Jet3 holds the value, gradient, Hessian and third-derivative tensor of a
// scalar function at one point. Symmetric tensors are stored packed (only
// i <= j <= k is kept), so symmetry holds by construction.

#include <array>
#include <cstddef>
#include <span>

namespace graphmass::jets {

inline constexpr int kMaxDim = 8;

constexpr int packed_size2(int n) { return n * (n + 1) / 2; }
constexpr int packed_size3(int n) { return n * (n + 1) * (n + 2) / 6; }

/// Packed index of the unordered pair {i, j}; independent of the dimension.
constexpr int index2(int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  return j * (j + 1) / 2 + i;
}

/// Packed index of the unordered triple {i, j, k}; independent of the dimension.
constexpr int index3(int i, int j, int k) {
  if (i > j) { const int t = i; i = j; j = t; }
  if (j > k) { const int t = j; j = k; k = t; }
  if (i > j) { const int t = i; i = j; j = t; }
  return k * (k + 1) * (k + 2) / 6 + j * (j + 1) / 2 + i;
}

class Jet3 {
 public:
  Jet3() = default;
  explicit Jet3(int dim, double value = 0.0);

  static Jet3 constant(int dim, double c) { return Jet3(dim, c); }
  /// The coordinate function x_i evaluated at `x_i`.
  static Jet3 variable(int dim, int i, double x_i);

  int dim() const noexcept { return dim_; }

  double value() const noexcept { return value_; }
  double grad(int i) const noexcept { return grad_[i]; }
  double hess(int i, int j) const noexcept { return hess_[index2(i, j)]; }
  double third(int i, int j, int k) const noexcept { return third_[index3(i, j, k)]; }

  void set_value(double v) noexcept { value_ = v; }
  void set_grad(int i, double v) noexcept { grad_[i] = v; }
  void set_hess(int i, int j, double v) noexcept { hess_[index2(i, j)] = v; }
  void set_third(int i, int j, int k, double v) noexcept { third_[index3(i, j, k)] = v; }

  std::span<const double> grad_span() const noexcept { return {grad_.data(), static_cast<std::size_t>(dim_)}; }
  std::span<const double> hess_packed() const noexcept {
    return {hess_.data(), static_cast<std::size_t>(packed_size2(dim_))};
  }
  std::span<const double> third_packed() const noexcept {
    return {third_.data(), static_cast<std::size_t>(packed_size3(dim_))};
  }

  /// True when every stored entry is finite.
  bool finite() const noexcept;

  Jet3& operator+=(const Jet3& o) noexcept;
  Jet3& operator-=(const Jet3& o) noexcept;
  Jet3& operator*=(double s) noexcept;
  Jet3& operator+=(double s) noexcept {
    value_ += s;
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) noexcept { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) noexcept { return a -= b; }
  friend Jet3 operator*(Jet3 a, double s) noexcept { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) noexcept { return a *= s; }
  friend Jet3 operator+(Jet3 a, double s) noexcept { return a += s; }
  friend Jet3 operator+(double s, Jet3 a) noexcept { return a += s; }
  friend Jet3 operator-(Jet3 a, double s) noexcept { return a += -s; }
  friend Jet3 operator-(double s, Jet3 a) noexcept { return (a *= -1.0) += s; }
  friend Jet3 operator-(Jet3 a) noexcept { return a *= -1.0; }
  friend Jet3 operator*(const Jet3& a, const Jet3& b) noexcept;
  /// Throws DomainError when b's value is zero.
  friend Jet3 operator/(const Jet3& a, const Jet3& b);

 private:
  int dim_ = 0;
  double value_ = 0.0;
  // Only the first dim_ / packed_size*(dim_) entries are meaningful.
  std::array<double, kMaxDim> grad_;
  std::array<double, packed_size2(kMaxDim)> hess_;
  std::array<double, packed_size3(kMaxDim)> third_;
};

/// phi(u) for a scalar function phi given its first three derivatives at u.value().
Jet3 compose(const Jet3& u, double phi, double d1, double d2, double d3) noexcept;

// Elementary functions. Each throws DomainError outside its real domain.
Jet3 sqrt(const Jet3& u);
Jet3 exp(const Jet3& u);
Jet3 log(const Jet3& u);
Jet3 sin(const Jet3& u);
Jet3 cos(const Jet3& u);
Jet3 reciprocal(const Jet3& u);
/// u^c for a constant exponent. Negative bases are allowed for integer c.
Jet3 pow(const Jet3& u, double c);

/// C-infinity step equal to 1 for t <= 0 and 0 for t >= 1, built from
/// psi(t) = exp(-1/t) as psi(1 - t) / (psi(1 - t) + psi(t)).
double smooth_step(double t);
Jet3 smooth_step(const Jet3& t);

/// Euclidean norm |x - center| as a jet. Throws DomainError at the center.
Jet3 radius(std::span<const double> x, std::span<const double> center = {});

}  // namespace graphmass::jets
