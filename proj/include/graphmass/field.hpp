#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "graphmass/expr.hpp"
#include "graphmass/jet.hpp"

namespace graphmass {

using jets::Jet3;

/// A closed ball {|x - center| <= radius}, used to carve horizons out of a domain.
struct Ball {
  std::vector<double> center;
  double radius = 0.0;

  bool contains(std::span<const double> x) const;
};

/// A smooth function on a region of R^n that can report third-order jets.
///
/// Implementations are immutable after construction; all queries are
/// reentrant so quadrature can evaluate them from many threads.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual int dim() const = 0;
  virtual Jet3 jet(std::span<const double> x) const = 0;
  virtual double value(std::span<const double> x) const { return jet(x).value(); }
  /// Derivative parts of the jet. The value slot may be left at zero when it
  /// is expensive to compute; geometry only reads derivatives.
  virtual Jet3 derivatives(std::span<const double> x) const { return jet(x); }
  virtual bool in_domain(std::span<const double> x) const;
  virtual std::string describe() const = 0;

  /// Regions removed from R^n (horizon interiors).
  const std::vector<Ball>& excluded() const noexcept { return excluded_; }
  void set_excluded(std::vector<Ball> balls) { excluded_ = std::move(balls); }

 private:
  std::vector<Ball> excluded_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

/// f given by a parsed expression with bound parameters.
class ExprField final : public ScalarField {
 public:
  ExprField(jets::Expr expr, jets::ParamBindings params);

  int dim() const override { return expr_.dim(); }
  Jet3 jet(std::span<const double> x) const override { return compiled_.jet(x); }
  double value(std::span<const double> x) const override { return compiled_.value(x); }
  bool in_domain(std::span<const double> x) const override;
  std::string describe() const override { return jets::to_string(expr_); }

  const jets::Expr& expr() const noexcept { return expr_; }

 private:
  jets::Expr expr_;
  jets::ParamBindings params_;
  jets::CompiledExpr compiled_;
};

}  // namespace graphmass
