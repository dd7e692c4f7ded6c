#include "graphmass/field.hpp"

#include "graphmass/errors.hpp"

namespace graphmass {

bool Ball::contains(std::span<const double> x) const {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - (center.empty() ? 0.0 : center[i]);
    d2 += d * d;
  }
  return d2 <= radius * radius;
}

bool ScalarField::in_domain(std::span<const double> x) const {
  for (const Ball& b : excluded_)
    if (b.contains(x)) return false;
  return true;
}

ExprField::ExprField(jets::Expr expr, jets::ParamBindings params)
    : expr_(std::move(expr)), params_(std::move(params)), compiled_(expr_, params_) {}

bool ExprField::in_domain(std::span<const double> x) const {
  if (!ScalarField::in_domain(x)) return false;
  try {
    (void)compiled_.value(x);
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

}  // namespace graphmass
