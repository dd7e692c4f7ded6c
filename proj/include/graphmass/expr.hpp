#pragma once

// Expression language for user-defined graph functions f : R^n -> R.
//
// Grammar (whitespace insignificant):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          exponent must fold to a number
//   primary := number | 'x'<index> | 'r' | parameter
//            | func '(' expr ')' | '(' expr ')'
//   func    := 'sqrt' | 'exp' | 'log' | 'sin' | 'cos'
//   number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//
// `r` is |x|. Variables are 1-based in the text (x1..xn).

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphmass/jet.hpp"

namespace graphmass::jets {

enum class NodeKind { Constant, Variable, Radius, Parameter, Neg, Sqrt, Exp, Log, Sin, Cos, Add, Sub, Mul, Div, Pow };

struct Node {
  NodeKind kind = NodeKind::Constant;
  double number = 0.0;  // Constant value, or the exponent of Pow
  int index = 0;        // 0-based variable index
  std::string name;     // Parameter name
  std::shared_ptr<const Node> lhs, rhs;
};

using NodePtr = std::shared_ptr<const Node>;

using ParamBindings = std::map<std::string, double, std::less<>>;

/// Immutable parsed expression over x1..xn.
class Expr {
 public:
  Expr(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

  const NodePtr& root() const noexcept { return root_; }
  int dim() const noexcept { return dim_; }
  /// Parameter names referenced by the expression, sorted.
  std::vector<std::string> parameters() const;
  bool uses_radius() const;

 private:
  NodePtr root_;
  int dim_;
};

/// Parses `text` for dimension `dim`. Identifiers other than x1..xn, r and the
/// function names must appear in `parameters`.
Expr parse(std::string_view text, int dim, std::span<const std::string> parameters = {});

/// Fully parenthesised text that parses back to a structurally equal tree.
std::string to_string(const Expr& e);
std::string to_string(const Node& node);

bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Expr& a, const Expr& b) {
  return a.dim() == b.dim() && structurally_equal(*a.root(), *b.root());
}

/// An expression with its parameters bound, flattened to a postfix program.
/// Evaluation is reentrant.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const ParamBindings& params);

  int dim() const noexcept { return dim_; }
  Jet3 jet(std::span<const double> x) const;
  double value(std::span<const double> x) const;

 private:
  struct Instr {
    NodeKind kind;
    double number;
    int index;
    const Node* node;  // for diagnostics
  };
  NodePtr root_;  // keeps `node` pointers alive
  std::vector<Instr> code_;
  int dim_;
  int max_stack_ = 0;
};

/// eval_jet(expr, params, point): exact third-order jet of the expression.
Jet3 eval_jet(const Expr& e, const ParamBindings& params, std::span<const double> x);

}  // namespace graphmass::jets
