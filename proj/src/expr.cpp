#include "graphmass/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "graphmass/errors.hpp"

namespace graphmass::jets {
namespace {

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->number = v;
  return n;
}

NodePtr make_unary(NodeKind k, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  return n;
}

NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool is_unary(NodeKind k) {
  switch (k) {
    case NodeKind::Neg:
    case NodeKind::Sqrt:
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Pow:
      return true;
    default:
      return false;
  }
}

bool is_binary(NodeKind k) {
  return k == NodeKind::Add || k == NodeKind::Sub || k == NodeKind::Mul || k == NodeKind::Div;
}

// Numeric value of a variable-free, parameter-free subtree; nullopt-like via flag.
bool fold_constant(const Node& n, double& out) {
  double a = 0.0, b = 0.0;
  switch (n.kind) {
    case NodeKind::Constant:
      out = n.number;
      return true;
    case NodeKind::Variable:
    case NodeKind::Radius:
    case NodeKind::Parameter:
      return false;
    default:
      break;
  }
  if (!fold_constant(*n.lhs, a)) return false;
  if (n.rhs && !fold_constant(*n.rhs, b)) return false;
  switch (n.kind) {
    case NodeKind::Neg: out = -a; break;
    case NodeKind::Sqrt: out = std::sqrt(a); break;
    case NodeKind::Exp: out = std::exp(a); break;
    case NodeKind::Log: out = std::log(a); break;
    case NodeKind::Sin: out = std::sin(a); break;
    case NodeKind::Cos: out = std::cos(a); break;
    case NodeKind::Pow: out = std::pow(a, n.number); break;
    case NodeKind::Add: out = a + b; break;
    case NodeKind::Sub: out = a - b; break;
    case NodeKind::Mul: out = a * b; break;
    case NodeKind::Div: out = a / b; break;
    default: return false;
  }
  return std::isfinite(out);
}

class Parser {
 public:
  Parser(std::string_view text, int dim, std::span<const std::string> params)
      : text_(text), dim_(dim), params_(params.begin(), params.end()) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(NodeKind::Add, lhs, term());
      else if (accept('-'))
        lhs = make_binary(NodeKind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(NodeKind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make_binary(NodeKind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(NodeKind::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    NodePtr exponent = unary();
    double c = 0.0;
    if (!fold_constant(*exponent, c)) throw ParseError("exponent must be a numeric constant", at);
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Pow;
    n->number = c;
    n->lhs = std::move(base);
    return n;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return make_constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string id(text_.substr(start, pos_ - start));

    static const std::map<std::string, NodeKind, std::less<>> functions = {
        {"sqrt", NodeKind::Sqrt}, {"exp", NodeKind::Exp}, {"log", NodeKind::Log},
        {"sin", NodeKind::Sin},   {"cos", NodeKind::Cos}};
    if (auto it = functions.find(id); it != functions.end()) {
      expect('(');
      NodePtr arg = expr();
      expect(')');
      return make_unary(it->second, arg);
    }
    if (id == "r") {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Radius;
      return n;
    }
    if (params_.count(id)) {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Parameter;
      n->name = id;
      return n;
    }
    if (id.size() > 1 && id[0] == 'x' &&
        std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int idx = 0;
      std::from_chars(id.data() + 1, id.data() + id.size(), idx);
      if (idx < 1 || idx > dim_)
        throw ParseError("variable " + id + " out of range for dimension " + std::to_string(dim_), start);
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Variable;
      n->index = idx - 1;
      return n;
    }
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;
  std::set<std::string, std::less<>> params_;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* function_name(NodeKind k) {
  switch (k) {
    case NodeKind::Sqrt: return "sqrt";
    case NodeKind::Exp: return "exp";
    case NodeKind::Log: return "log";
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    default: return "?";
  }
}

void collect(const Node& n, std::set<std::string>& params, bool& radius) {
  if (n.kind == NodeKind::Parameter) params.insert(n.name);
  if (n.kind == NodeKind::Radius) radius = true;
  if (n.lhs) collect(*n.lhs, params, radius);
  if (n.rhs) collect(*n.rhs, params, radius);
}

}  // namespace

std::vector<std::string> Expr::parameters() const {
  std::set<std::string> params;
  bool radius = false;
  collect(*root_, params, radius);
  return {params.begin(), params.end()};
}

bool Expr::uses_radius() const {
  std::set<std::string> params;
  bool radius = false;
  collect(*root_, params, radius);
  return radius;
}

Expr parse(std::string_view text, int dim, std::span<const std::string> parameters) {
  if (dim < 1 || dim > kMaxDim) throw ParseError("dimension must be in 1.." + std::to_string(kMaxDim), 0);
  Parser p(text, dim, parameters);
  return Expr(p.parse_all(), dim);
}

std::string to_string(const Node& n) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.number < 0 ? "(" + format_number(n.number) + ")" : format_number(n.number);
    case NodeKind::Variable: return "x" + std::to_string(n.index + 1);
    case NodeKind::Radius: return "r";
    case NodeKind::Parameter: return n.name;
    case NodeKind::Neg: return "(-" + to_string(*n.lhs) + ")";
    case NodeKind::Pow: return "(" + to_string(*n.lhs) + "^(" + format_number(n.number) + "))";
    case NodeKind::Add: return "(" + to_string(*n.lhs) + " + " + to_string(*n.rhs) + ")";
    case NodeKind::Sub: return "(" + to_string(*n.lhs) + " - " + to_string(*n.rhs) + ")";
    case NodeKind::Mul: return "(" + to_string(*n.lhs) + " * " + to_string(*n.rhs) + ")";
    case NodeKind::Div: return "(" + to_string(*n.lhs) + " / " + to_string(*n.rhs) + ")";
    default: return std::string(function_name(n.kind)) + "(" + to_string(*n.lhs) + ")";
  }
}

std::string to_string(const Expr& e) { return to_string(*e.root()); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant: return a.number == b.number;
    case NodeKind::Variable: return a.index == b.index;
    case NodeKind::Radius: return true;
    case NodeKind::Parameter: return a.name == b.name;
    case NodeKind::Pow:
      if (a.number != b.number) return false;
      break;
    default: break;
  }
  if (is_unary(a.kind)) return structurally_equal(*a.lhs, *b.lhs);
  return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
}

CompiledExpr::CompiledExpr(const Expr& e, const ParamBindings& params) : root_(e.root()), dim_(e.dim()) {
  int depth = 0;
  std::function<void(const Node&)> emit = [&](const Node& n) {
    if (n.lhs) emit(*n.lhs);
    if (n.rhs) emit(*n.rhs);
    Instr ins{n.kind, n.number, n.index, &n};
    if (n.kind == NodeKind::Parameter) {
      auto it = params.find(n.name);
      if (it == params.end()) throw Error("parameter '" + n.name + "' is not bound");
      ins.kind = NodeKind::Constant;
      ins.number = it->second;
    }
    if (ins.kind == NodeKind::Constant || ins.kind == NodeKind::Variable || ins.kind == NodeKind::Radius) ++depth;
    else if (is_binary(ins.kind)) --depth;
    max_stack_ = std::max(max_stack_, depth);
    code_.push_back(ins);
  };
  emit(*root_);
}

Jet3 CompiledExpr::jet(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error("point dimension does not match expression");
  std::vector<Jet3> stack;
  stack.reserve(static_cast<std::size_t>(max_stack_));
  for (const Instr& ins : code_) {
    try {
      switch (ins.kind) {
        case NodeKind::Constant: stack.push_back(Jet3::constant(dim_, ins.number)); break;
        case NodeKind::Variable: stack.push_back(Jet3::variable(dim_, ins.index, x[ins.index])); break;
        case NodeKind::Radius: stack.push_back(radius(x)); break;
        case NodeKind::Neg: stack.back() = -stack.back(); break;
        case NodeKind::Sqrt: stack.back() = sqrt(stack.back()); break;
        case NodeKind::Exp: stack.back() = exp(stack.back()); break;
        case NodeKind::Log: stack.back() = log(stack.back()); break;
        case NodeKind::Sin: stack.back() = sin(stack.back()); break;
        case NodeKind::Cos: stack.back() = cos(stack.back()); break;
        case NodeKind::Pow: stack.back() = pow(stack.back(), ins.number); break;
        default: {
          Jet3 rhs = stack.back();
          stack.pop_back();
          Jet3& lhs = stack.back();
          switch (ins.kind) {
            case NodeKind::Add: lhs += rhs; break;
            case NodeKind::Sub: lhs -= rhs; break;
            case NodeKind::Mul: lhs = lhs * rhs; break;
            case NodeKind::Div: lhs = lhs / rhs; break;
            default: throw Error("corrupt expression program");
          }
        }
      }
    } catch (const DomainError& err) {
      throw DomainError(std::string(err.what()) + " in " + to_string(*ins.node));
    }
  }
  return stack.back();
}

double CompiledExpr::value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error("point dimension does not match expression");
  std::vector<double> stack;
  stack.reserve(static_cast<std::size_t>(max_stack_));
  auto domain = [](const Instr& ins, const char* what) {
    throw DomainError(std::string(what) + " in " + to_string(*ins.node));
  };
  for (const Instr& ins : code_) {
    switch (ins.kind) {
      case NodeKind::Constant: stack.push_back(ins.number); break;
      case NodeKind::Variable: stack.push_back(x[ins.index]); break;
      case NodeKind::Radius: {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        if (r2 == 0.0) domain(ins, "radial coordinate is singular at the origin");
        stack.push_back(std::sqrt(r2));
        break;
      }
      case NodeKind::Neg: stack.back() = -stack.back(); break;
      case NodeKind::Sqrt:
        if (stack.back() < 0.0) domain(ins, "sqrt of negative argument");
        stack.back() = std::sqrt(stack.back());
        break;
      case NodeKind::Exp: stack.back() = std::exp(stack.back()); break;
      case NodeKind::Log:
        if (stack.back() <= 0.0) domain(ins, "log of non-positive argument");
        stack.back() = std::log(stack.back());
        break;
      case NodeKind::Sin: stack.back() = std::sin(stack.back()); break;
      case NodeKind::Cos: stack.back() = std::cos(stack.back()); break;
      case NodeKind::Pow:
        if (stack.back() < 0.0 && std::floor(ins.number) != ins.number)
          domain(ins, "non-integer power of negative base");
        stack.back() = std::pow(stack.back(), ins.number);
        break;
      default: {
        const double rhs = stack.back();
        stack.pop_back();
        double& lhs = stack.back();
        switch (ins.kind) {
          case NodeKind::Add: lhs += rhs; break;
          case NodeKind::Sub: lhs -= rhs; break;
          case NodeKind::Mul: lhs *= rhs; break;
          case NodeKind::Div:
            if (rhs == 0.0) domain(ins, "division by zero");
            lhs /= rhs;
            break;
          default: throw Error("corrupt expression program");
        }
      }
    }
  }
  return stack.back();
}

Jet3 eval_jet(const Expr& e, const ParamBindings& params, std::span<const double> x) {
  return CompiledExpr(e, params).jet(x);
}

}  // namespace graphmass::jets
