#include "dtnlab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include "dtnlab/errors.hpp"

namespace dtnlab {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

constexpr std::array<std::pair<const char*, Expr::Func>, 7> kFunctions{{
    {"sin", Expr::Func::Sin},
    {"cos", Expr::Func::Cos},
    {"exp", Expr::Func::Exp},
    {"sqrt", Expr::Func::Sqrt},
    {"abs", Expr::Func::Abs},
    {"min", Expr::Func::Min},
    {"max", Expr::Func::Max},
}};

NodePtr make_node(Expr::Kind kind, std::size_t offset, std::vector<NodePtr> args = {},
                  double value = 0.0, Expr::Func func = Expr::Func::Sin) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->offset = offset;
  n->args = std::move(args);
  n->value = value;
  n->func = func;
  return n;
}

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    auto root = expr();
    skip_ws();
    if (pos_ != src_.size()) throw SyntaxError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
    return root;
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_node(Expr::Kind::Add, at, {lhs, term()});
      } else if (accept('-')) {
        lhs = make_node(Expr::Kind::Sub, at, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_node(Expr::Kind::Mul, at, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make_node(Expr::Kind::Div, at, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) return make_node(Expr::Kind::Neg, at, {unary()});
    return power();
  }

  NodePtr power() {
    auto base = atom();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) return make_node(Expr::Kind::Pow, at, {base, unary()});
    return base;
  }

  NodePtr atom() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (accept('(')) {
      auto inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      const std::string name(src_.substr(pos_, end - pos_));
      pos_ = end;
      if (name == "x") return make_node(Expr::Kind::VarX, at);
      if (name == "y") return make_node(Expr::Kind::VarY, at);
      if (name == "pi") return make_node(Expr::Kind::Number, at, {}, std::numbers::pi);
      for (const auto& [fname, f] : kFunctions) {
        if (name != fname) continue;
        expect('(');
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        expect(')');
        if (static_cast<int>(args.size()) != func_arity(f)) {
          throw SyntaxError("function '" + name + "' takes " + std::to_string(func_arity(f)) +
                                " argument(s), got " + std::to_string(args.size()),
                            at);
        }
        return make_node(Expr::Kind::Call, at, std::move(args), 0.0, f);
      }
      throw SyntaxError("unknown identifier '" + name + "'", at);
    }
    throw SyntaxError("unexpected character '" + std::string(1, c) + "'", at);
  }

  NodePtr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
        end = e;
        digits();
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + end, value);
    if (ec != std::errc() || ptr != src_.data() + end) throw SyntaxError("malformed number", at);
    pos_ = end;
    return make_node(Expr::Kind::Number, at, {}, value);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double checked(double v, const Expr::Node& n, const char* what) {
  if (!std::isfinite(v)) throw EvalDomainError(what, n.offset);
  return v;
}

double eval_node(const Expr::Node& n, double x, double y) {
  switch (n.kind) {
    case Expr::Kind::Number: return n.value;
    case Expr::Kind::VarX: return x;
    case Expr::Kind::VarY: return y;
    case Expr::Kind::Neg: return -eval_node(*n.args[0], x, y);
    case Expr::Kind::Add:
      return checked(eval_node(*n.args[0], x, y) + eval_node(*n.args[1], x, y), n, "overflow in '+'");
    case Expr::Kind::Sub:
      return checked(eval_node(*n.args[0], x, y) - eval_node(*n.args[1], x, y), n, "overflow in '-'");
    case Expr::Kind::Mul:
      return checked(eval_node(*n.args[0], x, y) * eval_node(*n.args[1], x, y), n, "overflow in '*'");
    case Expr::Kind::Div: {
      const double num = eval_node(*n.args[0], x, y);
      const double den = eval_node(*n.args[1], x, y);
      if (den == 0.0) throw EvalDomainError("division by zero", n.offset);
      return checked(num / den, n, "overflow in '/'");
    }
    case Expr::Kind::Pow:
      return checked(std::pow(eval_node(*n.args[0], x, y), eval_node(*n.args[1], x, y)), n,
                     "non-finite power");
    case Expr::Kind::Call: {
      const double a = eval_node(*n.args[0], x, y);
      switch (n.func) {
        case Expr::Func::Sin: return std::sin(a);
        case Expr::Func::Cos: return std::cos(a);
        case Expr::Func::Exp: return checked(std::exp(a), n, "overflow in exp");
        case Expr::Func::Sqrt:
          if (a < 0.0) throw EvalDomainError("sqrt of a negative number", n.offset);
          return std::sqrt(a);
        case Expr::Func::Abs: return std::abs(a);
        case Expr::Func::Min: return std::min(a, eval_node(*n.args[1], x, y));
        case Expr::Func::Max: return std::max(a, eval_node(*n.args[1], x, y));
      }
    }
  }
  return 0.0;
}

void print_node(const Expr::Node& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print_node(*n.args[0], out);
    out += op;
    print_node(*n.args[1], out);
    out += ')';
  };
  switch (n.kind) {
    case Expr::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Expr::Kind::VarX: out += 'x'; return;
    case Expr::Kind::VarY: out += 'y'; return;
    case Expr::Kind::Neg:
      out += "(-";
      print_node(*n.args[0], out);
      out += ')';
      return;
    case Expr::Kind::Add: binary(" + "); return;
    case Expr::Kind::Sub: binary(" - "); return;
    case Expr::Kind::Mul: binary(" * "); return;
    case Expr::Kind::Div: binary(" / "); return;
    case Expr::Kind::Pow: binary("^"); return;
    case Expr::Kind::Call:
      out += func_name(n.func);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

bool same_tree(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == Expr::Kind::Number && a.value != b.value) return false;
  if (a.kind == Expr::Kind::Call && a.func != b.func) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool has_variable(const Expr::Node& n) {
  if (n.kind == Expr::Kind::VarX || n.kind == Expr::Kind::VarY) return true;
  for (const auto& a : n.args) {
    if (has_variable(*a)) return true;
  }
  return false;
}

}  // namespace

const char* func_name(Expr::Func f) {
  for (const auto& [name, g] : kFunctions) {
    if (g == f) return name;
  }
  return "?";
}

int func_arity(Expr::Func f) { return (f == Expr::Func::Min || f == Expr::Func::Max) ? 2 : 1; }

Expr::Expr() : root_(make_node(Kind::Number, 0)) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expr Expr::constant(double value) { return Expr(make_node(Kind::Number, 0, {}, value)); }

double Expr::eval(double x, double y) const { return eval_node(*root_, x, y); }

std::string Expr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool Expr::is_constant() const { return !has_variable(*root_); }

bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

Expr parse_expr(std::string_view source) { return Expr(Parser(source).parse()); }

double eval_expr(const Expr& e, double x, double y) { return e.eval(x, y); }

}  // namespace dtnlab
