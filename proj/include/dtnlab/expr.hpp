#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dtnlab {

// Scalar expression in the variables x and y.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right-associative)
//   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//
// Identifiers: x, y, pi; functions sin, cos, exp, sqrt, abs (one argument)
// and min, max (two arguments). `^` binds tighter than unary minus, so
// -2^2 = -4 and 2^3^2 = 512.
class Expr {
public:
  enum class Kind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sin, Cos, Exp, Sqrt, Abs, Min, Max };

  struct Node {
    Kind kind = Kind::Number;
    double value = 0.0;
    Func func = Func::Sin;
    std::size_t offset = 0;  // byte offset of the node in the source text
    std::vector<std::shared_ptr<const Node>> args;
  };

  Expr();  // the literal 0
  explicit Expr(std::shared_ptr<const Node> root);
  static Expr constant(double value);

  // Throws EvalDomainError on division by zero, sqrt of a negative number or
  // any other non-finite intermediate.
  double eval(double x, double y) const;

  // Canonical text form; parse(to_string()) reproduces the tree exactly.
  std::string to_string() const;

  bool is_constant() const;  // no variables anywhere in the tree
  const Node& root() const { return *root_; }

  friend bool operator==(const Expr& a, const Expr& b);

private:
  std::shared_ptr<const Node> root_;
};

Expr parse_expr(std::string_view source);
double eval_expr(const Expr& e, double x, double y);

const char* func_name(Expr::Func f);
int func_arity(Expr::Func f);

}  // namespace dtnlab
