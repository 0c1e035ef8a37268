#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "dtnlab/errors.hpp"
#include "dtnlab/expr.hpp"
#include "oracles.hpp"

using namespace dtnlab;

namespace {

double ev(const char* text, double x = 0.0, double y = 0.0) { return parse_expr(text).eval(x, y); }

std::size_t syntax_offset(const char* text) {
  try {
    parse_expr(text);
  } catch (const SyntaxError& e) {
    return e.offset();
  }
  return std::size_t(-1);
}

}  // namespace

TEST_CASE("literal and basic evaluation") {
  const Expr one = parse_expr("1");
  CHECK(one.root().kind == Expr::Kind::Number);
  CHECK(one.eval(7, 8) == 1.0);
  CHECK(one.is_constant());

  CHECK(ev("1 + 0.5*sin(pi*x)*y", 0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(ev("x*y", 3, 4) == 12.0);
  CHECK(ev("min(x, y) + abs(-2)", 1, 5) == 3.0);
  CHECK_FALSE(parse_expr("x*y").is_constant());
}

TEST_CASE("precedence and associativity") {
  CHECK(ev("2^3^2") == 512.0);
  CHECK(ev("-2^2") == -4.0);
  CHECK(ev("(-2)^2") == 4.0);
  CHECK(ev("2^-1") == 0.5);
  CHECK(ev("1 - 2 - 3") == -4.0);
  CHECK(ev("8 / 4 / 2") == 1.0);
  CHECK(ev("1 + 2*3") == 7.0);
  CHECK(ev("--3") == 3.0);
  CHECK(ev("2*-3") == -6.0);
  CHECK(ev("1.5e2 + .5") == 150.5);
  CHECK(ev("  max ( 1 ,\t2 )\n") == 2.0);
  CHECK(ev("exp(0) + cos(0) + sqrt(16)") == 6.0);
}

TEST_CASE("domain errors carry the node offset") {
  const Expr e = parse_expr("1/x");
  try {
    e.eval(0, 0);
    FAIL("expected a domain error");
  } catch (const EvalDomainError& err) {
    CHECK(err.offset() == 1);
  }
  CHECK_THROWS_AS(ev("sqrt(x)", -1, 0), EvalDomainError);
  CHECK_THROWS_AS(ev("exp(1000)"), EvalDomainError);
  CHECK(ev("sqrt(x)", 0, 0) == 0.0);
}

TEST_CASE("syntax errors") {
  CHECK(syntax_offset("1 +") == 3);
  CHECK(syntax_offset("(1 + 2") == 6);
  CHECK(syntax_offset("1 $ 2") == 2);
  CHECK(syntax_offset("") == 0);
  CHECK(syntax_offset("1 2") == 2);
  CHECK_THROWS_AS(parse_expr("z + 1"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("foo(1)"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("sin(1, 2)"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("min(1)"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("pi(1)"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("sin"), SyntaxError);
}

TEST_CASE("function table") {
  CHECK(std::strcmp(func_name(Expr::Func::Sqrt), "sqrt") == 0);
  CHECK(func_arity(Expr::Func::Min) == 2);
  CHECK(func_arity(Expr::Func::Abs) == 1);
}

TEST_CASE("print/parse round trip and reference agreement") {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  int agreed_errors = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = oracle::random_expression(rng, 4);
    const Expr e = parse_expr(text);
    const Expr again = parse_expr(e.to_string());
    REQUIRE_MESSAGE(e == again, text);
    CHECK(again.to_string() == e.to_string());

    const double x = coord(rng), y = coord(rng);
    const std::optional<double> ref = oracle::reference_eval(text, x, y);
    if (!ref) {
      CHECK_THROWS_AS(e.eval(x, y), EvalDomainError);
      ++agreed_errors;
      continue;
    }
    const double got = e.eval(x, y);
    // bit equality
    CHECK_MESSAGE(std::memcmp(&got, &*ref, sizeof got) == 0, text);
    const double got2 = again.eval(x, y);
    CHECK(std::memcmp(&got, &got2, sizeof got) == 0);
  }
  MESSAGE("domain errors agreed: " << agreed_errors);
}
