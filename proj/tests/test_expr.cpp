#include <cmath>

#include "catch_amalgamated.hpp"
#include "folab/expr.hpp"

using namespace folab;
using Catch::Approx;

TEST_CASE("arithmetic and precedence") {
  CHECK(Expr("1 + 2 * 3")(0.0) == 7.0);
  CHECK(Expr("(1 + 2) * 3")(0.0) == 9.0);
  CHECK(Expr("2 ^ 3 ^ 2")(0.0) == 512.0);
  CHECK(Expr("-2 ^ 2")(0.0) == -4.0);
  CHECK(Expr("8 / 4 / 2")(0.0) == 1.0);
  CHECK(Expr("1 - 2 - 3")(0.0) == -4.0);
  CHECK(Expr("1.5e2")(0.0) == 150.0);
  CHECK(Expr("2*pi")(0.0) == Approx(2.0 * pi).epsilon(1e-15));
}

TEST_CASE("coordinates and functions") {
  const Expr V("1 + x^2");
  CHECK(V(3.0) == 10.0);
  CHECK(V(-0.5) == 1.25);
  CHECK(Expr("x1 * x2")(2.0, 3.0) == 6.0);
  CHECK(Expr("exp(-x^2)")(1.5) == std::exp(-2.25));
  CHECK(Expr("gaussian(x / 2)")(1.0) == std::exp(-0.25));
  CHECK(Expr(" 3*gaussian( x1 ) + x2 ")(0.0, 1.0) == 4.0);
}

TEST_CASE("sampling on the grid") {
  const auto dom = BoxDomain::interval(-8.0, 8.0, 64);
  const auto g = Expr("1 + x^2").sample(dom);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = dom.point(i)[0];
    CHECK(g[i] == 1.0 + x * x);
  }
  CHECK_THROWS_AS(Expr("exp(1000 * x^2)").sample(dom), expr_error);
  CHECK_NOTHROW(Expr("1 / (1 + x^2)").sample(dom));
}

TEST_CASE("rejects anything outside the grammar") {
  for (const char* bad : {"", "1 +", "sin(x)", "x y", "2 ** 3", "exp x", "(1 + 2", "x3", "1)", "system(1)", "$"})
    CHECK_THROWS_AS(Expr(bad), expr_error);
  CHECK_THROWS_WITH(Expr("cos(x)"), Catch::Matchers::ContainsSubstring("unknown name 'cos'"));
}
