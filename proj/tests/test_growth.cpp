#include <cmath>

#include "doctest.h"
#include "frontier/errors.hpp"
#include "frontier/expression.hpp"
#include "frontier/growth.hpp"

using namespace frontier;

TEST_CASE("logistic values") {
  const Growth f = Growth::logistic(1, 1);
  CHECK(f.eval(0, 0, 0) == 0.0);
  CHECK(f.eval(0, 0, 1) == 0.0);
  CHECK(f.eval(0, 0, 2) == -2.0);
  CHECK_THROWS_AS(f.eval(0, 0, -0.1), DomainError);
}

TEST_CASE("logistic derived constants are exact") {
  auto c = Growth::logistic(1, 1).derived_constants();
  CHECK(c.fprime0 == 1.0);
  CHECK(c.K0 == 1.0);
  CHECK(c.v0 == 1.0);
  c = Growth::logistic(2, 1).derived_constants();
  CHECK(c.fprime0 == 2.0);
  CHECK(c.K0 == 2.0);
  CHECK(c.v0 == 2.0);
}

TEST_CASE("general autonomous law: f'(0) and v0 numerically") {
  const Growth f = Growth::autonomous([](double u) { return u * (1 - u); }, 3.0, 1.0, true);
  const auto c = f.derived_constants();
  CHECK(std::abs(c.v0 - 1.0) <= 1e-10);
  CHECK(std::abs(c.fprime0 - 1.0) <= 1e-8);

  // Rejecting negative arguments forces the one-sided stencil.
  const Growth g = Growth::autonomous(
      [](double u) {
        if (u < 0) throw DomainError("negative");
        return 2 * u - 3 * u * u;
      },
      5.0, 1.0, true);
  const auto cg = g.derived_constants();
  CHECK(std::abs(cg.fprime0 - 2.0) <= 1e-8);
  CHECK(std::abs(cg.v0 - 2.0 / 3.0) <= 1e-10);
  CHECK(std::abs(g.eval(0, 0, cg.v0)) <= 1e-10);
}

TEST_CASE("logistic stays below its linearization") {
  const Growth f = Growth::logistic(1.3, 0.7);
  for (double u = 0; u <= 5; u += 0.01) CHECK(f.eval(0, 0, u) <= 1.3 * u);
}

TEST_CASE("hypothesis spot checks reject bad laws") {
  // f(0) != 0
  CHECK_THROWS_AS(Growth::autonomous([](double u) { return 1 - u; }, 1, 1, false), DomainError);
  // not negative above K0
  CHECK_THROWS_AS(Growth::autonomous([](double u) { return u * (2 - u); }, 3, 1, false),
                  DomainError);
  // bistable: f(u)/u not decreasing
  CHECK_THROWS_AS(
      Growth::autonomous([](double u) { return u * (u - 0.2) * (1 - u); }, 3, 1, true),
      DomainError);
  CHECK_THROWS_AS(Growth::logistic(-1, 1), DomainError);
  // non-KPP laws have no derived constants
  const Growth ok = Growth::autonomous([](double u) { return u * (u - 0.2) * (1 - u); }, 3, 1,
                                       false);
  CHECK_THROWS_AS(ok.derived_constants(), DomainError);
}

TEST_CASE("growth expressions") {
  const Growth f = Growth::from_expression("u*(1-u)", 3, 1, true);
  CHECK(f.family() == Growth::Family::GeneralAutonomous);
  CHECK(f.eval(0, 0, 0.5) == doctest::Approx(0.25));
  const Growth g = Growth::from_expression("u*(1 + 0.5*sin(t) - u)", 4, 1.5, false);
  CHECK(g.family() == Growth::Family::SpaceTime);
  CHECK_THROWS_AS(Growth::from_expression("u*(1+x-u)", 3, 1, true), DomainError);
}

TEST_CASE("expression parser") {
  CHECK(Expression::parse("2^3^2").eval(0, 0, 0) == 512.0);
  CHECK(Expression::parse("-u^2").eval(0, 0, 3) == -9.0);
  CHECK(Expression::parse("exp(0) + sin(0)*x - t/2").eval(4, 1, 0) == doctest::Approx(-1.0));
  CHECK(Expression::parse("1 - 2 - 3").eval(0, 0, 0) == -4.0);
  CHECK(Expression::parse("8/4/2").eval(0, 0, 0) == 1.0);
  CHECK_THROWS_AS(Expression::parse("u*(1-u"), DomainError);
  CHECK_THROWS_AS(Expression::parse("log(u)"), DomainError);
  CHECK_THROWS_AS(Expression::parse("u u"), DomainError);
}
