#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncx/textio.hpp"
#include "testutil.hpp"

using namespace ncx;
using ncxtest::P;

static const VarCounts kAX{1, 1, 0};

TEST_CASE("parses the running examples") {
  NCPolynomial p = P("a1*x1^3*a1", kAX);
  CHECK(p.termCount() == 1);
  CHECK(p.bidegree().x == 3);

  CHECK(P("T(x1*a1)", kAX) == P("a1*x1", kAX));

  NCPolynomial q = P("x1^2*a1*x1 + x1*a1*x1^2", kAX);
  CHECK(q.isSymmetric());
  CHECK(q.termCount() == 2);
}

TEST_CASE("rational coefficients and constants") {
  CHECK(P("1/2*x1 + 1/2*x1", kAX) == P("x1", kAX));
  CHECK(P("3", kAX) == NCPolynomial::constant(3, kAX));
  CHECK(P("2/4", kAX) == NCPolynomial::constant(Rational(1, 2), kAX));
  CHECK(P("x1 - x1", kAX).isZero());
  CHECK(P("-x1 + x1", kAX).isZero());
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_AS(P("x1 + ", kAX), ParseError);
  CHECK_THROWS_AS(P("y1", kAX), ParseError);
  CHECK_THROWS_AS(P("x1 *", kAX), ParseError);
  CHECK_THROWS_AS(P("(x1", kAX), ParseError);
  try {
    P("x1 + @", kAX);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.pos == 5);
  }
}

TEST_CASE("declared counts are enforced") {
  CHECK_THROWS_AS(P("x2", kAX), ParseError);
  CHECK_THROWS_AS(P("a1", VarCounts{0, 1, 0}), ParseError);
}

TEST_CASE("inferCounts picks up max indices") {
  VarCounts c = inferCounts("a2*x1 + x3*h1");
  CHECK(c.a == 2);
  CHECK(c.x == 3);
  CHECK(c.h == 1);
}

TEST_CASE("printing canonical forms") {
  CHECK(printPolynomial(NCPolynomial::zero(kAX)) == "0");
  CHECK(printPolynomial(P("x1^2", kAX)) == "x1^2");
  CHECK(printPolynomial(P("0 - 2*x1", kAX)) == "-2*x1");
  CHECK(printPolynomial(P("x1*a1 + a1*x1", kAX)) == "a1*x1 + x1*a1");
  CHECK(printPolynomial(P("1/2*a1", kAX)) == "1/2*a1");
}

TEST_CASE("round-trip parse(print(p)) = p on random polynomials") {
  std::mt19937_64 rng(2024);
  VarCounts c{2, 2, 1};
  for (int i = 0; i < 1000; ++i) {
    NCPolynomial p = ncxtest::randomPoly(rng, c, 2, 3, 4);
    // sprinkle rational coefficients
    p = Rational(1, 3) * p;
    NCPolynomial back = parsePolynomial(printPolynomial(p), c);
    CHECK(back == p);
  }
}
