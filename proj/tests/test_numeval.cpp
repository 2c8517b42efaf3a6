#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncx/convexity.hpp"
#include "ncx/numeval.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace ncx;
using ncxtest::P;

static const VarCounts kAX{1, 1, 0};

namespace {

EvalPoint randomPoint(VarCounts c, int n, std::uint64_t seed, bool withH = false) {
  EvalPoint pt;
  pt.A = sampleTuple(DomainSpec::all(), c.a, n, mixSeed(seed, 1));
  pt.X = sampleTuple(DomainSpec::all(), c.x, n, mixSeed(seed, 2));
  if (withH) pt.H = sampleTuple(DomainSpec::all(), c.h, n, mixSeed(seed, 3));
  return pt;
}

}  // namespace

TEST_CASE("x1^2 at an involution matrix is the identity") {
  EvalPoint pt;
  pt.A = MatrixTuple::zero(1, 2);
  pt.X.n = 2;
  Eigen::MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  pt.X.mats.push_back(x);
  Eigen::MatrixXd v = evalPoly(P("x1^2", kAX), pt);
  CHECK(maxAbs(v - Eigen::MatrixXd::Identity(2, 2)) < 1e-14);
}

TEST_CASE("commutator of equal matrices vanishes") {
  MatrixTuple t = sampleTuple(DomainSpec::all(), 1, 3, 77);
  EvalPoint pt;
  pt.A = t;
  pt.X = t;
  CHECK(maxAbs(evalPoly(P("a1*x1 - x1*a1", kAX), pt)) < 1e-12);
}

TEST_CASE("a1*x1^3*a1 matches the direct chain oracle") {
  EvalPoint pt = randomPoint(kAX, 2, 5);
  NCPolynomial p = P("a1*x1^3*a1", kAX);
  CHECK(maxAbs(evalPoly(p, pt) - ncxtest::evalByChain(p, pt)) <= 1e-12);
}

TEST_CASE("missing direction tuple raises") {
  VarCounts c{0, 1, 1};
  EvalPoint pt;
  pt.X = sampleTuple(DomainSpec::all(), 1, 2, 9);
  CHECK_THROWS_AS(evalPoly(P("h1*x1*h1", c), pt), std::invalid_argument);
}

TEST_CASE("dimension mismatch raises") {
  EvalPoint pt;
  pt.A = sampleTuple(DomainSpec::all(), 1, 2, 1);
  pt.X = sampleTuple(DomainSpec::all(), 1, 3, 2);
  CHECK_THROWS_AS(pt.validate(), std::invalid_argument);
}

TEST_CASE("morphism and symmetry properties of evaluation") {
  std::mt19937_64 rng(500);
  VarCounts c{2, 2, 0};
  for (int i = 0; i < 20; ++i) {
    NCPolynomial p = ncxtest::randomPoly(rng, c, 2, 3, 3);
    NCPolynomial q = ncxtest::randomPoly(rng, c, 2, 3, 3);
    int n = 1 + i % 5;
    EvalPoint pt = randomPoint(c, n, 600 + i);
    Evaluator ev(pt);
    Eigen::MatrixXd pv = ev.eval(p), qv = ev.eval(q);
    double scale = std::max(1.0, std::max(maxAbs(pv * qv), maxAbs(pv + qv)));
    CHECK(maxAbs(ev.eval(p * q) - pv * qv) <= 1e-10 * scale);
    CHECK(maxAbs(ev.eval(p + q) - (pv + qv)) <= 1e-10 * scale);
    CHECK(maxAbs(ev.eval(p.transposed()) - pv.transpose()) <= 1e-10 * scale);

    NCPolynomial s = p + p.transposed();
    Eigen::MatrixXd sv = ev.eval(s);
    CHECK(maxAbs(sv - sv.transpose()) <= 1e-10 * std::max(1.0, maxAbs(sv)));
  }
}

TEST_CASE("eval_matrixpoly blocks agree with entrywise eval") {
  std::mt19937_64 rng(700);
  VarCounts c{1, 1, 0};
  MatrixPoly m(2, 3, c);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) m.at(i, j) = ncxtest::randomPoly(rng, c, 2, 2, 2);
  EvalPoint pt = randomPoint(c, 3, 11);
  Eigen::MatrixXd big = evalMatrixPoly(m, pt);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(maxAbs(big.block(i * 3, j * 3, 3, 3) - evalPoly(m.at(i, j), pt)) <= 1e-12);
}

TEST_CASE("constant matrix evaluates to a block tensor with the identity") {
  VarCounts c{1, 1, 0};
  MatrixPoly m(2, 2, c);
  m.at(0, 0) = NCPolynomial::constant(3, c);
  m.at(0, 1) = NCPolynomial::constant(-1, c);
  m.at(1, 0) = NCPolynomial::constant(-1, c);
  m.at(1, 1) = NCPolynomial::constant(2, c);
  int n = 3;
  EvalPoint pt = randomPoint(c, n, 21);
  Eigen::MatrixXd big = evalMatrixPoly(m, pt);
  Eigen::MatrixXd expect(2 * n, 2 * n);
  expect << 3 * Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n),
      -Eigen::MatrixXd::Identity(n, n), 2 * Eigen::MatrixXd::Identity(n, n);
  CHECK(maxAbs(big - expect) <= 1e-14);
}

TEST_CASE("direct sums: diagonal law and zero-summand identity") {
  VarCounts c{1, 1, 0};
  NCPolynomial p = P("a1*x1*a1 + x1^2", c);
  EvalPoint p1 = randomPoint(c, 2, 31);
  EvalPoint p2 = randomPoint(c, 3, 32);
  EvalPoint sum = directSum(p1, p2);
  Eigen::MatrixXd v = evalPoly(p, sum);
  Eigen::MatrixXd v1 = evalPoly(p, p1), v2 = evalPoly(p, p2);
  CHECK(maxAbs(v.topLeftCorner(2, 2) - v1) <= 1e-12);
  CHECK(maxAbs(v.bottomRightCorner(3, 3) - v2) <= 1e-12);
  CHECK(maxAbs(v.topRightCorner(2, 3)) <= 1e-12);

  // norm-ball membership is preserved under direct sums
  DomainSpec ball = DomainSpec::normBall(1.0);
  MatrixTuple t1 = sampleTuple(ball, 2, 2, 41);
  MatrixTuple t2 = sampleTuple(ball, 2, 3, 42);
  CHECK(ball.contains(t1));
  CHECK(ball.contains(t2));
  CHECK(ball.contains(directSum(t1, t2)));
}

TEST_CASE("tensor with the identity: commutation and eigenvalue multiplicity") {
  VarCounts c{1, 1, 0};
  NCPolynomial p = P("x1*a1*x1 + a1", c);
  EvalPoint pt = randomPoint(c, 2, 51);
  CHECK_THROWS_AS(tensorIdentity(pt, 0), std::invalid_argument);

  EvalPoint same = tensorIdentity(pt, 1);
  CHECK(maxAbs(evalPoly(p, same) - evalPoly(p, pt)) <= 1e-14);

  std::uint32_t ell = 3;
  EvalPoint big = tensorIdentity(pt, ell);
  Eigen::MatrixXd small = evalPoly(p, pt);
  Eigen::MatrixXd large = evalPoly(p, big);

  // exact commutation: eval(p, pt (x) I) = eval(p, pt) (x) I
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(large.rows(), large.cols());
  for (int i = 0; i < small.rows(); ++i)
    for (int j = 0; j < small.cols(); ++j)
      for (std::uint32_t k = 0; k < ell; ++k) kron(i * ell + k, j * ell + k) = small(i, j);
  CHECK(maxAbs(large - kron) <= 1e-12 * std::max(1.0, maxAbs(small)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esS(small), esL(large);
  // every eigenvalue of the small evaluation appears ell times
  for (int i = 0; i < small.rows(); ++i) {
    double lam = esS.eigenvalues()(i);
    int count = 0;
    for (int j = 0; j < large.rows(); ++j)
      if (std::abs(esL.eigenvalues()(j) - lam) < 1e-8) ++count;
    CHECK(count >= static_cast<int>(ell));
  }
}

TEST_CASE("sampling: membership on 1000 draws, determinism, unconstrained kind") {
  DomainSpec ball = DomainSpec::normBall(0.8);
  for (int i = 0; i < 1000; ++i) {
    MatrixTuple t = sampleTuple(ball, 2, 3, 10000 + i);
    CHECK(ball.contains(t));
  }
  MatrixTuple a = sampleTuple(DomainSpec::all(), 2, 4, 777);
  MatrixTuple b = sampleTuple(DomainSpec::all(), 2, 4, 777);
  for (int j = 0; j < 2; ++j) CHECK(maxAbs(a.mats[j] - b.mats[j]) == 0.0);

  // kind=all imposes no predicate
  CHECK(DomainSpec::all().contains(a));
  a.validate();
}

TEST_CASE("epsilon neighborhood sampling") {
  DomainSpec nb = DomainSpec::epsilonNeighborhood(0.25);
  for (int i = 0; i < 100; ++i) {
    MatrixTuple t = sampleTuple(nb, 2, 2, 20000 + i);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& m : t.mats) s += m * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().maxCoeff() < 0.25);
  }
}

TEST_CASE("faithfulness probe finds nonzero evaluations at dimension N(g,d)") {
  std::mt19937_64 rng(808);
  VarCounts c{0, 2, 0};
  NCPolynomial p = ncxtest::randomPoly(rng, c, 0, 3, 3);
  REQUIRE(!p.isZero());
  int n = static_cast<int>(ngd(2, p.degree(VarClass::X)));
  FaithfulnessProbe probe = faithfulnessProbe(p, n, 20, 909);
  CHECK(probe.nonzeroFound);
}

TEST_CASE("matrix tuple JSON round trip and validation") {
  MatrixTuple t = sampleTuple(DomainSpec::all(), 2, 3, 99);
  MatrixTuple back = matrixTupleFromJson(matrixTupleToJson(t));
  CHECK(back.n == t.n);
  for (int j = 0; j < 2; ++j) CHECK(maxAbs(back.mats[j] - t.mats[j]) <= 1e-15);

  CHECK_THROWS_AS(matrixTupleFromJson("{\"n\":2,\"mats\":[[1,2,3]]}"), std::invalid_argument);
  // asymmetric matrix rejected
  CHECK_THROWS_AS(matrixTupleFromJson("{\"n\":2,\"mats\":[[0,1,0,0]]}"), std::invalid_argument);
}
