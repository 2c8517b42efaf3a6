// Acceptance suite: one pass/fail line per criterion.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "ncx/calculus.hpp"
#include "ncx/convexity.hpp"
#include "ncx/middlematrix.hpp"
#include "ncx/numeval.hpp"
#include "ncx/textio.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace ncx;
using ncxtest::P;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MatrixPoly grid(const std::vector<std::vector<std::string>>& rows, VarCounts counts) {
  MatrixPoly m(rows.size(), rows[0].size(), counts);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m.at(i, j) = parsePolynomial(rows[i][j], counts);
  return m;
}

const VarCounts kAX{1, 1, 0};
const VarCounts kAXH{1, 1, 1};
const VarCounts kX{0, 1, 0};

// --- criterion 1: golden middle matrices ----------------------------------
void criterion1() {
  auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream detail;

  auto middleOf = [](const char* poly) {
    return middleMatrix(partialHessianX(P(poly, kAX)), BorderMode::Reduced);
  };

  std::vector<std::string> wantBorder{"h1", "h1*a1", "h1*x1", "h1*x1*a1", "h1*a1*x1"};
  MiddleMatrix m1 = middleOf("a1*x1^3*a1");
  MiddleMatrix m2 = middleOf("a1*x1^3 + x1^3*a1");
  MiddleMatrix m3 = middleOf("x1^2*a1*x1 + x1*a1*x1^2");
  for (const MiddleMatrix* m : {&m1, &m2, &m3}) {
    std::vector<std::string> got;
    for (const auto& w : m->border.entries()) got.push_back(printWord(w));
    ok = ok && got == wantBorder;
  }

  ok = ok && m1.Z == grid({{"0", "0", "0", "0", "0"},
                           {"0", "2*x1", "0", "2", "0"},
                           {"0", "0", "0", "0", "0"},
                           {"0", "2", "0", "0", "0"},
                           {"0", "0", "0", "0", "0"}},
                          kAXH);
  ok = ok && m2.Z == grid({{"0", "2*x1", "0", "2", "0"},
                           {"2*x1", "0", "2", "0", "0"},
                           {"0", "2", "0", "0", "0"},
                           {"2", "0", "0", "0", "0"},
                           {"0", "0", "0", "0", "0"}},
                          kAXH);
  ok = ok && m3.Z == grid({{"2*x1*a1 + 2*a1*x1", "0", "2*a1", "0", "2"},
                           {"0", "0", "0", "0", "0"},
                           {"2*a1", "0", "0", "0", "0"},
                           {"0", "0", "0", "0", "0"},
                           {"2", "0", "0", "0", "0"}},
                          kAXH);
  ok = ok && m3.blockView(0, 0) == grid({{"2*x1*a1 + 2*a1*x1", "0"}, {"0", "0"}}, kAXH);
  ok = ok && m3.blockView(0, 1) == grid({{"2*a1", "0", "2"}, {"0", "0", "0"}}, kAXH);
  ok = ok && derivedMatrix(m3).Z == grid({{"0", "0", "2*a1", "0", "2"},
                                          {"0", "0", "0", "0", "0"},
                                          {"2*a1", "0", "0", "0", "0"},
                                          {"0", "0", "0", "0", "0"},
                                          {"2", "0", "0", "0", "0"}},
                                         kAXH);

  double dt = secondsSince(t0);
  ok = ok && dt < 1.0;
  detail << "runtime " << dt << " s";
  report(1, "golden middle matrices of the three displayed examples", ok, detail.str());
}

// --- criterion 2: exact congruence identities ------------------------------
void criterion2() {
  auto t0 = Clock::now();
  bool ok = true;
  int checked = 0;

  auto verify = [&](const NCPolynomial& p) {
    HessianPoly q = partialHessianX(p);
    if (q.q.isZero()) return;
    MiddleMatrix m = middleMatrix(q, BorderMode::Reduced);
    CongruenceData cd = congruence(m);
    MiddleMatrix der = derivedMatrix(m);
    std::size_t n = m.size();
    bool all = (m.Z * cd.A == der.Z) && (cd.B * cd.B == cd.A) &&
               (cd.B * cd.Binv == MatrixPoly::identity(n, m.Z.counts())) &&
               (cd.B.transposed() * m.Z * cd.B == der.Z);
    ok = ok && all;
    ++checked;
  };

  verify(P("x1^2*a1*x1 + x1*a1*x1^2", kAX));

  std::mt19937_64 rng(424242);
  while (checked < 51) {
    std::uint32_t g = 1 + (checked % 2);
    VarCounts c{g, g, 0};
    verify(ncxtest::randomSymmetricPoly(rng, c, 2, 4, 3));
  }

  double dt = secondsSince(t0);
  ok = ok && dt < 30.0;
  std::ostringstream detail;
  detail << checked << " polynomials, runtime " << dt << " s";
  report(2, "exact congruence identities (Z*A=Z(a,0), B^2=A, B*Binv=I, B^T Z B=Z(a,0))", ok,
         detail.str());
}

// --- criterion 3: K golden test --------------------------------------------
void criterion3() {
  MiddleMatrix m = middleMatrix(partialHessianX(P("x1^2*a1*x1 + x1*a1*x1^2", kAX)),
                                BorderMode::Reduced);
  std::vector<MatrixPoly> Ks = kMatrices(m);
  bool ok = Ks.size() == 1;
  if (ok) ok = Ks[0] == grid({{"x1", "0"}, {"0", "0"}, {"x1*a1", "0"}}, kAXH);
  if (ok) {
    MiddleMatrix der = derivedMatrix(m);
    ok = (m.blockView(0, 1) * Ks[0] + der.blockView(0, 0)) == m.blockView(0, 0);
  }
  report(3, "K matrix [[x,0],[0,0],[xa,0]] with Z_00 = Z_01*K + Z_00(a,0)", ok);
}

// --- criterion 4: hessian vs t-expansion oracle ----------------------------
void criterion4() {
  std::mt19937_64 rng(777);
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    VarCounts c{1 + static_cast<std::uint32_t>(i % 2),
                1 + static_cast<std::uint32_t>((i / 2) % 2), 0};
    NCPolynomial p = ncxtest::randomPoly(rng, c, 2, 3, 3);
    HessianPoly h = partialHessianX(p);
    int n = 1 + (i % 4);
    EvalPoint pt;
    pt.A = sampleTuple(DomainSpec::all(), c.a, n, mixSeed(50000, i * 3));
    pt.X = sampleTuple(DomainSpec::all(), c.x, n, mixSeed(50000, i * 3 + 1));
    pt.H = sampleTuple(DomainSpec::all(), c.x, n, mixSeed(50000, i * 3 + 2));
    Eigen::MatrixXd combinatorial = evalPoly(h.q, pt);
    Eigen::MatrixXd oracle = ncxtest::hessianByTExpansion(p, pt);
    double rel = maxAbs(combinatorial - oracle) / std::max(1.0, maxAbs(oracle));
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-10;
  }
  std::ostringstream detail;
  detail << "100 random polynomials, worst relative defect " << worst;
  report(4, "combinatorial Hessian matches the t-expansion oracle at 1e-10", ok, detail.str());
}

// --- criterion 5: convexity classifications --------------------------------
void criterion5() {
  bool ok = true;
  std::ostringstream detail;

  ConvexityVerdict sq = midpointConvexityTest(P("x1^2", kX), DomainSpec::all(), 500, 3, 11);
  ok = ok && sq.status == ConvexityVerdict::Status::PositivitySampled && sq.minEig >= -1e-10;

  ConvexityVerdict quartic =
      midpointConvexityTest(P("x1^4", kX), DomainSpec::all(), 200, 3, 11);
  ok = ok && quartic.status == ConvexityVerdict::Status::NotConvex;
  if (quartic.witness) {
    ok = ok && quartic.witness->violation < -1e-7 && quartic.witness->n <= 3;
    detail << "x1^4 violation " << quartic.witness->violation << " at trial "
           << quartic.witness->trial;
  } else {
    ok = false;
  }

  ConvexityVerdict cubic =
      midpointConvexityTest(P("a1*x1^3*a1", kAX), DomainSpec::all(), 200, 3, 11);
  ok = ok && cubic.status == ConvexityVerdict::Status::DegreeObstruction &&
       cubic.obstructionDegree == 3;

  // determinism under the fixed seed
  ConvexityVerdict quartic2 =
      midpointConvexityTest(P("x1^4", kX), DomainSpec::all(), 200, 3, 11);
  ok = ok && quartic2.witness && quartic.witness &&
       quartic2.witness->trial == quartic.witness->trial &&
       quartic2.witness->violation == quartic.witness->violation;

  report(5, "convexity classifications (x1^2, x1^4, a1*x1^3*a1), deterministic", ok,
         detail.str());
}

// --- criterion 6: decomposition fixtures ------------------------------------
void criterion6() {
  bool ok = true;
  std::ostringstream detail;

  auto lambdaDegreesOk = [](const Decomposition& d) {
    for (const auto& row : d.lambdaPos)
      for (const auto& [w, c] : row.terms)
        if (w.degree(VarClass::A) > 1 || w.degree(VarClass::X) > 1) return false;
    return true;
  };

  // (x1+a1)^2: separately convex, convex in x; not concave in a; no local R/Q.
  {
    NCPolynomial p = P("(x1+a1)*(x1+a1)", kAX);
    Decomposition sep = decomposeSeparatelyConvex(p);
    ok = ok && sep.residual.isZero() && lambdaDegreesOk(sep) &&
         sep.L.bidegree().a <= 1 && sep.L.bidegree().x <= 1;
    Decomposition vx = decomposeConvexInX(p, DomainSpec::all(), 50, 5);
    ok = ok && vx.residual.isZero() && vx.L.degree(VarClass::X) <= 1;
    bool ccRejected = false;
    try {
      decomposeConvexConcave(p);
    } catch (const HypothesisViolation&) {
      ccRejected = true;
    }
    ok = ok && ccRejected;
  }

  // x1^2 - a1^2: convex-concave and convex in x; not separately convex.
  {
    NCPolynomial p = P("x1^2 - a1^2", kAX);
    Decomposition cc = decomposeConvexConcave(p);
    ok = ok && cc.residual.isZero() && cc.L.isZero() && cc.lambdaPos.size() == 1 &&
         cc.lambdaNeg.size() == 1;
    auto lbd = cc.L.bidegree();
    ok = ok && lbd.a <= 1 && lbd.x <= 1;
    Decomposition vx = decomposeConvexInX(p, DomainSpec::all(), 50, 5);
    ok = ok && vx.residual.isZero() && vx.L.degree(VarClass::X) <= 1;
    Decomposition rq = localRqForm(p, 50, 5);
    ok = ok && rq.residual.isZero();
    bool sepRejected = false;
    try {
      decomposeSeparatelyConvex(p);
    } catch (const HypothesisViolation&) {
      sepRejected = true;
    }
    ok = ok && sepRejected;
  }

  // a1*x1^2*a1: separately convex, convex in x.
  {
    NCPolynomial p = P("a1*x1^2*a1", kAX);
    Decomposition sep = decomposeSeparatelyConvex(p);
    ok = ok && sep.residual.isZero() && lambdaDegreesOk(sep);
    Decomposition vx = decomposeConvexInX(p, DomainSpec::all(), 50, 5);
    ok = ok && vx.residual.isZero() && vx.certificate.certified;
  }

  // x1*a1^2*x1 + x1^2: separately convex, convex in x.
  {
    NCPolynomial p = P("x1*a1^2*x1 + x1^2", kAX);
    Decomposition sep = decomposeSeparatelyConvex(p);
    ok = ok && sep.residual.isZero() && lambdaDegreesOk(sep) && sep.L.isZero();
    Decomposition vx = decomposeConvexInX(p, DomainSpec::all(), 50, 5);
    ok = ok && vx.residual.isZero() && vx.certificate.holds;
  }

  report(6, "decomposition fixtures: exact residuals and degree laws", ok, detail.str());
}

// --- criterion 7: CHSY codimension ------------------------------------------
void criterion7() {
  bool ok = true;
  std::ostringstream detail;
  std::mt19937_64 rng(31415);
  for (auto [g, d] : std::vector<std::pair<std::uint32_t, std::size_t>>{
           {1, 2}, {1, 3}, {2, 2}, {2, 3}}) {
    for (int n : {static_cast<int>(d) + 1, static_cast<int>(d) + 2}) {
      EvalPoint pt;
      pt.A = MatrixTuple::zero(0, n);
      pt.X = sampleTuple(DomainSpec::all(), g, n, rng());
      Eigen::VectorXd v(n);
      std::normal_distribution<double> gauss;
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
      // monomials: first d pure-x words in canonical order
      std::vector<Word> mons{Word::identity()};
      std::vector<Word> frontier = mons;
      while (mons.size() < d) {
        std::vector<Word> next;
        for (const Word& w : frontier)
          for (std::uint32_t k = 1; k <= g && mons.size() + next.size() < 2 * d; ++k)
            next.push_back(w.concat(Word::single(VarClass::X, k)));
        for (const Word& w : next) {
          if (mons.size() < d) mons.push_back(w);
        }
        frontier = std::move(next);
      }
      ChsyReport rep = chsyCodimension(pt, v, mons);
      bool match = rep.independentCount == d &&
                   rep.codimension == static_cast<std::size_t>(g) * d * (d - 1) / 2 &&
                   rep.codimension == rep.bound;
      if (!match) detail << " (g=" << g << ",d=" << d << ",n=" << n << " mismatch)";
      ok = ok && match;
    }
  }
  report(7, "CHSY codimension g*d(d-1)/2 at n in {d+1, d+2}", ok, detail.str());
}

// --- criterion 8: signature lower bound --------------------------------------
void criterion8() {
  bool ok = true;

  SignatureEstimate est = signatureEstimate(P("a1*x1^3 + x1^3*a1", kAX), true, 2, 5, 5);
  bool zeroOk = false;
  for (const auto& w : est.witnesses)
    if (w.zeroPoint && w.n == 1 && w.muPlus == 2 && w.muMinus == 2) zeroOk = true;
  ok = ok && zeroOk && est.muPlusSup >= Rational(2) && est.muMinusSup >= Rational(2);

  // hand-built SDS fixtures bound mu from above by n * (square count)
  {
    VarCounts ch{0, 1, 1};
    SdsForm sds;
    sds.positives.emplace_back(2, P("h1", ch));
    ok = ok && sds.recompose(ch) == partialHessianX(P("x1^2", kX)).q;
    SignatureEstimate e2 = signatureEstimate(P("x1^2", kX), false, 4, 10, 17);
    ok = ok && e2.muPlusSup <= Rational(1) && e2.muMinusSup <= Rational(0);
    for (const auto& w : e2.witnesses)
      ok = ok && w.muPlus <= 1 * w.n && w.muMinus <= 0;
  }
  {
    VarCounts ch{1, 1, 1};
    SdsForm sds;
    NCPolynomial u1 = P("h1", ch), u2 = P("h1*a1", ch);
    NCPolynomial u3 = P("h1*x1 + 1/2*x1*h1", ch);
    NCPolynomial u4 = P("h1*x1*a1 + 1/2*x1*h1*a1", ch);
    sds.positives.emplace_back(1, u1 + u4);
    sds.positives.emplace_back(1, u2 + u3);
    sds.negatives.emplace_back(1, u1 - u4);
    sds.negatives.emplace_back(1, u2 - u3);
    ok = ok && sds.recompose(ch) == partialHessianX(P("a1*x1^3 + x1^3*a1", kAX)).q;
    SignatureEstimate e3 = signatureEstimate(P("a1*x1^3 + x1^3*a1", kAX), false, 4, 20, 19);
    ok = ok && e3.muPlusSup <= Rational(2) && e3.muMinusSup <= Rational(2);
    for (const auto& w : e3.witnesses)
      ok = ok && w.muPlus <= 2 * w.n && w.muMinus <= 2 * w.n;
  }

  report(8, "signature lower bound mu+-=2 at (0,0) and mu <= n*sigma vs SDS fixtures", ok);
}

// --- criterion 9: N(g,d) and faithfulness -----------------------------------
void criterion9() {
  bool ok = true;
  for (std::uint32_t g = 0; g <= 5 && ok; ++g)
    for (std::uint32_t d = 0; d <= 5 && ok; ++d) {
      unsigned long long expected = 0, pw = 1;
      for (std::uint32_t j = 0; j <= d; ++j) {
        expected += pw;
        pw *= g;
      }
      ok = ngd(g, d) == expected;
    }

  std::mt19937_64 rng(2718);
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::uint32_t g = 1 + (rep % 2), d = 2 + (rep % 2);
    VarCounts c{0, g, 0};
    NCPolynomial p = ncxtest::randomPoly(rng, c, 0, d, 3);
    // pin the degree at exactly d
    std::vector<Letter> letters;
    for (std::uint32_t i = 0; i < d; ++i)
      letters.push_back(Letter{VarClass::X, 1 + (i % g)});
    p.addTerm(Word(std::move(letters)), 1);
    if (p.isZero()) continue;
    int n = static_cast<int>(ngd(g, d));
    FaithfulnessProbe probe = faithfulnessProbe(p, n, 20, mixSeed(999, rep));
    if (!probe.nonzeroFound) ++failures;
  }
  ok = ok && failures == 0;
  std::ostringstream detail;
  detail << failures << " failed repetitions out of 100";
  report(9, "N(g,d) closed form and the faithfulness probe", ok, detail.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
