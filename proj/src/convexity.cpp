#include "ncx/convexity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ncx/calculus.hpp"

namespace ncx {

namespace {

double minEigenvalue(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void requireSymmetricInput(const NCPolynomial& p, const char* op) {
  if (!p.isSymmetric())
    throw std::invalid_argument(std::string(op) + ": polynomial is not symmetric");
}

struct MidpointSample {
  MatrixTuple A, X, Y;
  double t;
};

MidpointSample drawMidpointSample(const NCPolynomial& p, const DomainSpec& domain,
                                  std::uint64_t trialSeed, int trial, int n) {
  const VarCounts& counts = p.counts();
  MidpointSample s;
  s.A = sampleTuple(domain.componentFor(VarClass::A), counts.a, n, mixSeed(trialSeed, 0));
  s.X = sampleTuple(domain.componentFor(VarClass::X), counts.x, n, mixSeed(trialSeed, 1));
  s.Y = sampleTuple(domain.componentFor(VarClass::X), counts.x, n, mixSeed(trialSeed, 2));
  if (trial % 2 == 0) {
    s.t = 0.5;
  } else {
    std::mt19937_64 rng(mixSeed(trialSeed, 3));
    std::uniform_real_distribution<double> uni(0.05, 0.95);
    s.t = uni(rng);
  }
  return s;
}

double midpointDefectMinEig(const NCPolynomial& p, const MidpointSample& s) {
  EvalPoint left{s.A, s.X, std::nullopt, std::nullopt};
  EvalPoint right{s.A, s.Y, std::nullopt, std::nullopt};
  MatrixTuple mid;
  mid.n = s.X.n;
  for (std::size_t j = 0; j < s.X.mats.size(); ++j)
    mid.mats.push_back(s.t * s.X.mats[j] + (1.0 - s.t) * s.Y.mats[j]);
  EvalPoint midpt{s.A, mid, std::nullopt, std::nullopt};
  Eigen::MatrixXd defect =
      s.t * evalPoly(p, left) + (1.0 - s.t) * evalPoly(p, right) - evalPoly(p, midpt);
  return minEigenvalue(defect);
}

double hessianDefectMinEig(const NCPolynomial& hess, const VarCounts& counts,
                           const DomainSpec& domain, std::uint64_t trialSeed, int n) {
  EvalPoint pt;
  pt.A = sampleTuple(domain.componentFor(VarClass::A), counts.a, n, mixSeed(trialSeed, 0));
  pt.X = sampleTuple(domain.componentFor(VarClass::X), counts.x, n, mixSeed(trialSeed, 1));
  pt.H = sampleTuple(DomainSpec::all(), counts.h, n, mixSeed(trialSeed, 2));
  return minEigenvalue(evalPoly(hess, pt));
}

}  // namespace

ConvexityVerdict midpointConvexityTest(const NCPolynomial& p, const DomainSpec& domain,
                                       int trials, int nmax, std::uint64_t seed) {
  requireSymmetricInput(p, "midpoint_convexity_test");
  if (p.containsClass(VarClass::H))
    throw std::invalid_argument("midpoint_convexity_test: polynomial contains direction letters");

  ConvexityVerdict v;
  std::uint32_t dx = p.degree(VarClass::X);
  // Degree shortcut: convexity in x on an open domain forces deg_x <= 2. For
  // polynomials in x alone we keep sampling for an explicit matrix
  // counterexample and only fall back to the obstruction.
  if (dx >= 3 && p.containsClass(VarClass::A)) {
    v.status = ConvexityVerdict::Status::DegreeObstruction;
    v.obstructionDegree = dx;
    v.notes = "convexity in x on an open domain forces degree <= 2 in x";
    return v;
  }

  nmax = std::max(1, nmax);
  double minEig = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    int n = trial % nmax + 1;
    std::uint64_t trialSeed = mixSeed(seed, static_cast<std::uint64_t>(trial));
    MidpointSample s = drawMidpointSample(p, domain, trialSeed, trial, n);
    double lam = midpointDefectMinEig(p, s);
    minEig = std::min(minEig, lam);
    if (lam < -kViolationTol) {
      v.status = ConvexityVerdict::Status::NotConvex;
      v.witness = Witness{trialSeed, trial, n, s.t, lam, "midpoint"};
      v.samples = trial + 1;
      v.minEig = lam;
      return v;
    }
  }
  if (dx >= 3) {
    v.status = ConvexityVerdict::Status::DegreeObstruction;
    v.obstructionDegree = dx;
    v.samples = trials;
    v.minEig = minEig;
    v.notes = "no sampled violation, but the degree theorem rules convexity out";
    return v;
  }
  v.status = ConvexityVerdict::Status::PositivitySampled;
  v.samples = trials;
  v.minEig = minEig;
  v.notes = "sampled evidence only, not a proof of convexity";
  return v;
}

ConvexityVerdict hessianPositivityTest(const NCPolynomial& p, const DomainSpec& domain,
                                       int trials, int nmax, std::uint64_t seed) {
  requireSymmetricInput(p, "hessian_positivity_test");
  if (p.containsClass(VarClass::H))
    throw std::invalid_argument("hessian_positivity_test: polynomial contains direction letters");

  HessianPoly hq = partialHessianX(p);
  ConvexityVerdict v;
  if (hq.q.isZero()) {
    v.status = ConvexityVerdict::Status::PositivitySampled;
    v.notes = "hessian is identically zero";
    return v;
  }

  nmax = std::max(1, nmax);
  double minEig = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    int n = trial % nmax + 1;
    std::uint64_t trialSeed = mixSeed(seed, static_cast<std::uint64_t>(trial));
    double lam = hessianDefectMinEig(hq.q, hq.q.counts(), domain, trialSeed, n);
    minEig = std::min(minEig, lam);
    if (lam < -kViolationTol) {
      v.status = ConvexityVerdict::Status::NotConvex;
      v.witness = Witness{trialSeed, trial, n, 0.0, lam, "hessian"};
      v.samples = trial + 1;
      v.minEig = lam;
      return v;
    }
  }
  if (p.degree(VarClass::X) >= 3) {
    // Dichotomy: a degree >= 3 polynomial with PSD Hessian on a full domain
    // cannot exist; a clean sampling run points at a thin domain (the
    // annihilating-polynomial branch) or at not enough trials.
    v.status = ConvexityVerdict::Status::Inconclusive;
    v.samples = trials;
    v.minEig = minEig;
    v.notes = "degree >= 3 in x with no sampled violation: domain may be thin";
    return v;
  }
  v.status = ConvexityVerdict::Status::PositivitySampled;
  v.samples = trials;
  v.minEig = minEig;
  v.notes = "sampled evidence only, not a proof of positivity";
  return v;
}

double reproduceWitness(const NCPolynomial& p, const DomainSpec& domain, const Witness& w) {
  if (w.kind == "midpoint") {
    MidpointSample s = drawMidpointSample(p, domain, w.seed, w.trial, w.n);
    s.t = w.t;
    return midpointDefectMinEig(p, s);
  }
  HessianPoly hq = partialHessianX(p);
  return hessianDefectMinEig(hq.q, hq.q.counts(), domain, w.seed, w.n);
}

WitnessSample reproduceWitnessSample(const NCPolynomial& p, const DomainSpec& domain,
                                     const Witness& w) {
  WitnessSample out;
  if (w.kind == "midpoint") {
    MidpointSample s = drawMidpointSample(p, domain, w.seed, w.trial, w.n);
    out.A = s.A;
    out.X = s.X;
    out.Y = s.Y;
    out.t = w.t;
    return out;
  }
  HessianPoly hq = partialHessianX(p);
  const VarCounts& counts = hq.q.counts();
  out.A = sampleTuple(domain.componentFor(VarClass::A), counts.a, w.n, mixSeed(w.seed, 0));
  out.X = sampleTuple(domain.componentFor(VarClass::X), counts.x, w.n, mixSeed(w.seed, 1));
  out.Y = sampleTuple(DomainSpec::all(), counts.h, w.n, mixSeed(w.seed, 2));
  return out;
}

// ---------------------------------------------------------------------------
// Gram machinery
// ---------------------------------------------------------------------------

namespace {

NCPolynomial gramForm(const std::vector<Word>& basis, const MatrixPoly& gram,
                      VarCounts counts) {
  NCPolynomial out(counts);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const NCPolynomial& g = gram.at(i, j);
      if (g.isZero()) continue;
      NCPolynomial mi = NCPolynomial::monomial(1, basis[i].reversed(), counts);
      NCPolynomial mj = NCPolynomial::monomial(1, basis[j], counts);
      out += mi * (g * mj);
    }
  return out;
}

// Exact symmetric Gram with basis^T G basis == part. Words realizable by k
// splits get the coefficient distributed equally; a word with no split is not
// representable and signals a violated hypothesis.
GramBlock matchGram(const NCPolynomial& part, const std::vector<Word>& basis,
                    const char* context) {
  VarCounts counts = part.counts();
  GramBlock block{basis, MatrixPoly(basis.size(), basis.size(), counts),
                  Eigen::MatrixXd(), 0.0};

  std::map<Word, std::size_t> indexOf;
  for (std::size_t i = 0; i < basis.size(); ++i) indexOf.emplace(basis[i], i);

  for (const auto& [w, c] : part.terms()) {
    std::vector<std::pair<std::size_t, std::size_t>> splits;
    for (std::size_t len = 1; len < w.size(); ++len) {
      Word left = w.subword(0, len).reversed();
      Word right = w.subword(len, w.size() - len);
      auto li = indexOf.find(left);
      auto ri = indexOf.find(right);
      if (li != indexOf.end() && ri != indexOf.end())
        splits.emplace_back(li->second, ri->second);
    }
    if (splits.empty())
      throw HypothesisViolation(std::string(context) +
                                ": monomial not representable over the Gram basis");
    Rational share = Rational(c) / int(splits.size());
    for (auto [i, j] : splits) {
      block.gram.at(i, j) += NCPolynomial::constant(share, counts);
    }
  }

  // sanity: the Gram reproduces the part exactly
  if (!(gramForm(basis, block.gram, counts) == part))
    throw std::logic_error(std::string(context) + ": Gram matching failed");
  return block;
}

Eigen::MatrixXd gramToDouble(const MatrixPoly& gram) {
  Eigen::MatrixXd out(gram.rows(), gram.cols());
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = 0; j < gram.cols(); ++j) {
      const NCPolynomial& e = gram.at(i, j);
      out(i, j) = e.isZero() ? 0.0 : toDouble(e.coeff(Word::identity()));
    }
  return out;
}

// Thin factor R with R^T R = clip(M); throws when an eigenvalue < -tol.
Eigen::MatrixXd psdFactorOrThrow(const Eigen::MatrixXd& M, double tol, const char* context) {
  Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  double scale = std::max(1.0, maxAbs(sym));
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) < -tol * scale)
      throw HypothesisViolation(std::string(context) +
                                ": matrix is not positive semidefinite (eigenvalue " +
                                std::to_string(lam(i)) + ")");
  std::vector<int> keep;
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) > tol * scale) keep.push_back(i);
  Eigen::MatrixXd R(keep.size(), sym.cols());
  for (std::size_t r = 0; r < keep.size(); ++r)
    R.row(r) = std::sqrt(lam(keep[r])) * es.eigenvectors().col(keep[r]).transpose();
  return R;
}

std::vector<Word> singleLetterBasis(VarClass cls, std::uint32_t g) {
  std::vector<Word> basis;
  for (std::uint32_t i = 1; i <= g; ++i) basis.push_back(Word::single(cls, i));
  return basis;
}

// Monomials linear in each of a and x: a_i x_j and x_j a_i, canonical order.
std::vector<Word> mixedPairBasis(const VarCounts& counts) {
  std::vector<Word> basis;
  for (std::uint32_t i = 1; i <= counts.a; ++i)
    for (std::uint32_t j = 1; j <= counts.x; ++j) {
      basis.push_back(Word({Letter{VarClass::A, i}, Letter{VarClass::X, j}}));
      basis.push_back(Word({Letter{VarClass::X, j}, Letter{VarClass::A, i}}));
    }
  std::sort(basis.begin(), basis.end());
  return basis;
}

NumericPoly numericRow(const Eigen::MatrixXd& factor, int row, const std::vector<Word>& basis) {
  NumericPoly out;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    double c = factor(row, static_cast<int>(j));
    if (std::abs(c) > 1e-14) out.terms[basis[j]] = c;
  }
  return out;
}

double numericRecompositionError(const NCPolynomial& p,
                                 const std::vector<NumericPoly>& lambdaPos,
                                 const std::vector<NumericPoly>& lambdaNeg,
                                 const std::map<Word, double>& extra) {
  // coefficient map of lambda^T lambda (+extra) minus p
  std::map<Word, double> acc = extra;
  auto addSquares = [&acc](const std::vector<NumericPoly>& lam, double sign) {
    for (const NumericPoly& row : lam)
      for (const auto& [wl, cl] : row.terms)
        for (const auto& [wr, cr] : row.terms)
          acc[wl.reversed().concat(wr)] += sign * cl * cr;
  };
  addSquares(lambdaPos, 1.0);
  addSquares(lambdaNeg, -1.0);
  for (const auto& [w, c] : p.terms()) acc[w] -= toDouble(c);
  double err = 0.0;
  for (const auto& [w, c] : acc) err = std::max(err, std::abs(c));
  return err;
}

}  // namespace

Eigen::MatrixXd sosFactorConstant(const Eigen::MatrixXd& Z, double tol) {
  Eigen::MatrixXd R = psdFactorOrThrow(Z, tol, "sos_factor_constant");
  double scale = std::max(1.0, maxAbs(Z));
  if (maxAbs(R.transpose() * R - 0.5 * (Z + Z.transpose())) > 10.0 * tol * scale)
    throw std::logic_error("sos_factor_constant: residual exceeds tolerance");
  return R;
}

Decomposition decomposeConvexInX(const NCPolynomial& p, const DomainSpec& domain, int samples,
                                 std::uint64_t seed, double tol) {
  requireSymmetricInput(p, "decompose_convex_in_x");
  if (p.degree(VarClass::X) > 2)
    throw std::invalid_argument(
        "decompose_convex_in_x: degree in x exceeds two (run a convexity test first)");

  Decomposition d;
  d.form = Decomposition::Form::VzvL;
  HessianPoly hq = partialHessianX(p);
  VarCounts counts = hq.q.counts();
  NCPolynomial pPad = p.withCounts(counts);

  if (hq.q.isZero()) {
    d.L = pPad;
    d.residual = NCPolynomial::zero(counts);
    d.method = "degree <= 1 in x: no quadratic part";
    d.certificate.checked = true;
    d.certificate.holds = true;
    d.certificate.certified = true;
    return d;
  }

  MiddleMatrix mm = middleMatrix(hq, BorderMode::Minimal);
  MatrixPoly vx = mm.border.asColumn(VarClass::X);
  NCPolynomial hessPart = Rational(1, 2) * (vx.transposed() * mm.Z * vx).at(0, 0);
  d.L = pPad - hessPart;
  d.residual = pPad - (hessPart + d.L);
  d.middle = mm;
  d.method = "middle-matrix";

  bool constantZ = true;
  for (std::size_t i = 0; i < mm.Z.rows() && constantZ; ++i)
    for (std::size_t j = 0; j < mm.Z.cols() && constantZ; ++j) {
      const NCPolynomial& e = mm.Z.at(i, j);
      if (!e.isZero() && !(e.termCount() == 1 && e.terms().begin()->first.empty()))
        constantZ = false;
    }

  // PSD certificate of Z over the a-component of the domain
  d.certificate.checked = true;
  d.certificate.seed = seed;
  double minEig = std::numeric_limits<double>::infinity();
  if (constantZ) {
    EvalPoint pt;
    pt.A = MatrixTuple::zero(counts.a, 1);
    pt.X = MatrixTuple::zero(counts.x, 1);
    Eigen::MatrixXd zval = evalMatrixPoly(mm.Z, pt);
    minEig = minEigenvalue(zval);
    d.certificate.samples = 1;
    d.certificate.holds = minEig >= -tol;
    d.certificate.certified = d.certificate.holds;
    if (d.certificate.holds) {
      d.sosFactor = sosFactorConstant(zval, tol);
      d.form = Decomposition::Form::SosL;
    }
  } else {
    const DomainSpec& da = domain.componentFor(VarClass::A);
    int nmax = std::max(1, std::min(defaultNmax(p), 6));
    for (int s = 0; s < samples; ++s) {
      int n = s % nmax + 1;
      EvalPoint pt;
      pt.A = sampleTuple(da, counts.a, n, mixSeed(seed, static_cast<std::uint64_t>(s)));
      pt.X = MatrixTuple::zero(counts.x, n);
      minEig = std::min(minEig, minEigenvalue(evalMatrixPoly(mm.Z, pt)));
    }
    d.certificate.samples = samples;
    d.certificate.holds = minEig >= -tol;
  }
  d.certificate.minEig = minEig;
  return d;
}

Decomposition decomposeSeparatelyConvex(const NCPolynomial& p, double tol) {
  requireSymmetricInput(p, "decompose_separately_convex");
  auto bd = p.bidegree();
  if (bd.x > 2 || bd.a > 2)
    throw std::invalid_argument(
        "decompose_separately_convex: separate convexity forces bidegree <= (2,2)");
  VarCounts counts = p.counts();

  NCPolynomial parts[3][3];
  for (std::uint32_t i = 0; i <= 2; ++i)
    for (std::uint32_t j = 0; j <= 2; ++j) parts[i][j] = homogeneousPart(p, i, j);

  std::vector<Word> jBasis = mixedPairBasis(counts);
  std::vector<Word> xBasis = singleLetterBasis(VarClass::X, counts.x);
  std::vector<Word> aBasis = singleLetterBasis(VarClass::A, counts.a);

  Decomposition d;
  d.form = Decomposition::Form::SeparateConvex;

  // Squares over J + {x} + {a}, absorbing the (1,1) cross part when the joint
  // Gram stays PSD; otherwise the partial-isometry assembly below.
  {
    std::vector<Word> allBasis;
    allBasis.insert(allBasis.end(), xBasis.begin(), xBasis.end());
    allBasis.insert(allBasis.end(), aBasis.begin(), aBasis.end());
    allBasis.insert(allBasis.end(), jBasis.begin(), jBasis.end());
    std::sort(allBasis.begin(), allBasis.end());

    NCPolynomial squaresPart = parts[2][2] + parts[1][2] + parts[2][1] + parts[0][2] +
                               parts[2][0] + parts[1][1];
    GramBlock joint = matchGram(squaresPart, allBasis, "decompose_separately_convex");
    Eigen::MatrixXd G = gramToDouble(joint.gram);
    joint.minEig = minEigenvalue(G);
    double scale = std::max(1.0, maxAbs(G));
    if (joint.minEig >= -tol * scale) {
      joint.factor = psdFactorOrThrow(G, tol, "decompose_separately_convex");
      for (int r = 0; r < joint.factor.rows(); ++r)
        d.lambdaPos.push_back(numericRow(joint.factor, r, allBasis));
      d.L = parts[1][0] + parts[0][1] + parts[0][0];
      d.residual = p - (gramForm(allBasis, joint.gram, counts) + d.L);
      d.numericResidual = numericRecompositionError(p - d.L, d.lambdaPos, {}, {});
      d.method = "joint-gram";
      d.grams.emplace_back("G", std::move(joint));
      return d;
    }
  }

  // Paper-route fallback: joint Grams for the x side and the a side share the
  // J block; a partial isometry splices the two factorizations.
  if (counts.a == 0 || counts.x == 0)
    throw HypothesisViolation(
        "decompose_separately_convex: required Gram matrix fails PSD at tolerance");
  std::vector<Word> wxBasis = jBasis;
  wxBasis.insert(wxBasis.end(), xBasis.begin(), xBasis.end());
  std::sort(wxBasis.begin(), wxBasis.end());
  std::vector<Word> waBasis = jBasis;
  waBasis.insert(waBasis.end(), aBasis.begin(), aBasis.end());
  std::sort(waBasis.begin(), waBasis.end());

  GramBlock gx = matchGram(parts[2][2] + parts[1][2] + parts[0][2], wxBasis,
                           "decompose_separately_convex (x side)");
  GramBlock ga = matchGram(parts[2][2] + parts[2][1] + parts[2][0], waBasis,
                           "decompose_separately_convex (a side)");

  Eigen::MatrixXd Gx = gramToDouble(gx.gram);
  Eigen::MatrixXd Ga = gramToDouble(ga.gram);
  gx.minEig = minEigenvalue(Gx);
  ga.minEig = minEigenvalue(Ga);
  gx.factor = psdFactorOrThrow(Gx, tol, "decompose_separately_convex (x side)");
  ga.factor = psdFactorOrThrow(Ga, tol, "decompose_separately_convex (a side)");

  // columns of each factor, split back into the J part and the single-letter part
  auto columnsOf = [](const Eigen::MatrixXd& F, const std::vector<Word>& basis,
                      const std::vector<Word>& wanted) {
    Eigen::MatrixXd out(F.rows(), wanted.size());
    for (std::size_t k = 0; k < wanted.size(); ++k) {
      auto it = std::find(basis.begin(), basis.end(), wanted[k]);
      out.col(k) = F.col(it - basis.begin());
    }
    return out;
  };
  Eigen::MatrixXd Amat = columnsOf(gx.factor, wxBasis, jBasis);
  Eigen::MatrixXd Bmat = columnsOf(gx.factor, wxBasis, xBasis);
  Eigen::MatrixXd Apr = columnsOf(ga.factor, waBasis, jBasis);
  Eigen::MatrixXd Bpr = columnsOf(ga.factor, waBasis, aBasis);

  // partial isometry with U*A = A'
  Eigen::MatrixXd U;
  if (Amat.rows() == 0 || Amat.cols() == 0 || Apr.rows() == 0)
    U = Eigen::MatrixXd::Zero(Apr.rows(), Amat.rows());
  else
    U = Apr * Amat.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(U.rows(), U.rows()) - U * U.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()));
  Eigen::MatrixXd W = es.eigenvectors() *
                      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      es.eigenvectors().transpose();

  Eigen::MatrixXd UtB = U.transpose() * Bpr;  // couples the a-side squares
  Eigen::MatrixXd WB = W * Bpr;

  for (int r = 0; r < Amat.rows(); ++r) {
    NumericPoly row;
    for (std::size_t j = 0; j < jBasis.size(); ++j)
      if (std::abs(Amat(r, j)) > 1e-14) row.terms[jBasis[j]] = Amat(r, j);
    for (std::size_t j = 0; j < xBasis.size(); ++j)
      if (std::abs(Bmat(r, j)) > 1e-14) row.terms[xBasis[j]] += Bmat(r, j);
    for (std::size_t j = 0; j < aBasis.size(); ++j)
      if (std::abs(UtB(r, j)) > 1e-14) row.terms[aBasis[j]] += UtB(r, j);
    d.lambdaPos.push_back(std::move(row));
  }
  for (int r = 0; r < WB.rows(); ++r) {
    NumericPoly row = numericRow(WB, r, aBasis);
    if (!row.terms.empty()) d.lambdaPos.push_back(std::move(row));
  }

  // L = E - [V_a^T B'^T U B V_x + transpose]; the correction is numeric.
  NCPolynomial E = parts[1][1] + parts[1][0] + parts[0][1] + parts[0][0];
  d.L = E;
  Eigen::MatrixXd cross = Bpr.transpose() * U * Bmat;  // rows: a, cols: x
  std::map<Word, double> extra;
  for (std::uint32_t i = 1; i <= counts.a; ++i)
    for (std::uint32_t j = 1; j <= counts.x; ++j) {
      double c = cross(i - 1, j - 1);
      if (std::abs(c) < 1e-14) continue;
      extra[Word({Letter{VarClass::A, i}, Letter{VarClass::X, j}})] -= c;
      extra[Word({Letter{VarClass::X, j}, Letter{VarClass::A, i}})] -= c;
    }
  for (const auto& [w, c] : E.terms()) extra[w] += toDouble(c);

  d.residual = p - (gramForm(wxBasis, gx.gram, counts) + gramForm(waBasis, ga.gram, counts) -
                    parts[2][2] + E);
  d.numericResidual = numericRecompositionError(p, d.lambdaPos, {}, extra);
  d.method = "partial-isometry";
  d.grams.emplace_back("G_x", std::move(gx));
  d.grams.emplace_back("G_a", std::move(ga));
  return d;
}

Decomposition decomposeConvexConcave(const NCPolynomial& p, double tol) {
  requireSymmetricInput(p, "decompose_convex_concave");
  auto bd = p.bidegree();
  if (bd.x > 2 || bd.a > 2)
    throw std::invalid_argument("decompose_convex_concave: bidegree exceeds (2,2)");
  VarCounts counts = p.counts();

  NCPolynomial p22 = homogeneousPart(p, 2, 2), p12 = homogeneousPart(p, 1, 2),
               p21 = homogeneousPart(p, 2, 1);
  if (!p22.isZero() || !p12.isZero() || !p21.isZero())
    throw HypothesisViolation(
        "decompose_convex_concave: hypotheses violated (x-squares have a-dependent middle or "
        "a-squares depend on x)");

  std::vector<Word> xBasis = singleLetterBasis(VarClass::X, counts.x);
  std::vector<Word> aBasis = singleLetterBasis(VarClass::A, counts.a);

  GramBlock rGram = matchGram(homogeneousPart(p, 0, 2), xBasis, "decompose_convex_concave (R)");
  GramBlock sGram = matchGram(homogeneousPart(p, 2, 0), aBasis, "decompose_convex_concave (S)");

  Eigen::MatrixXd Pr = gramToDouble(rGram.gram);
  Eigen::MatrixXd Ns = -gramToDouble(sGram.gram);  // -(2,0) part must be PSD
  rGram.minEig = minEigenvalue(Pr);
  rGram.factor = psdFactorOrThrow(Pr, tol, "decompose_convex_concave (R)");
  double sMin = minEigenvalue(Ns);
  Eigen::MatrixXd Sfac = psdFactorOrThrow(Ns, tol, "decompose_convex_concave (S)");
  sGram.minEig = sMin;
  sGram.factor = Sfac;

  Decomposition d;
  d.form = Decomposition::Form::ConvexConcave;
  for (int r = 0; r < rGram.factor.rows(); ++r)
    d.lambdaPos.push_back(numericRow(rGram.factor, r, xBasis));
  for (int r = 0; r < Sfac.rows(); ++r) d.lambdaNeg.push_back(numericRow(Sfac, r, aBasis));

  d.L = homogeneousPart(p, 1, 1) + homogeneousPart(p, 1, 0) + homogeneousPart(p, 0, 1) +
        homogeneousPart(p, 0, 0);
  d.residual = p - (gramForm(xBasis, rGram.gram, counts) +
                    gramForm(aBasis, sGram.gram, counts) + d.L);
  d.numericResidual = numericRecompositionError(p - d.L, d.lambdaPos, d.lambdaNeg, {});
  d.method = "bihomogeneous-grams";
  d.grams.emplace_back("R_gram", std::move(rGram));
  d.grams.emplace_back("S_gram", std::move(sGram));
  return d;
}

Decomposition localRqForm(const NCPolynomial& p, int samples, std::uint64_t seed, double tol) {
  requireSymmetricInput(p, "local_rq_form");
  auto bd = p.bidegree();
  if (bd.x > 2 || bd.a > 2)
    throw std::invalid_argument("local_rq_form: bidegree exceeds (2,2)");
  VarCounts counts = p.counts();
  std::uint32_t g = counts.x;

  // coefficient matching of p = W(x)^T T(a) W(x), W = (1, x_1..x_g)
  MatrixPoly T(g + 1, g + 1, counts);
  for (const auto& [w, c] : p.terms()) {
    const auto& ls = w.letters();
    std::vector<std::size_t> xpos;
    for (std::size_t i = 0; i < ls.size(); ++i)
      if (ls[i].cls == VarClass::X) xpos.push_back(i);
    if (xpos.empty()) {
      T.at(0, 0).addTerm(w, c);
    } else if (xpos.size() == 1) {
      std::size_t pos = xpos[0];
      std::uint32_t idx = ls[pos].index;
      if (w.size() == 1) {
        T.at(idx, 0).addTerm(Word::identity(), Rational(c) / 2);
        T.at(0, idx).addTerm(Word::identity(), Rational(c) / 2);
      } else if (pos == 0) {
        T.at(idx, 0).addTerm(w.subword(1, w.size() - 1), c);
      } else if (pos == w.size() - 1) {
        T.at(0, idx).addTerm(w.subword(0, w.size() - 1), c);
      } else {
        throw HypothesisViolation(
            "local_rq_form: forbidden monomial (an x variable inside an a-word)");
      }
    } else {
      if (xpos[0] != 0 || xpos[1] != w.size() - 1)
        throw HypothesisViolation(
            "local_rq_form: forbidden monomial of the form x x a or a x x");
      T.at(ls[0].index, ls[w.size() - 1].index)
          .addTerm(w.subword(1, w.size() - 2), c);
    }
  }

  // split T = R - Q: R the degree <= 1 part, Q = -(a-homogeneous-degree-2 part)
  MatrixPoly R(g + 1, g + 1, counts), Q(g + 1, g + 1, counts);
  for (std::size_t i = 0; i <= g; ++i)
    for (std::size_t j = 0; j <= g; ++j) {
      for (const auto& [w, c] : T.at(i, j).terms()) {
        if (w.degree(VarClass::A) >= 2)
          Q.at(i, j).addTerm(w, -c);
        else
          R.at(i, j).addTerm(w, c);
      }
    }

  // block Gram of Q: Q[i][j] = sum_{k,l} BQ[(k,i),(l,j)] a_k a_l, PSD <=> SoS
  std::size_t dim = static_cast<std::size_t>(counts.a) * (g + 1);
  Eigen::MatrixXd BQ = Eigen::MatrixXd::Zero(dim, dim);
  MatrixPoly BQexact(std::max<std::size_t>(dim, 1), std::max<std::size_t>(dim, 1), counts);
  for (std::size_t i = 0; i <= g; ++i)
    for (std::size_t j = 0; j <= g; ++j)
      for (const auto& [w, c] : Q.at(i, j).terms()) {
        std::uint32_t k = w.letters()[0].index, l = w.letters()[1].index;
        std::size_t row = (k - 1) * (g + 1) + i, col = (l - 1) * (g + 1) + j;
        BQ(row, col) += toDouble(c);
        BQexact.at(row, col) += NCPolynomial::constant(c, counts);
      }

  Decomposition d;
  d.form = Decomposition::Form::LocalRq;
  d.method = "coefficient-matching over W(x)";
  d.Rmat = R;
  d.Qmat = Q;
  if (dim > 0) {
    d.qBlockFactor = psdFactorOrThrow(BQ, tol, "local_rq_form (Q Gram)");
    d.qBlockGram = BQexact;
  }

  // exact recomposition W^T (R - Q) W == p
  MatrixPoly Wcol(g + 1, 1, counts);
  Wcol.at(0, 0) = NCPolynomial::constant(1, counts);
  for (std::uint32_t j = 1; j <= g; ++j)
    Wcol.at(j, 0) = NCPolynomial::variable(VarClass::X, j, counts);
  d.residual = p - (Wcol.transposed() * (R - Q) * Wcol).at(0, 0);
  d.L = NCPolynomial::zero(counts);

  // sampled PSD of R(A) - Q(A) over the unit ball
  d.certificate.checked = true;
  d.certificate.seed = seed;
  d.certificate.samples = samples;
  double minEig = std::numeric_limits<double>::infinity();
  MatrixPoly RmQ = R - Q;
  int nmax = std::max(1, std::min(defaultNmax(p), 5));
  for (int s = 0; s < samples; ++s) {
    int n = s % nmax + 1;
    EvalPoint pt;
    pt.A = sampleTuple(DomainSpec::normBall(1.0, VarClass::A), counts.a, n,
                       mixSeed(seed, static_cast<std::uint64_t>(s)));
    pt.X = MatrixTuple::zero(counts.x, n);
    minEig = std::min(minEig, minEigenvalue(evalMatrixPoly(RmQ, pt)));
  }
  d.certificate.minEig = minEig;
  d.certificate.holds = minEig >= -10 * tol;
  return d;
}

NCPolynomial SdsForm::recompose(VarCounts counts) const {
  NCPolynomial acc(counts);
  for (const auto& [w, f] : positives) acc += w * (f.transposed() * f);
  for (const auto& [w, f] : negatives) acc -= w * (f.transposed() * f);
  return acc;
}

namespace {

std::pair<int, int> eigencountsOf(const Eigen::MatrixXd& zval) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (zval + zval.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double norm = std::max(std::abs(es.eigenvalues().minCoeff()),
                         std::abs(es.eigenvalues().maxCoeff()));
  double thr = kEigSignTol * norm;
  int muP = 0, muM = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > thr) ++muP;
    if (es.eigenvalues()(i) < -thr) ++muM;
  }
  return {muP, muM};
}

}  // namespace

std::pair<int, int> middleMatrixEigencounts(const NCPolynomial& p, const EvalPoint& pt) {
  requireSymmetricInput(p, "middle_matrix_eigencounts");
  HessianPoly hq = partialHessianX(p);
  MiddleMatrix mm = middleMatrix(hq, BorderMode::Reduced);
  return eigencountsOf(evalMatrixPoly(mm.Z, pt));
}

namespace {

EvalPoint signatureSamplePoint(const VarCounts& counts, bool atXZero, bool zeroPoint, int n,
                               std::uint64_t trialSeed) {
  EvalPoint pt;
  if (zeroPoint)
    pt.A = MatrixTuple::zero(counts.a, n);
  else
    pt.A = sampleTuple(DomainSpec::all(), counts.a, n, mixSeed(trialSeed, 0));
  if (atXZero || zeroPoint)
    pt.X = MatrixTuple::zero(counts.x, n);
  else
    pt.X = sampleTuple(DomainSpec::all(), counts.x, n, mixSeed(trialSeed, 1));
  return pt;
}

}  // namespace

std::pair<int, int> reproduceSignatureWitness(const NCPolynomial& p, bool atXZero,
                                              const SignatureWitness& w) {
  HessianPoly hq = partialHessianX(p);
  MiddleMatrix mm = middleMatrix(hq, BorderMode::Reduced);
  EvalPoint pt =
      signatureSamplePoint(hq.q.counts(), atXZero, w.zeroPoint, w.n, w.seed);
  return eigencountsOf(evalMatrixPoly(mm.Z, pt));
}

SignatureEstimate signatureEstimate(const NCPolynomial& p, bool atXZero, int nmax, int trials,
                                    std::uint64_t seed) {
  requireSymmetricInput(p, "signature_estimate");
  if (p.degree(VarClass::X) < 2)
    throw std::invalid_argument("signature_estimate: degree in x must be >= 2");

  HessianPoly hq = partialHessianX(p);
  MiddleMatrix mm = middleMatrix(hq, BorderMode::Reduced);
  VarCounts counts = hq.q.counts();

  SignatureEstimate est;
  est.atXZero = atXZero;
  nmax = std::max(1, nmax);
  trials = std::max(1, trials);

  for (int n = 1; n <= nmax; ++n) {
    for (int trial = 0; trial < trials; ++trial) {
      bool zeroPoint = trial == 0;  // the zero tuple is always sampled first
      std::uint64_t trialSeed = mixSeed(seed, (static_cast<std::uint64_t>(n) << 32) | trial);
      EvalPoint pt = signatureSamplePoint(counts, atXZero, zeroPoint, n, trialSeed);
      auto [muP, muM] = eigencountsOf(evalMatrixPoly(mm.Z, pt));
      Rational rp(muP, n), rm(muM, n);
      if (rp > est.muPlusSup || rm > est.muMinusSup || (zeroPoint && n == 1)) {
        est.witnesses.push_back(SignatureWitness{trialSeed, n, zeroPoint, muP, muM});
      }
      est.muPlusSup = std::max(est.muPlusSup, rp);
      est.muMinusSup = std::max(est.muMinusSup, rm);
      if (muP >= n) est.positiveCountReachedN = true;
    }
  }
  return est;
}

ChsyReport chsyCodimension(const EvalPoint& pt, const Eigen::VectorXd& v,
                           const std::vector<Word>& monomials) {
  pt.validate();
  int n = pt.n();
  if (n < 1) throw std::invalid_argument("chsy_codimension: empty point");
  if (v.norm() == 0.0) throw std::invalid_argument("chsy_codimension: zero vector");
  std::uint32_t g = pt.X.g();
  if (g == 0) throw std::invalid_argument("chsy_codimension: no x variables to move");
  if (monomials.empty()) throw std::invalid_argument("chsy_codimension: no monomials");

  Evaluator ev(pt);
  Eigen::MatrixXd zs(n, monomials.size());
  VarCounts counts{pt.A.g(), g, 0};
  for (std::size_t i = 0; i < monomials.size(); ++i)
    zs.col(i) = ev.eval(NCPolynomial::monomial(1, monomials[i], counts)) * v;

  Eigen::JacobiSVD<Eigen::MatrixXd> zsvd(zs);
  double zmax = zsvd.singularValues().size() ? zsvd.singularValues()(0) : 0.0;
  std::size_t d = 0;
  for (int i = 0; i < zsvd.singularValues().size(); ++i)
    if (zsvd.singularValues()(i) > kEigSignTol * zmax) ++d;

  // columns over the basis of g-tuples of symmetric matrices
  std::size_t m = monomials.size();
  std::size_t rowsDim = static_cast<std::size_t>(g) * m * n;
  std::size_t colsDim = static_cast<std::size_t>(g) * n * (n + 1) / 2;
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(rowsDim, colsDim);
  std::size_t col = 0;
  for (std::uint32_t j = 0; j < g; ++j)
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
        E(r, c) = 1.0;
        E(c, r) = 1.0;
        for (std::size_t i = 0; i < m; ++i)
          map.block((static_cast<std::size_t>(j) * m + i) * n, col, n, 1) = E * zs.col(i);
        ++col;
      }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::size_t rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kEigSignTol * smax) ++rank;

  ChsyReport rep;
  rep.independentCount = d;
  rep.targetDim = rowsDim;
  rep.rank = rank;
  rep.codimension = rowsDim - rank;
  rep.bound = static_cast<unsigned long long>(g) * d * (d - (d ? 1 : 0)) / 2;
  return rep;
}

unsigned long long ngd(std::uint32_t g, std::uint32_t d) {
  unsigned long long sum = 0, pow = 1;
  for (std::uint32_t j = 0; j <= d; ++j) {
    if (sum > std::numeric_limits<unsigned long long>::max() - pow)
      throw std::overflow_error("ngd: overflow");
    sum += pow;
    if (j < d) {
      if (g != 0 && pow > std::numeric_limits<unsigned long long>::max() / std::max(1u, g))
        throw std::overflow_error("ngd: overflow");
      pow *= g;
    }
  }
  return sum;
}

RankProbeReport genericRankProbe(const NCPolynomial& q, int nmax, int trials,
                                 std::uint64_t seed) {
  if (q.isZero()) throw std::invalid_argument("generic_rank_probe: zero polynomial");
  const VarCounts& counts = q.counts();
  RankProbeReport rep;
  for (int n = 1; n <= std::max(1, nmax); ++n) {
    RankProbeRow row{n, std::max(1, trials), 0};
    for (int t = 0; t < row.trials; ++t) {
      std::uint64_t s = mixSeed(seed, (static_cast<std::uint64_t>(n) << 32) | t);
      EvalPoint pt;
      pt.A = sampleTuple(DomainSpec::all(), counts.a, n, mixSeed(s, 0));
      pt.X = sampleTuple(DomainSpec::all(), counts.x, n, mixSeed(s, 1));
      if (q.containsClass(VarClass::H))
        pt.H = sampleTuple(DomainSpec::all(), counts.h, n, mixSeed(s, 2));
      Eigen::MatrixXd val = evalPoly(q, pt);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(val);
      double smax = svd.singularValues()(0);
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      if (smax > 0 && smin > kEigSignTol * smax) ++row.fullRank;
    }
    if (row.fullRank < row.trials) rep.alwaysFullRank = false;
    rep.rows.push_back(row);
  }
  return rep;
}

FaithfulnessProbe faithfulnessProbe(const NCPolynomial& p, int n, int samples,
                                    std::uint64_t seed) {
  FaithfulnessProbe probe;
  probe.samples = samples;
  const VarCounts& counts = p.counts();
  for (int s = 0; s < samples; ++s) {
    std::uint64_t ts = mixSeed(seed, static_cast<std::uint64_t>(s));
    EvalPoint pt;
    pt.A = sampleTuple(DomainSpec::all(), counts.a, n, mixSeed(ts, 0));
    pt.X = sampleTuple(DomainSpec::all(), counts.x, n, mixSeed(ts, 1));
    if (p.containsClass(VarClass::H))
      pt.H = sampleTuple(DomainSpec::all(), counts.h, n, mixSeed(ts, 2));
    if (maxAbs(evalPoly(p, pt)) > 1e-9) ++probe.nonzeroCount;
  }
  probe.nonzeroFound = probe.nonzeroCount > 0;
  return probe;
}

int defaultNmax(const NCPolynomial& p) {
  auto bd = p.bidegree();
  std::uint32_t g = p.counts().a + p.counts().x;
  std::uint32_t d = bd.a + bd.x;
  unsigned long long cap = 16;
  try {
    cap = std::min<unsigned long long>(16, ngd(std::max(1u, g), d));
  } catch (const std::overflow_error&) {
    cap = 16;
  }
  return static_cast<int>(std::max<unsigned long long>(1, cap));
}

}  // namespace ncx
