#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncx/middlematrix.hpp"
#include "ncx/numeval.hpp"

namespace ncx {

// Eigenvalue thresholds: violations must clear 1e-7, sign decisions use 1e-8
// relative to the spectral norm.
inline constexpr double kViolationTol = 1e-7;
inline constexpr double kEigSignTol = 1e-8;
inline constexpr double kPsdTol = 1e-8;

// The input polynomial fails a hypothesis of the requested structure theorem
// (a required Gram is not PSD, or a forbidden monomial is present). Distinct
// from usage errors: this is a negative finding about the polynomial.
struct HypothesisViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Witness {
  std::uint64_t seed = 0;  // per-trial seed; the sample is reproducible from it
  int trial = -1;
  int n = 0;
  double t = 0.5;          // segment parameter (midpoint test only)
  double violation = 0.0;  // most negative eigenvalue of the defect matrix
  std::string kind;        // "midpoint" | "hessian"
};

struct ConvexityVerdict {
  enum class Status { ConvexCertified, NotConvex, DegreeObstruction, PositivitySampled,
                      Inconclusive };
  Status status = Status::Inconclusive;
  std::optional<Witness> witness;
  std::uint32_t obstructionDegree = 0;
  int samples = 0;
  double minEig = 0.0;
  std::string notes;
};

// Midpoint/segment test of the convexity inequality. Shortcuts to
// DegreeObstruction when deg_x(p) >= 3 (convexity on an open domain forces
// degree <= 2 in x); otherwise randomized falsification only.
ConvexityVerdict midpointConvexityTest(const NCPolynomial& p, const DomainSpec& domain,
                                       int trials, int nmax, std::uint64_t seed);

// Samples the evaluated partial Hessian and looks for a negative eigenvalue.
ConvexityVerdict hessianPositivityTest(const NCPolynomial& p, const DomainSpec& domain,
                                       int trials, int nmax, std::uint64_t seed);

// Recompute a stored witness's violation from its seed.
double reproduceWitness(const NCPolynomial& p, const DomainSpec& domain, const Witness& w);

// The sampled tuples behind a witness, for reporting. For a midpoint witness
// Y is the second endpoint; for a hessian witness Y holds the direction.
struct WitnessSample {
  MatrixTuple A, X, Y;
  double t = 0.5;
};
WitnessSample reproduceWitnessSample(const NCPolynomial& p, const DomainSpec& domain,
                                     const Witness& w);

// Exact symmetric Gram over a fixed monomial basis: basis^T gram basis == the
// matched polynomial, entrywise rational. factor is a numeric thin factor.
struct GramBlock {
  std::vector<Word> basis;
  MatrixPoly gram;
  Eigen::MatrixXd factor;
  double minEig = 0.0;
};

struct NumericPoly {
  std::map<Word, double> terms;
};

struct SampledCertificate {
  bool checked = false;
  bool holds = false;
  bool certified = false;  // constant-matrix case: a single exact-style check
  int samples = 0;
  double minEig = 0.0;
  std::uint64_t seed = 0;
};

struct Decomposition {
  enum class Form { VzvL, SosL, ConvexConcave, SeparateConvex, LocalRq };
  Form form = Form::VzvL;
  std::string method;

  NCPolynomial L;         // exact remainder
  NCPolynomial residual;  // exact recomposition defect; identically zero

  std::optional<MiddleMatrix> middle;        // VzvL / SosL: Z with its border
  std::optional<Eigen::MatrixXd> sosFactor;  // constant-Z factor R, R^T R = Z

  std::vector<std::pair<std::string, GramBlock>> grams;
  std::vector<NumericPoly> lambdaPos;  // square-vector entries (numeric coefficients)
  std::vector<NumericPoly> lambdaNeg;  // negative squares (convex-concave)

  std::optional<MatrixPoly> Rmat, Qmat;       // local R/Q form over W(x)
  std::optional<MatrixPoly> qBlockGram;       // exact block Gram of Q
  std::optional<Eigen::MatrixXd> qBlockFactor;

  double numericResidual = 0.0;  // coefficient-wise defect of the numeric factors
  SampledCertificate certificate;
};

// p = 1/2 V(a)[x]^T Z(a) V(a)[x] + L with deg_x(L) <= 1, recomposition exact;
// attaches a sampled PSD certificate of Z over the a-component of the domain.
// Pre: p symmetric, deg_x(p) <= 2.
Decomposition decomposeConvexInX(const NCPolynomial& p, const DomainSpec& domain,
                                 int samples = 100, std::uint64_t seed = 0,
                                 double tol = kPsdTol);

// Eigen-factorization of a constant symmetric matrix: thin R with R^T R = Z
// after clipping eigenvalues in (-tol, 0]; throws when an eigenvalue < -tol.
Eigen::MatrixXd sosFactorConstant(const Eigen::MatrixXd& Z, double tol = kPsdTol);

// p = L + Lambda^T Lambda with Lambda entries of bidegree <= (1,1); exact
// residual at the Gram level. Pre: p symmetric, bidegree <= (2,2).
Decomposition decomposeSeparatelyConvex(const NCPolynomial& p, double tol = kPsdTol);

// p = L + R(x)^T R(x) - S(a)^T S(a), L of bidegree <= (1,1).
Decomposition decomposeConvexConcave(const NCPolynomial& p, double tol = kPsdTol);

// p = W(x)^T (R(a) - Q(a)) W(x) over W(x) = (1, x_1..x_g); R of degree <= 1,
// Q homogeneous of degree two with a PSD block Gram (hence a sum of squares).
Decomposition localRqForm(const NCPolynomial& p, int samples = 100, std::uint64_t seed = 0,
                          double tol = kPsdTol);

struct SignatureWitness {
  std::uint64_t seed = 0;
  int n = 0;
  bool zeroPoint = false;
  int muPlus = 0, muMinus = 0;
};

struct SignatureEstimate {
  Rational muPlusSup{0}, muMinusSup{0};  // best mu/n found: lower bounds on sigma+-
  std::vector<SignatureWitness> witnesses;
  bool atXZero = false;
  bool positiveCountReachedN = false;  // found a sample with mu+ >= n (deg_x >= 3 check)
};

// Eigenvalue counts of the evaluated middle matrix of the x-Hessian; the sup
// of mu/n is a certified lower bound on the SDS signature. Sampling always
// includes the zero point. Pre: p symmetric, deg_x(p) >= 2.
SignatureEstimate signatureEstimate(const NCPolynomial& p, bool atXZero, int nmax, int trials,
                                    std::uint64_t seed);

// (mu+, mu-) of the evaluated middle matrix of the x-Hessian of p at a point.
std::pair<int, int> middleMatrixEigencounts(const NCPolynomial& p, const EvalPoint& pt);

// Rebuild a signature witness's sample point from its seed and recount.
std::pair<int, int> reproduceSignatureWitness(const NCPolynomial& p, bool atXZero,
                                              const SignatureWitness& w);

// Exact SDS fixture: hessian == sum w_j f_j^T f_j - sum u_l g_l^T g_l.
struct SdsForm {
  std::vector<std::pair<Rational, NCPolynomial>> positives;
  std::vector<std::pair<Rational, NCPolynomial>> negatives;
  NCPolynomial recompose(VarCounts counts) const;
};

struct ChsyReport {
  std::size_t independentCount = 0;  // d: numeric rank of {m(A,X)v}
  std::size_t codimension = 0;       // gnd - rank of H -> V[H]v
  unsigned long long bound = 0;      // g d(d-1)/2
  std::size_t targetDim = 0;
  std::size_t rank = 0;
};

ChsyReport chsyCodimension(const EvalPoint& pt, const Eigen::VectorXd& v,
                           const std::vector<Word>& monomials);

// N(g,d) = sum_{j=0}^{d} g^j; throws on overflow.
unsigned long long ngd(std::uint32_t g, std::uint32_t d);

struct RankProbeRow {
  int n = 0;
  int trials = 0;
  int fullRank = 0;
};

struct RankProbeReport {
  std::vector<RankProbeRow> rows;
  bool alwaysFullRank = true;
};

// Empirical evidence for generic invertibility of q on symmetric tuples.
RankProbeReport genericRankProbe(const NCPolynomial& q, int nmax, int trials,
                                 std::uint64_t seed);

struct FaithfulnessProbe {
  bool nonzeroFound = false;
  int nonzeroCount = 0;
  int samples = 0;
};

// Evaluates p at `samples` random points of dimension n; a flag, never an error.
FaithfulnessProbe faithfulnessProbe(const NCPolynomial& p, int n, int samples,
                                    std::uint64_t seed);

// Default sampling dimension cap: N(g, d) over all variables, capped at 16.
int defaultNmax(const NCPolynomial& p);

}  // namespace ncx
