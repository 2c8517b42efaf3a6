#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncx/freealg.hpp"

namespace ncx {

// Symmetry validation tolerance for loaded/constructed tuples.
inline constexpr double kSymmetryTol = 1e-12;

// g symmetric n x n real matrices.
struct MatrixTuple {
  int n = 0;
  std::vector<Eigen::MatrixXd> mats;

  static MatrixTuple zero(std::uint32_t g, int n);
  std::uint32_t g() const { return static_cast<std::uint32_t>(mats.size()); }
  void validate() const;  // square, shared dimension, symmetric to 1e-12
};

// Which tuple the direction letters (class H) evaluate to.
enum class DirectionSlot { H, K };

struct EvalPoint {
  MatrixTuple A;  // g_a matrices
  MatrixTuple X;  // g_x matrices
  std::optional<MatrixTuple> H;  // direction in x
  std::optional<MatrixTuple> K;  // direction in a

  int n() const;
  void validate() const;
};

// Word-by-word evaluation with prefix-product caching shared across calls.
class Evaluator {
 public:
  Evaluator(const EvalPoint& pt, DirectionSlot slot = DirectionSlot::H);
  Eigen::MatrixXd eval(const NCPolynomial& p);
  Eigen::MatrixXd evalMatrix(const MatrixPoly& m);

 private:
  const Eigen::MatrixXd& evalWord(const Word& w);
  const Eigen::MatrixXd& letterMatrix(const Letter& l) const;

  const EvalPoint& pt_;
  DirectionSlot slot_;
  int n_;
  std::map<Word, Eigen::MatrixXd> cache_;
};

Eigen::MatrixXd evalPoly(const NCPolynomial& p, const EvalPoint& pt,
                         DirectionSlot slot = DirectionSlot::H);
Eigen::MatrixXd evalMatrixPoly(const MatrixPoly& m, const EvalPoint& pt,
                               DirectionSlot slot = DirectionSlot::H);

EvalPoint directSum(const EvalPoint& p1, const EvalPoint& p2);
EvalPoint tensorIdentity(const EvalPoint& pt, std::uint32_t ell);
MatrixTuple directSum(const MatrixTuple& t1, const MatrixTuple& t2);
MatrixTuple tensorIdentity(const MatrixTuple& t, std::uint32_t ell);

// Predicate-defined sampling domains.
struct DomainSpec {
  enum class Kind { All, NormBall, EpsilonNeighborhood, Product };
  Kind kind = Kind::All;
  double radius = 1.0;    // NormBall: sum A_j^2 < r^2 I
  double epsilon = 1.0;   // EpsilonNeighborhood: sum A_j^2 < eps I
  VarClass cls = VarClass::X;
  std::vector<DomainSpec> parts;  // Product

  static DomainSpec all(VarClass c = VarClass::X);
  static DomainSpec normBall(double r, VarClass c = VarClass::X);
  static DomainSpec epsilonNeighborhood(double eps, VarClass c = VarClass::X);
  static DomainSpec product(std::vector<DomainSpec> parts);

  // The component constraining a given variable class (All if absent).
  const DomainSpec& componentFor(VarClass c) const;
  bool contains(const MatrixTuple& t) const;
  double boundSquared() const;  // r^2 or eps; +inf for All
};

// GOE-style symmetric draws, deterministic per seed; norm-ball domains rescale
// into the ball with a strict margin rather than rejecting.
MatrixTuple sampleTuple(const DomainSpec& domain, std::uint32_t g, int n, std::uint64_t seed);

// Seed mixing for per-trial streams.
std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream);

// JSON wire format: {"n": int, "mats": [[row-major doubles], ...]}.
std::string matrixTupleToJson(const MatrixTuple& t);
MatrixTuple matrixTupleFromJson(const std::string& text);

double maxAbs(const Eigen::MatrixXd& m);

}  // namespace ncx
