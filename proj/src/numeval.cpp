#include "ncx/numeval.hpp"

#include <Eigen/Eigenvalues>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace ncx {

double maxAbs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

MatrixTuple MatrixTuple::zero(std::uint32_t g, int n) {
  MatrixTuple t;
  t.n = n;
  t.mats.assign(g, Eigen::MatrixXd::Zero(n, n));
  return t;
}

void MatrixTuple::validate() const {
  for (const auto& m : mats) {
    if (m.rows() != n || m.cols() != n)
      throw std::invalid_argument("matrix tuple: dimension mismatch");
    double scale = std::max(1.0, maxAbs(m));
    if (maxAbs(m - m.transpose()) > kSymmetryTol * scale)
      throw std::invalid_argument("matrix tuple: matrix is not symmetric");
  }
}

int EvalPoint::n() const {
  if (!A.mats.empty()) return A.n;
  if (!X.mats.empty()) return X.n;
  if (H && !H->mats.empty()) return H->n;
  if (K && !K->mats.empty()) return K->n;
  return std::max(A.n, X.n);
}

void EvalPoint::validate() const {
  A.validate();
  X.validate();
  if (H) H->validate();
  if (K) K->validate();
  int dim = n();
  auto checkDim = [&](const MatrixTuple& t) {
    if (!t.mats.empty() && t.n != dim)
      throw std::invalid_argument("evaluation point: tuples have different dimensions");
  };
  checkDim(A);
  checkDim(X);
  if (H) checkDim(*H);
  if (K) checkDim(*K);
}

Evaluator::Evaluator(const EvalPoint& pt, DirectionSlot slot)
    : pt_(pt), slot_(slot), n_(pt.n()) {
  if (n_ <= 0) throw std::invalid_argument("evaluation point has no dimension");
}

const Eigen::MatrixXd& Evaluator::letterMatrix(const Letter& l) const {
  const MatrixTuple* t = nullptr;
  switch (l.cls) {
    case VarClass::A: t = &pt_.A; break;
    case VarClass::X: t = &pt_.X; break;
    case VarClass::H:
      if (slot_ == DirectionSlot::H) {
        if (!pt_.H) throw std::invalid_argument("missing direction tuple H");
        t = &*pt_.H;
      } else {
        if (!pt_.K) throw std::invalid_argument("missing direction tuple K");
        t = &*pt_.K;
      }
      break;
  }
  if (l.index == 0 || l.index > t->mats.size())
    throw std::out_of_range("letter index exceeds tuple size");
  return t->mats[l.index - 1];
}

const Eigen::MatrixXd& Evaluator::evalWord(const Word& w) {
  auto it = cache_.find(w);
  if (it != cache_.end()) return it->second;
  Eigen::MatrixXd value;
  if (w.empty()) {
    value = Eigen::MatrixXd::Identity(n_, n_);
  } else {
    Word prefix = w.subword(0, w.size() - 1);
    value = evalWord(prefix) * letterMatrix(w.letters().back());
  }
  return cache_.emplace(w, std::move(value)).first->second;
}

Eigen::MatrixXd Evaluator::eval(const NCPolynomial& p) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& [w, c] : p.terms()) acc += toDouble(c) * evalWord(w);
  return acc;
}

Eigen::MatrixXd Evaluator::evalMatrix(const MatrixPoly& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows() * n_, m.cols() * n_);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const NCPolynomial& e = m.at(i, j);
      if (e.isZero()) continue;
      out.block(i * n_, j * n_, n_, n_) = eval(e);
    }
  return out;
}

Eigen::MatrixXd evalPoly(const NCPolynomial& p, const EvalPoint& pt, DirectionSlot slot) {
  Evaluator ev(pt, slot);
  return ev.eval(p);
}

Eigen::MatrixXd evalMatrixPoly(const MatrixPoly& m, const EvalPoint& pt, DirectionSlot slot) {
  Evaluator ev(pt, slot);
  return ev.evalMatrix(m);
}

MatrixTuple directSum(const MatrixTuple& t1, const MatrixTuple& t2) {
  if (t1.g() != t2.g()) throw std::invalid_argument("direct sum: varcount mismatch");
  MatrixTuple out;
  out.n = t1.n + t2.n;
  for (std::size_t j = 0; j < t1.mats.size(); ++j) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(out.n, out.n);
    m.topLeftCorner(t1.n, t1.n) = t1.mats[j];
    m.bottomRightCorner(t2.n, t2.n) = t2.mats[j];
    out.mats.push_back(std::move(m));
  }
  return out;
}

EvalPoint directSum(const EvalPoint& p1, const EvalPoint& p2) {
  if ((p1.H.has_value() != p2.H.has_value()) || (p1.K.has_value() != p2.K.has_value()))
    throw std::invalid_argument("direct sum: direction tuples present on one side only");
  EvalPoint out;
  out.A = directSum(p1.A, p2.A);
  out.X = directSum(p1.X, p2.X);
  if (p1.H) out.H = directSum(*p1.H, *p2.H);
  if (p1.K) out.K = directSum(*p1.K, *p2.K);
  return out;
}

MatrixTuple tensorIdentity(const MatrixTuple& t, std::uint32_t ell) {
  if (ell == 0) throw std::invalid_argument("tensor_identity: ell must be >= 1");
  MatrixTuple out;
  out.n = t.n * static_cast<int>(ell);
  for (const auto& m : t.mats) {
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(out.n, out.n);
    for (std::uint32_t k = 0; k < ell; ++k)
      for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) big(i * ell + k, j * ell + k) = m(i, j);
    out.mats.push_back(std::move(big));
  }
  return out;
}

EvalPoint tensorIdentity(const EvalPoint& pt, std::uint32_t ell) {
  EvalPoint out;
  out.A = tensorIdentity(pt.A, ell);
  out.X = tensorIdentity(pt.X, ell);
  if (pt.H) out.H = tensorIdentity(*pt.H, ell);
  if (pt.K) out.K = tensorIdentity(*pt.K, ell);
  return out;
}

DomainSpec DomainSpec::all(VarClass c) {
  DomainSpec d;
  d.kind = Kind::All;
  d.cls = c;
  return d;
}

DomainSpec DomainSpec::normBall(double r, VarClass c) {
  DomainSpec d;
  d.kind = Kind::NormBall;
  d.radius = r;
  d.cls = c;
  return d;
}

DomainSpec DomainSpec::epsilonNeighborhood(double eps, VarClass c) {
  DomainSpec d;
  d.kind = Kind::EpsilonNeighborhood;
  d.epsilon = eps;
  d.cls = c;
  return d;
}

DomainSpec DomainSpec::product(std::vector<DomainSpec> parts) {
  DomainSpec d;
  d.kind = Kind::Product;
  d.parts = std::move(parts);
  return d;
}

const DomainSpec& DomainSpec::componentFor(VarClass c) const {
  static const DomainSpec unconstrained = DomainSpec::all();
  if (kind == Kind::Product) {
    for (const DomainSpec& p : parts)
      if (p.cls == c) return p;
    return unconstrained;
  }
  return cls == c ? *this : unconstrained;
}

double DomainSpec::boundSquared() const {
  switch (kind) {
    case Kind::NormBall: return radius * radius;
    case Kind::EpsilonNeighborhood: return epsilon;
    default: return std::numeric_limits<double>::infinity();
  }
}

bool DomainSpec::contains(const MatrixTuple& t) const {
  if (kind == Kind::All) return true;
  if (kind == Kind::Product)
    throw std::invalid_argument("membership of a product domain is per-component");
  if (t.mats.empty()) return true;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(t.n, t.n);
  for (const auto& m : t.mats) s += m * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  double bound = boundSquared();
  return es.eigenvalues().maxCoeff() < bound * (1.0 - 1e-9);
}

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MatrixTuple sampleTuple(const DomainSpec& domain, std::uint32_t g, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixTuple t;
  t.n = n;
  for (std::uint32_t j = 0; j < g; ++j) {
    Eigen::MatrixXd raw(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) raw(r, c) = gauss(rng);
    t.mats.push_back(0.5 * (raw + raw.transpose()));
  }

  double bound = domain.boundSquared();
  if (std::isfinite(bound) && g > 0) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (const auto& m : t.mats) s += m * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    if (top > 0) {
      double factor = std::sqrt(bound * (1.0 - 1e-4) / top);
      for (auto& m : t.mats) m *= factor;
    }
  }
  return t;
}

std::string matrixTupleToJson(const MatrixTuple& t) {
  nlohmann::ordered_json j;
  j["n"] = t.n;
  j["mats"] = nlohmann::ordered_json::array();
  for (const auto& m : t.mats) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(t.n) * t.n);
    for (int r = 0; r < t.n; ++r)
      for (int c = 0; c < t.n; ++c) flat.push_back(m(r, c));
    j["mats"].push_back(flat);
  }
  return j.dump();
}

MatrixTuple matrixTupleFromJson(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MatrixTuple t;
  t.n = j.at("n").get<int>();
  if (t.n < 1) throw std::invalid_argument("matrix tuple: n must be >= 1");
  for (const auto& flat : j.at("mats")) {
    if (flat.size() != static_cast<std::size_t>(t.n) * t.n)
      throw std::invalid_argument("matrix tuple: wrong entry count");
    Eigen::MatrixXd m(t.n, t.n);
    std::size_t k = 0;
    for (int r = 0; r < t.n; ++r)
      for (int c = 0; c < t.n; ++c) m(r, c) = flat[k++].get<double>();
    t.mats.push_back(std::move(m));
  }
  t.validate();
  return t;
}

}  // namespace ncx
