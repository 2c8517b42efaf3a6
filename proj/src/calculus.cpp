#include "ncx/calculus.hpp"

#include <stdexcept>

namespace ncx {

namespace {

HessianPoly partialHessian(const NCPolynomial& p, VarClass cls) {
  if (p.containsClass(VarClass::H))
    throw std::invalid_argument("partial hessian: input already contains direction letters");

  VarCounts counts = p.counts();
  counts.h = counts.of(cls);
  NCPolynomial q(counts);

  for (const auto& [w, c] : p.terms()) {
    const auto& ls = w.letters();
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < ls.size(); ++i)
      if (ls[i].cls == cls) positions.push_back(i);
    // 2 * sum over unordered pairs of positions, both replaced by h.
    for (std::size_t a = 0; a < positions.size(); ++a)
      for (std::size_t b = a + 1; b < positions.size(); ++b) {
        std::vector<Letter> repl = ls;
        repl[positions[a]] = Letter{VarClass::H, ls[positions[a]].index};
        repl[positions[b]] = Letter{VarClass::H, ls[positions[b]].index};
        q.addTerm(Word(std::move(repl)), 2 * c);
      }
  }

  auto bd = p.bidegree();
  return HessianPoly{std::move(q), cls, bd.a, bd.x};
}

}  // namespace

HessianPoly partialHessianX(const NCPolynomial& p) { return partialHessian(p, VarClass::X); }

HessianPoly partialHessianA(const NCPolynomial& p) { return partialHessian(p, VarClass::A); }

NCPolynomial homogeneousPart(const NCPolynomial& p, std::uint32_t degA, std::uint32_t degX) {
  NCPolynomial out(p.counts());
  for (const auto& [w, c] : p.terms())
    if (w.degree(VarClass::A) == degA && w.degree(VarClass::X) == degX) out.addTerm(w, c);
  return out;
}

DegreeTwoSplit degreeTwoSplit(const NCPolynomial& p) {
  if (p.degree(VarClass::X) > 2)
    throw std::invalid_argument("degree_two_split: polynomial has degree > 2 in x");
  NCPolynomial hess(p.counts());
  for (const auto& [w, c] : p.terms())
    if (w.degree(VarClass::X) == 2) hess.addTerm(w, c);
  NCPolynomial linear = p - hess;
  return DegreeTwoSplit{std::move(hess), std::move(linear)};
}

}  // namespace ncx
