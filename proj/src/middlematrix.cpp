#include "ncx/middlematrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ncx {

namespace {

struct SplitWord {
  Word left;    // h_j * u^T
  Word right;   // h_k * v
  Word middle;  // z
};

// Split u*h_j*z*h_k*v at its two H letters.
SplitWord splitAtDirections(const Word& w) {
  const auto& ls = w.letters();
  std::size_t first = ls.size(), second = ls.size();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i].cls != VarClass::H) continue;
    if (first == ls.size())
      first = i;
    else if (second == ls.size())
      second = i;
    else
      throw std::invalid_argument("word has more than two direction letters");
  }
  if (second == ls.size())
    throw std::invalid_argument("word is not homogeneous of degree two in the direction");

  Word u = w.subword(0, first);
  Word z = w.subword(first + 1, second - first - 1);
  Word v = w.subword(second + 1, ls.size() - second - 1);

  std::vector<Letter> left;
  left.push_back(ls[first]);
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it) left.push_back(*it);

  std::vector<Letter> right;
  right.push_back(ls[second]);
  for (const Letter& l : v.letters()) right.push_back(l);

  return SplitWord{Word(std::move(left)), Word(std::move(right)), std::move(z)};
}

void requireDegreeTwoHomogeneous(const HessianPoly& q) {
  for (const auto& [w, c] : q.q.terms())
    if (w.degree(VarClass::H) != 2)
      throw std::invalid_argument("polynomial is not homogeneous of degree two in the direction");
}

// Border sort key: block by deg_x of m, then canonical order of the
// transposed entry (m^T followed by the direction letter).
struct BorderLess {
  bool operator()(const Word& lhs, const Word& rhs) const {
    std::uint32_t bl = lhs.degree(VarClass::X), br = rhs.degree(VarClass::X);
    if (bl != br) return bl < br;
    return lhs.reversed() < rhs.reversed();
  }
};

// All words in a,x with exactly degX x-letters and a-degree <= capA, appended
// behind the direction letter h_j for every j.
void enumerateBlock(std::uint32_t gA, std::uint32_t gX, std::uint32_t gH, std::uint32_t capA,
                    std::uint32_t degX, std::vector<Word>& out) {
  std::vector<Letter> current;
  auto rec = [&](auto&& self, std::uint32_t xLeft, std::uint32_t aLeft) -> void {
    if (xLeft == 0) {
      // a-tail choices already emitted along the way; emit entry per h index
      for (std::uint32_t j = 1; j <= gH; ++j) {
        std::vector<Letter> entry;
        entry.push_back(Letter{VarClass::H, j});
        entry.insert(entry.end(), current.begin(), current.end());
        out.push_back(Word(std::move(entry)));
      }
      if (aLeft > 0) {
        for (std::uint32_t i = 1; i <= gA; ++i) {
          current.push_back(Letter{VarClass::A, i});
          self(self, 0, aLeft - 1);
          current.pop_back();
        }
      }
      return;
    }
    // either place an a-letter (if budget remains) or an x-letter
    if (aLeft > 0) {
      for (std::uint32_t i = 1; i <= gA; ++i) {
        current.push_back(Letter{VarClass::A, i});
        self(self, xLeft, aLeft - 1);
        current.pop_back();
      }
    }
    for (std::uint32_t k = 1; k <= gX; ++k) {
      current.push_back(Letter{VarClass::X, k});
      self(self, xLeft - 1, aLeft);
      current.pop_back();
    }
    return;
  };
  rec(rec, degX, capA);
}

BorderVector makeBorder(std::vector<Word> entries, BorderMode mode, VarCounts counts) {
  std::sort(entries.begin(), entries.end(), BorderLess{});
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  std::uint32_t maxBlock = 0;
  for (const Word& w : entries) maxBlock = std::max(maxBlock, w.degree(VarClass::X));
  std::vector<std::size_t> offsets(maxBlock + 2, 0);
  for (const Word& w : entries) ++offsets[w.degree(VarClass::X) + 1];
  for (std::size_t k = 1; k < offsets.size(); ++k) offsets[k] += offsets[k - 1];
  return BorderVector(std::move(entries), std::move(offsets), mode, counts);
}

std::vector<Word> occurringSplits(const HessianPoly& q) {
  std::vector<Word> occ;
  for (const auto& [w, c] : q.q.terms()) {
    SplitWord s = splitAtDirections(w);
    occ.push_back(s.left);
    occ.push_back(s.right);
  }
  return occ;
}

}  // namespace

BorderVector::BorderVector(std::vector<Word> entries, std::vector<std::size_t> blockOffsets,
                           BorderMode mode, VarCounts counts)
    : entries_(std::move(entries)),
      blockOffsets_(std::move(blockOffsets)),
      mode_(mode),
      counts_(counts) {}

std::optional<std::size_t> BorderVector::indexOf(const Word& w) const {
  std::uint32_t block = w.degree(VarClass::X);
  if (block + 1 >= blockOffsets_.size()) return std::nullopt;
  auto first = entries_.begin() + blockOffsets_[block];
  auto last = entries_.begin() + blockOffsets_[block + 1];
  auto it = std::lower_bound(first, last, w, BorderLess{});
  if (it != last && *it == w) return static_cast<std::size_t>(it - entries_.begin());
  return std::nullopt;
}

MatrixPoly BorderVector::asColumn() const {
  MatrixPoly col(entries_.size(), 1, counts_);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    col.at(i, 0) = NCPolynomial::monomial(1, entries_[i], counts_);
  return col;
}

MatrixPoly BorderVector::asColumn(VarClass repl) const {
  MatrixPoly col(entries_.size(), 1, counts_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    std::vector<Letter> ls = entries_[i].letters();
    ls[0] = Letter{repl, ls[0].index};
    col.at(i, 0) = NCPolynomial::monomial(1, Word(std::move(ls)), counts_);
  }
  return col;
}

unsigned long long fullBlockHeight(std::uint32_t gA, std::uint32_t gX, std::uint32_t capA,
                                   std::uint32_t j) {
  // g_x^{j+1} * sum_{s<=capA} C(j+s, j) g_a^s
  unsigned long long xPart = 1;
  for (std::uint32_t i = 0; i <= j; ++i) xPart *= gX;
  unsigned long long sum = 0, gaPow = 1;
  for (std::uint32_t s = 0; s <= capA; ++s) {
    unsigned long long comb = 1;
    for (std::uint32_t i = 1; i <= j; ++i) comb = comb * (s + i) / i;
    sum += comb * gaPow;
    gaPow *= gA;
  }
  return xPart * sum;
}

BorderVector borderVectorFull(const HessianPoly& q, std::uint32_t capA, std::uint32_t capX) {
  requireDegreeTwoHomogeneous(q);
  VarCounts counts = q.q.counts();
  std::vector<Word> entries;
  for (std::uint32_t j = 0; j <= capX; ++j)
    enumerateBlock(counts.a, counts.x, counts.h, capA, j, entries);
  return makeBorder(std::move(entries), BorderMode::Full, counts);
}

BorderVector borderVector(const HessianPoly& q, BorderMode mode) {
  requireDegreeTwoHomogeneous(q);
  VarCounts counts = q.q.counts();
  if (q.q.isZero())
    throw std::invalid_argument("border_vector: the zero polynomial has no border");

  if (mode == BorderMode::Full) {
    auto bd = q.q.bidegree();
    return borderVectorFull(q, bd.a, bd.x);
  }

  std::vector<Word> occ = occurringSplits(q);
  if (mode == BorderMode::Minimal) return makeBorder(std::move(occ), mode, counts);

  // Reduced: close the occurring set to the full grid at its degree bounds.
  std::uint32_t betaA = 0, betaX = 0;
  for (const Word& w : occ) {
    betaA = std::max(betaA, w.degree(VarClass::A));
    betaX = std::max(betaX, w.degree(VarClass::X));
  }
  std::vector<Word> entries;
  for (std::uint32_t j = 0; j <= betaX; ++j)
    enumerateBlock(counts.a, counts.x, counts.h, betaA, j, entries);
  return makeBorder(std::move(entries), BorderMode::Reduced, counts);
}

MiddleMatrix middleMatrix(const HessianPoly& q, const BorderVector& border) {
  requireDegreeTwoHomogeneous(q);
  VarCounts counts = q.q.counts();
  MatrixPoly Z(border.size(), border.size(), counts);
  for (const auto& [w, c] : q.q.terms()) {
    SplitWord s = splitAtDirections(w);
    auto row = border.indexOf(s.left);
    auto col = border.indexOf(s.right);
    if (!row || !col)
      throw std::invalid_argument("border too small for the given polynomial");
    Z.at(*row, *col).addTerm(s.middle, c);
  }
  return MiddleMatrix{border, std::move(Z)};
}

MiddleMatrix middleMatrix(const HessianPoly& q, BorderMode mode) {
  return middleMatrix(q, borderVector(q, mode));
}

MiddleMatrix derivedMatrix(const MiddleMatrix& m) {
  VarCounts counts = m.Z.counts();
  std::vector<NCPolynomial> zeros(counts.x, NCPolynomial::zero(counts));
  return MiddleMatrix{m.border, m.Z.substituted(VarClass::X, zeros)};
}

MatrixPoly MiddleMatrix::blockView(std::size_t i, std::size_t j) const {
  return Z.block(border.blockOffset(i), border.blockOffset(j), border.blockSize(i),
                 border.blockSize(j));
}

NCPolynomial borderQuadraticForm(const BorderVector& border, const MatrixPoly& Z) {
  MatrixPoly col = border.asColumn();
  MatrixPoly res = col.transposed() * Z * col;
  return res.at(0, 0);
}

std::vector<MatrixPoly> kMatrices(const MiddleMatrix& m) {
  const BorderVector& border = m.border;
  VarCounts counts = m.Z.counts();
  std::vector<MatrixPoly> Ks;
  if (border.blockCount() < 2) return Ks;

  for (std::size_t j = 0; j + 1 < border.blockCount(); ++j) {
    MatrixPoly K(border.blockSize(j + 1), border.blockSize(j), counts);
    for (std::size_t r = 0; r < border.blockSize(j + 1); ++r) {
      std::size_t rowIndex = border.blockOffset(j + 1) + r;
      if (m.Z.columnIsZero(rowIndex)) continue;  // bookkeeping row, keep zero
      const Word& entry = border.entries()[rowIndex];
      const auto& ls = entry.letters();
      // entry = h_s * alpha * x_t * rest, alpha the maximal pure-a prefix
      std::uint32_t s = ls[0].index;
      std::size_t xPos = 1;
      while (xPos < ls.size() && ls[xPos].cls == VarClass::A) ++xPos;
      if (xPos >= ls.size() || ls[xPos].cls != VarClass::X) continue;  // no x letter
      std::uint32_t t = ls[xPos].index;
      std::vector<Letter> colLetters;
      colLetters.push_back(Letter{VarClass::H, t});
      for (std::size_t i = xPos + 1; i < ls.size(); ++i) colLetters.push_back(ls[i]);
      auto colIndex = border.indexOf(Word(std::move(colLetters)));
      if (!colIndex)
        throw std::logic_error("k_matrices: column monomial missing from border");
      std::vector<Letter> entryLetters;
      entryLetters.push_back(Letter{VarClass::X, s});
      for (std::size_t i = 1; i < xPos; ++i) entryLetters.push_back(ls[i]);
      std::size_t c = *colIndex - border.blockOffset(j);
      K.at(r, c).addTerm(Word(std::move(entryLetters)), 1);
    }
    Ks.push_back(std::move(K));
  }
  return Ks;
}

CongruenceData congruence(const MiddleMatrix& m) {
  const BorderVector& border = m.border;
  VarCounts counts = m.Z.counts();
  std::size_t n = border.size();
  if (!(m.Z == m.Z.transposed()))
    throw std::invalid_argument("congruence: requires the middle matrix of a symmetric Hessian");
  std::vector<MatrixPoly> Ks = kMatrices(m);

  MatrixPoly A = MatrixPoly::identity(n, counts);
  for (std::size_t j = 0; j < Ks.size(); ++j) {
    MatrixPoly negK = Rational(-1) * Ks[j];
    A.setBlock(border.blockOffset(j + 1), border.blockOffset(j), negK);
  }

  MiddleMatrix derived = derivedMatrix(m);
  if (!(m.Z * A == derived.Z))
    throw std::logic_error("congruence: recursion identity failed (malformed middle matrix)");

  // B = sum_j (1/2 choose j) (A-I)^j, Binv with (-1/2 choose j); both finite
  // because (A-I) is nilpotent of order <= number of blocks.
  MatrixPoly N = A - MatrixPoly::identity(n, counts);
  MatrixPoly B(n, n, counts), Binv(n, n, counts);
  MatrixPoly Npow = MatrixPoly::identity(n, counts);
  std::size_t blocks = border.blockCount();
  for (std::size_t j = 0; j < blocks; ++j) {
    if (j > 0) {
      Npow = Npow * N;
      if (Npow.isZero()) break;
    }
    B = B + halfBinomial(static_cast<unsigned>(j)) * Npow;
    Binv = Binv + negHalfBinomial(static_cast<unsigned>(j)) * Npow;
  }
  return CongruenceData{std::move(Ks), std::move(A), std::move(B), std::move(Binv)};
}

}  // namespace ncx
