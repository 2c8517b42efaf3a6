#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncx/rational.hpp"

namespace ncx {

// Letter classes of the free algebra R<a,x,h>. The order A < X < H fixes the
// canonical word order used for display and map iteration.
enum class VarClass : std::uint8_t { A = 0, X = 1, H = 2 };

inline char varClassChar(VarClass c) {
  switch (c) {
    case VarClass::A: return 'a';
    case VarClass::X: return 'x';
    case VarClass::H: return 'h';
  }
  return '?';
}

struct Letter {
  VarClass cls;
  std::uint32_t index;  // 1-based
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

struct VarCounts {
  std::uint32_t a = 0;
  std::uint32_t x = 0;
  std::uint32_t h = 0;

  std::uint32_t of(VarClass c) const {
    switch (c) {
      case VarClass::A: return a;
      case VarClass::X: return x;
      case VarClass::H: return h;
    }
    return 0;
  }
  friend bool operator==(const VarCounts&, const VarCounts&) = default;
};

// A word in the free monoid over the letters; the empty word is the identity.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> ls) : letters_(std::move(ls)) {}

  static Word identity() { return Word{}; }
  static Word single(VarClass c, std::uint32_t index) { return Word({Letter{c, index}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  // The involution on words: reverses letter order exactly.
  Word reversed() const {
    return Word(std::vector<Letter>(letters_.rbegin(), letters_.rend()));
  }

  Word concat(const Word& rhs) const {
    std::vector<Letter> out = letters_;
    out.insert(out.end(), rhs.letters_.begin(), rhs.letters_.end());
    return Word(std::move(out));
  }

  Word subword(std::size_t pos, std::size_t len) const {
    return Word(std::vector<Letter>(letters_.begin() + pos, letters_.begin() + pos + len));
  }

  std::uint32_t degree(VarClass c) const {
    std::uint32_t d = 0;
    for (const Letter& l : letters_)
      if (l.cls == c) ++d;
    return d;
  }

  // Canonical order: graded lexicographic (total degree, then letter sequence).
  friend std::strong_ordering operator<=>(const Word& lhs, const Word& rhs) {
    if (lhs.letters_.size() != rhs.letters_.size())
      return lhs.letters_.size() <=> rhs.letters_.size();
    for (std::size_t i = 0; i < lhs.letters_.size(); ++i) {
      auto c = lhs.letters_[i] <=> rhs.letters_[i];
      if (c != 0) return c;
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

// Exact-coefficient linear combination of words. Canonical: no zero
// coefficients stored, one entry per word.
class NCPolynomial {
 public:
  struct Bidegree {
    std::uint32_t a = 0, x = 0, h = 0;
    friend bool operator==(const Bidegree&, const Bidegree&) = default;
  };

  explicit NCPolynomial(VarCounts counts = {}) : counts_(counts) {}

  static NCPolynomial zero(VarCounts counts) { return NCPolynomial(counts); }

  static NCPolynomial constant(const Rational& c, VarCounts counts) {
    NCPolynomial p(counts);
    p.addTerm(Word::identity(), c);
    return p;
  }

  static NCPolynomial monomial(const Rational& c, const Word& w, VarCounts counts) {
    NCPolynomial p(counts);
    p.addTerm(w, c);
    return p;
  }

  static NCPolynomial variable(VarClass cls, std::uint32_t index, VarCounts counts) {
    return monomial(1, Word::single(cls, index), counts);
  }

  const VarCounts& counts() const { return counts_; }
  const std::map<Word, Rational>& terms() const { return terms_; }
  bool isZero() const { return terms_.empty(); }
  std::size_t termCount() const { return terms_.size(); }

  Rational coeff(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void addTerm(const Word& w, const Rational& c) {
    if (c == 0) return;
    validateWord(w);
    auto [it, inserted] = terms_.emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  NCPolynomial transposed() const {
    NCPolynomial out(counts_);
    for (const auto& [w, c] : terms_) out.terms_.emplace(w.reversed(), c);
    return out;
  }

  // Same terms under different declared counts (revalidates every word).
  NCPolynomial withCounts(VarCounts counts) const {
    NCPolynomial out(counts);
    for (const auto& [w, c] : terms_) out.addTerm(w, c);
    return out;
  }

  bool isSymmetric() const { return *this == transposed(); }

  Bidegree bidegree() const {
    Bidegree d;
    for (const auto& [w, c] : terms_) {
      d.a = std::max(d.a, w.degree(VarClass::A));
      d.x = std::max(d.x, w.degree(VarClass::X));
      d.h = std::max(d.h, w.degree(VarClass::H));
    }
    return d;
  }

  std::uint32_t degree(VarClass c) const {
    std::uint32_t d = 0;
    for (const auto& [w, co] : terms_) d = std::max(d, w.degree(c));
    return d;
  }

  bool containsClass(VarClass c) const {
    for (const auto& [w, co] : terms_)
      for (const Letter& l : w.letters())
        if (l.cls == c) return true;
    return false;
  }

  // Homomorphic replacement of every letter of `cls` by images[index-1].
  NCPolynomial substituted(VarClass cls, const std::vector<NCPolynomial>& images) const {
    if (images.size() != counts_.of(cls))
      throw std::invalid_argument("substitute: image list length does not match variable count");
    for (const NCPolynomial& im : images)
      if (!(im.counts() == counts_))
        throw std::invalid_argument("substitute: image varcounts mismatch");
    NCPolynomial out(counts_);
    for (const auto& [w, c] : terms_) {
      NCPolynomial prod = NCPolynomial::constant(c, counts_);
      for (const Letter& l : w.letters()) {
        if (l.cls == cls)
          prod = prod * images[l.index - 1];
        else
          prod = prod * NCPolynomial::variable(l.cls, l.index, counts_);
        if (prod.isZero()) break;
      }
      out += prod;
    }
    return out;
  }

  NCPolynomial& operator+=(const NCPolynomial& rhs) {
    requireSameCounts(rhs);
    for (const auto& [w, c] : rhs.terms_) addTerm(w, c);
    return *this;
  }

  NCPolynomial& operator-=(const NCPolynomial& rhs) {
    requireSameCounts(rhs);
    for (const auto& [w, c] : rhs.terms_) addTerm(w, -c);
    return *this;
  }

  friend NCPolynomial operator+(NCPolynomial lhs, const NCPolynomial& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend NCPolynomial operator-(NCPolynomial lhs, const NCPolynomial& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend NCPolynomial operator-(const NCPolynomial& p) {
    NCPolynomial out(p.counts_);
    for (const auto& [w, c] : p.terms_) out.terms_.emplace(w, -c);
    return out;
  }

  // Free-algebra product: distributed word concatenation (non-commutative).
  friend NCPolynomial operator*(const NCPolynomial& lhs, const NCPolynomial& rhs) {
    lhs.requireSameCounts(rhs);
    NCPolynomial out(lhs.counts_);
    for (const auto& [wl, cl] : lhs.terms_)
      for (const auto& [wr, cr] : rhs.terms_) out.addTerm(wl.concat(wr), cl * cr);
    return out;
  }

  friend NCPolynomial operator*(const Rational& c, const NCPolynomial& p) {
    NCPolynomial out(p.counts_);
    if (c == 0) return out;
    for (const auto& [w, co] : p.terms_) out.terms_.emplace(w, c * co);
    return out;
  }
  friend NCPolynomial operator*(const NCPolynomial& p, const Rational& c) { return c * p; }

  friend bool operator==(const NCPolynomial& lhs, const NCPolynomial& rhs) {
    return lhs.counts_ == rhs.counts_ && lhs.terms_ == rhs.terms_;
  }

 private:
  void requireSameCounts(const NCPolynomial& rhs) const {
    if (!(counts_ == rhs.counts_))
      throw std::invalid_argument("varcount mismatch between operands");
  }

  void validateWord(const Word& w) const {
    for (const Letter& l : w.letters()) {
      if (l.index == 0 || l.index > counts_.of(l.cls))
        throw std::out_of_range("letter index exceeds declared variable count");
    }
  }

  VarCounts counts_;
  std::map<Word, Rational> terms_;
};

// Rectangular matrix with NCPolynomial entries (dense grid).
class MatrixPoly {
 public:
  MatrixPoly(std::size_t rows, std::size_t cols, VarCounts counts)
      : rows_(rows), cols_(cols), counts_(counts),
        entries_(rows * cols, NCPolynomial(counts)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("MatrixPoly: empty shape");
  }

  static MatrixPoly identity(std::size_t n, VarCounts counts) {
    MatrixPoly m(n, n, counts);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = NCPolynomial::constant(1, counts);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const VarCounts& counts() const { return counts_; }

  NCPolynomial& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const NCPolynomial& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  MatrixPoly transposed() const {
    MatrixPoly out(cols_, rows_, counts_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j).transposed();
    return out;
  }

  MatrixPoly substituted(VarClass cls, const std::vector<NCPolynomial>& images) const {
    MatrixPoly out(rows_, cols_, counts_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      out.entries_[k] = entries_[k].substituted(cls, images);
    return out;
  }

  MatrixPoly block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("MatrixPoly::block");
    MatrixPoly out(nr, nc, counts_);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out.at(i, j) = at(r0 + i, c0 + j);
    return out;
  }

  void setBlock(std::size_t r0, std::size_t c0, const MatrixPoly& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
      throw std::out_of_range("MatrixPoly::setBlock");
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) at(r0 + i, c0 + j) = b.at(i, j);
  }

  bool isZero() const {
    for (const auto& e : entries_)
      if (!e.isZero()) return false;
    return true;
  }

  bool columnIsZero(std::size_t j) const {
    for (std::size_t i = 0; i < rows_; ++i)
      if (!at(i, j).isZero()) return false;
    return true;
  }

  friend MatrixPoly operator+(const MatrixPoly& lhs, const MatrixPoly& rhs) {
    lhs.requireSameShape(rhs);
    MatrixPoly out = lhs;
    for (std::size_t k = 0; k < out.entries_.size(); ++k) out.entries_[k] += rhs.entries_[k];
    return out;
  }

  friend MatrixPoly operator-(const MatrixPoly& lhs, const MatrixPoly& rhs) {
    lhs.requireSameShape(rhs);
    MatrixPoly out = lhs;
    for (std::size_t k = 0; k < out.entries_.size(); ++k) out.entries_[k] -= rhs.entries_[k];
    return out;
  }

  // Zero entries are skipped; grid borders make these matrices mostly zeros.
  friend MatrixPoly operator*(const MatrixPoly& lhs, const MatrixPoly& rhs) {
    if (lhs.cols_ != rhs.rows_) throw std::invalid_argument("MatrixPoly: shape mismatch");
    if (!(lhs.counts_ == rhs.counts_)) throw std::invalid_argument("varcount mismatch");
    MatrixPoly out(lhs.rows_, rhs.cols_, lhs.counts_);
    for (std::size_t i = 0; i < lhs.rows_; ++i)
      for (std::size_t k = 0; k < lhs.cols_; ++k) {
        const NCPolynomial& l = lhs.at(i, k);
        if (l.isZero()) continue;
        for (std::size_t j = 0; j < rhs.cols_; ++j) {
          const NCPolynomial& r = rhs.at(k, j);
          if (r.isZero()) continue;
          out.at(i, j) += l * r;
        }
      }
    return out;
  }

  friend MatrixPoly operator*(const Rational& c, const MatrixPoly& m) {
    MatrixPoly out = m;
    for (auto& e : out.entries_) e = c * e;
    return out;
  }

  friend bool operator==(const MatrixPoly& lhs, const MatrixPoly& rhs) {
    return lhs.rows_ == rhs.rows_ && lhs.cols_ == rhs.cols_ && lhs.entries_ == rhs.entries_;
  }

 private:
  void requireSameShape(const MatrixPoly& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw std::invalid_argument("MatrixPoly: shape mismatch");
    if (!(counts_ == rhs.counts_)) throw std::invalid_argument("varcount mismatch");
  }

  std::size_t rows_, cols_;
  VarCounts counts_;
  std::vector<NCPolynomial> entries_;
};

}  // namespace ncx
