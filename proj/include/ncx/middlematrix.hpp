#pragma once

#include <optional>
#include <vector>

#include "ncx/calculus.hpp"
#include "ncx/freealg.hpp"

namespace ncx {

// Border construction modes.
//   Full:    every monomial h_j*m with deg_a(m) <= cap_a, deg_x(m) <= cap_x
//            (the paper-height grid; caps default to the bidegree of q).
//   Reduced: grid at the degree bounds actually observed among the split
//            monomials of q. This is the mode that reproduces the displayed
//            matrices, zero rows/columns included.
//   Minimal: exactly the split monomials occurring in q (both sides).
enum class BorderMode { Full, Reduced, Minimal };

// Ordered list of monomials h_j*m, partitioned into blocks V_0..V_k by the
// x-degree of m; within a block, entries are sorted by the canonical order of
// their transposes (the order of the paper's printed row labels).
class BorderVector {
 public:
  BorderVector(std::vector<Word> entries, std::vector<std::size_t> blockOffsets,
               BorderMode mode, VarCounts counts);

  const std::vector<Word>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const VarCounts& counts() const { return counts_; }
  BorderMode mode() const { return mode_; }

  std::size_t blockCount() const { return blockOffsets_.size() - 1; }
  std::size_t blockOffset(std::size_t k) const { return blockOffsets_[k]; }
  std::size_t blockSize(std::size_t k) const { return blockOffsets_[k + 1] - blockOffsets_[k]; }

  std::optional<std::size_t> indexOf(const Word& w) const;

  // Column vector of the border monomials as polynomials, optionally with the
  // leading direction letter replaced by the matching letter of `repl`.
  MatrixPoly asColumn() const;
  MatrixPoly asColumn(VarClass repl) const;

 private:
  std::vector<Word> entries_;
  std::vector<std::size_t> blockOffsets_;
  BorderMode mode_;
  VarCounts counts_;
};

BorderVector borderVector(const HessianPoly& q, BorderMode mode = BorderMode::Reduced);
BorderVector borderVectorFull(const HessianPoly& q, std::uint32_t capA, std::uint32_t capX);

// Height of full-mode block V_j: g_x^{j+1} * sum_{s<=capA} C(j+s, j) * g_a^s.
unsigned long long fullBlockHeight(std::uint32_t gA, std::uint32_t gX, std::uint32_t capA,
                                   std::uint32_t j);

struct MiddleMatrix {
  BorderVector border;
  MatrixPoly Z;

  std::size_t size() const { return border.size(); }
  MatrixPoly blockView(std::size_t i, std::size_t j) const;
};

// Gram-type representation: V^T Z V = q, splitting each word u*h_j*z*h_k*v at
// its two direction letters into entry (h_j*u^T, h_k*v) += coeff * z.
MiddleMatrix middleMatrix(const HessianPoly& q, const BorderVector& border);
MiddleMatrix middleMatrix(const HessianPoly& q, BorderMode mode = BorderMode::Reduced);

// The derived matrix: x set to 0 in every entry, same border.
MiddleMatrix derivedMatrix(const MiddleMatrix& m);

// V^T Z V as a polynomial (exact reconstruction of q).
NCPolynomial borderQuadraticForm(const BorderVector& border, const MatrixPoly& Z);

// K_j maps block V_{j+1} rows to block V_j columns; satisfies
// Z_{i,j+1} K_j + Z_{i,j}(a,0) = Z_{i,j}. Rows indexed by border entries whose
// Z-column is identically zero are left zero. Empty when there is one block.
std::vector<MatrixPoly> kMatrices(const MiddleMatrix& m);

struct CongruenceData {
  std::vector<MatrixPoly> Ks;
  MatrixPoly A;     // block unit lower bidiagonal with -K_j blocks
  MatrixPoly B;     // B^2 = A, finite binomial series in (A - I)
  MatrixPoly Binv;  // B * Binv = I
};

// Z*A = Z(a,0), B^2 = A, B*Binv = I and B^T Z B = Z(a,0), all exact; throws if
// the recursion identity fails (malformed middle matrix).
CongruenceData congruence(const MiddleMatrix& m);

}  // namespace ncx
