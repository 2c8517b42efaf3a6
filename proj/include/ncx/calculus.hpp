#pragma once

#include "ncx/freealg.hpp"

namespace ncx {

// A polynomial homogeneous of degree two in the direction letters (class H),
// together with the class it differentiates. Directions in a reuse the H slot
// with g_h = g_a; a polynomial never carries both kinds at once.
struct HessianPoly {
  NCPolynomial q;
  VarClass direction = VarClass::X;
  std::uint32_t sourceDegA = 0;
  std::uint32_t sourceDegX = 0;
};

// Formal second derivative of p(a, x+th) in t at 0: every ordered pair of
// distinct x positions replaced by matching h letters (equivalently, twice the
// sum over unordered pairs). Zero when deg_x(p) <= 1.
HessianPoly partialHessianX(const NCPolynomial& p);

// Same with the roles of a and x exchanged; direction letters use the H class
// with g_h = g_a.
HessianPoly partialHessianA(const NCPolynomial& p);

// Terms with exactly the given a- and x-letter counts (h letters unrestricted).
NCPolynomial homogeneousPart(const NCPolynomial& p, std::uint32_t degA, std::uint32_t degX);

// p = hessPart + linear with hessPart the x-homogeneous-degree-2 part and
// deg_x(linear) <= 1; requires deg_x(p) <= 2. The split is unique.
struct DegreeTwoSplit {
  NCPolynomial hessPart;
  NCPolynomial linear;
};
DegreeTwoSplit degreeTwoSplit(const NCPolynomial& p);

}  // namespace ncx
