#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "ncx/freealg.hpp"
#include "ncx/textio.hpp"

namespace ncxtest {

using ncx::NCPolynomial;
using ncx::Rational;
using ncx::VarClass;
using ncx::VarCounts;
using ncx::Word;

inline NCPolynomial P(const std::string& text, VarCounts counts) {
  return ncx::parsePolynomial(text, counts);
}

// Random word generator with per-class degree caps.
inline Word randomWord(std::mt19937_64& rng, VarCounts counts, std::uint32_t maxA,
                       std::uint32_t maxX) {
  std::uniform_int_distribution<std::uint32_t> da(0, maxA), dx(0, maxX);
  std::uint32_t na = counts.a ? da(rng) : 0;
  std::uint32_t nx = counts.x ? dx(rng) : 0;
  std::vector<ncx::Letter> letters;
  for (std::uint32_t i = 0; i < na; ++i)
    letters.push_back(
        {VarClass::A, std::uniform_int_distribution<std::uint32_t>(1, counts.a)(rng)});
  for (std::uint32_t i = 0; i < nx; ++i)
    letters.push_back(
        {VarClass::X, std::uniform_int_distribution<std::uint32_t>(1, counts.x)(rng)});
  std::shuffle(letters.begin(), letters.end(), rng);
  return Word(std::move(letters));
}

inline NCPolynomial randomPoly(std::mt19937_64& rng, VarCounts counts, std::uint32_t maxA,
                               std::uint32_t maxX, int terms) {
  NCPolynomial p(counts);
  std::uniform_int_distribution<int> coeff(-4, 4);
  for (int t = 0; t < terms; ++t) {
    int c = coeff(rng);
    if (c == 0) c = 1;
    p.addTerm(randomWord(rng, counts, maxA, maxX), c);
  }
  return p;
}

inline NCPolynomial randomSymmetricPoly(std::mt19937_64& rng, VarCounts counts,
                                        std::uint32_t maxA, std::uint32_t maxX, int terms) {
  NCPolynomial p = randomPoly(rng, counts, maxA, maxX, terms);
  return p + p.transposed();
}

}  // namespace ncxtest
