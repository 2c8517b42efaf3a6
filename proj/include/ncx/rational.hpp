#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace ncx {

using Rational = boost::multiprecision::cpp_rational;

inline std::string toString(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double toDouble(const Rational& r) { return r.convert_to<double>(); }

// Generalized binomial coefficient (t choose j) for rational t.
inline Rational binomial(const Rational& t, unsigned j) {
  Rational num = 1, den = 1;
  for (unsigned i = 0; i < j; ++i) {
    num *= (t - int(i));
    den *= int(i) + 1;
  }
  return num / den;
}

inline Rational halfBinomial(unsigned j) { return binomial(Rational(1, 2), j); }
inline Rational negHalfBinomial(unsigned j) { return binomial(Rational(-1, 2), j); }

}  // namespace ncx
