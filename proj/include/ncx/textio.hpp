#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ncx/freealg.hpp"

namespace ncx {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};

// Grammar:
//   Expr   := ['-'] Term (('+'|'-') Term)*
//   Term   := Rational ['*' Factor ('*' Factor)*] | Factor ('*' Factor)*
//   Factor := Var ['^' Nat] | '(' Expr ')' | 'T(' Expr ')'
//   Var    := ('a'|'x'|'h') Nat
// Rationals are integers or integer/integer; whitespace is insignificant;
// T(.) is the involution.
NCPolynomial parsePolynomial(std::string_view text, VarCounts counts);

// Smallest counts that make the text parse (max index per class).
VarCounts inferCounts(std::string_view text);

std::string printWord(const Word& w);
std::string printPolynomial(const NCPolynomial& p);

}  // namespace ncx
