#include "ncx/textio.hpp"

#include <cctype>
#include <sstream>

namespace ncx {

namespace {

class Parser {
 public:
  Parser(std::string_view text, VarCounts counts) : text_(text), counts_(counts) {}

  NCPolynomial parse() {
    NCPolynomial p = parseExpr();
    skipWs();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  NCPolynomial parseExpr() {
    skipWs();
    bool negate = false;
    if (peek() == '-') {
      negate = true;
      ++pos_;
    } else if (peek() == '+') {
      ++pos_;
    }
    NCPolynomial acc = parseTerm();
    if (negate) acc = -acc;
    for (;;) {
      skipWs();
      char c = peek();
      if (c == '+') {
        ++pos_;
        acc += parseTerm();
      } else if (c == '-') {
        ++pos_;
        acc -= parseTerm();
      } else {
        return acc;
      }
    }
  }

  NCPolynomial parseTerm() {
    skipWs();
    NCPolynomial acc = NCPolynomial::constant(1, counts_);
    bool sawFactor = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      acc = NCPolynomial::constant(parseRational(), counts_);
      sawFactor = true;
      skipWs();
      if (peek() == '*') {
        ++pos_;
      } else {
        return acc;  // bare rational term
      }
    }
    for (;;) {
      acc = acc * parseFactor();
      sawFactor = true;
      skipWs();
      if (peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!sawFactor) fail("expected a term");
    return acc;
  }

  NCPolynomial parseFactor() {
    skipWs();
    char c = peek();
    if (c == '(') {
      ++pos_;
      NCPolynomial inner = parseExpr();
      expect(')');
      return inner;
    }
    if (c == 'T') {
      ++pos_;
      expect('(');
      NCPolynomial inner = parseExpr();
      expect(')');
      return inner.transposed();
    }
    VarClass cls;
    if (c == 'a')
      cls = VarClass::A;
    else if (c == 'x')
      cls = VarClass::X;
    else if (c == 'h')
      cls = VarClass::H;
    else
      fail("expected a variable, '(' or 'T('");
    ++pos_;
    std::uint32_t index = parseNat();
    if (index == 0) fail("variable index must be positive");
    if (index > counts_.of(cls)) fail("variable index exceeds declared count");
    NCPolynomial v = NCPolynomial::variable(cls, index, counts_);
    skipWs();
    if (peek() == '^') {
      ++pos_;
      std::uint32_t e = parseNat();
      NCPolynomial pow = NCPolynomial::constant(1, counts_);
      for (std::uint32_t i = 0; i < e; ++i) pow = pow * v;
      return pow;
    }
    return v;
  }

  Rational parseRational() {
    boost::multiprecision::cpp_int num = parseInteger();
    skipWs();
    if (peek() == '/') {
      ++pos_;
      skipWs();
      boost::multiprecision::cpp_int den = parseInteger();
      if (den == 0) fail("zero denominator");
      return Rational(num, den);
    }
    return Rational(num);
  }

  boost::multiprecision::cpp_int parseInteger() {
    skipWs();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer");
    return boost::multiprecision::cpp_int(std::string(text_.substr(start, pos_ - start)));
  }

  std::uint32_t parseNat() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number");
    unsigned long v = std::stoul(std::string(text_.substr(start, pos_ - start)));
    return static_cast<std::uint32_t>(v);
  }

  void expect(char c) {
    skipWs();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skipWs() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  std::string_view text_;
  VarCounts counts_;
  std::size_t pos_ = 0;
};

}  // namespace

NCPolynomial parsePolynomial(std::string_view text, VarCounts counts) {
  return Parser(text, counts).parse();
}

VarCounts inferCounts(std::string_view text) {
  VarCounts counts;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != 'a' && c != 'x' && c != 'h') continue;
    std::size_t j = i + 1;
    std::uint32_t idx = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      idx = idx * 10 + static_cast<std::uint32_t>(text[j] - '0');
      ++j;
    }
    if (j == i + 1) continue;  // 'a' without an index is not a variable here
    if (c == 'a')
      counts.a = std::max(counts.a, idx);
    else if (c == 'x')
      counts.x = std::max(counts.x, idx);
    else
      counts.h = std::max(counts.h, idx);
    i = j - 1;
  }
  return counts;
}

std::string printWord(const Word& w) {
  if (w.empty()) return "1";
  std::ostringstream out;
  const auto& ls = w.letters();
  for (std::size_t i = 0; i < ls.size();) {
    std::size_t run = i + 1;
    while (run < ls.size() && ls[run] == ls[i]) ++run;
    if (i > 0) out << '*';
    out << varClassChar(ls[i].cls) << ls[i].index;
    if (run - i > 1) out << '^' << (run - i);
    i = run;
  }
  return out.str();
}

std::string printPolynomial(const NCPolynomial& p) {
  if (p.isZero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) out << '-';
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (w.empty()) {
      out << toString(mag);
    } else if (mag == 1) {
      out << printWord(w);
    } else {
      out << toString(mag) << '*' << printWord(w);
    }
  }
  return out.str();
}

}  // namespace ncx
