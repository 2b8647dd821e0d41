#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rlvr::math {

using Integer = boost::multiprecision::cpp_int;
/// Exact rational. Always normalized: lowest terms, positive denominator.
using Rational = boost::multiprecision::cpp_rational;

// Comparing a cpp_rational against a built-in integer divides; these look at the
// normalized parts directly.
inline int sign(const Rational& r) { return numerator(r).sign(); }
inline bool equals_int(const Rational& r, long v) {
  return denominator(r) == 1 && numerator(r) == v;
}

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class Kind {
  Number,     // exact rational literal (integers included)
  Decimal,    // decimal literal; value kept exactly, distinct from Number
  Symbol,
  Pi,
  Infinity,
  Neg,
  Add,        // n-ary
  Sub,
  Mul,        // n-ary
  Div,
  Pow,
  Sqrt,
  Abs,
  Factorial,
  Percent,
  Tuple,
  Set,
  Interval,   // args = {lo, hi}
};

const char* kind_name(Kind k) noexcept;

/// Answer expression tree. Value type; children are owned.
/// Equality is structural and ignores source spans.
struct Expr {
  Kind kind = Kind::Number;
  Rational value;            // Number, Decimal
  std::string name;          // Symbol
  std::vector<Expr> args;
  bool lo_closed = false;    // Interval
  bool hi_closed = false;
  SourceSpan span;

  static Expr number(Rational v, SourceSpan s = {});
  static Expr decimal(Rational v, SourceSpan s = {});
  static Expr symbol(std::string n, SourceSpan s = {});
  static Expr leaf(Kind k, SourceSpan s = {});
  static Expr node(Kind k, std::vector<Expr> children, SourceSpan s = {});
  static Expr interval(Expr lo, Expr hi, bool lo_closed, bool hi_closed, SourceSpan s = {});

  bool is_number() const noexcept { return kind == Kind::Number; }
  bool is_integer() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
};

/// Total structural order used to sort commutative operands.
int compare(const Expr& a, const Expr& b);
inline bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

bool has_free_symbols(const Expr& e);
std::size_t depth(const Expr& e);

/// Prints an expression in the answer grammar. Composite operands are fully
/// parenthesized so that parse(to_string(parse(s))) == parse(s).
std::string to_string(const Expr& e);

/// Exact decimal rendering of a rational whose denominator is 2^a 5^b.
std::string decimal_string(const Rational& v);

}  // namespace rlvr::math
