#include "rlvr/math/expr.hpp"

#include <algorithm>

namespace rlvr::math {

const char* kind_name(Kind k) noexcept {
  switch (k) {
    case Kind::Number: return "Number";
    case Kind::Decimal: return "Decimal";
    case Kind::Symbol: return "Symbol";
    case Kind::Pi: return "Pi";
    case Kind::Infinity: return "Infinity";
    case Kind::Neg: return "Neg";
    case Kind::Add: return "Add";
    case Kind::Sub: return "Sub";
    case Kind::Mul: return "Mul";
    case Kind::Div: return "Div";
    case Kind::Pow: return "Pow";
    case Kind::Sqrt: return "Sqrt";
    case Kind::Abs: return "Abs";
    case Kind::Factorial: return "Factorial";
    case Kind::Percent: return "Percent";
    case Kind::Tuple: return "Tuple";
    case Kind::Set: return "Set";
    case Kind::Interval: return "Interval";
  }
  return "?";
}

Expr Expr::number(Rational v, SourceSpan s) {
  Expr e;
  e.kind = Kind::Number;
  e.value = std::move(v);
  e.span = s;
  return e;
}

Expr Expr::decimal(Rational v, SourceSpan s) {
  Expr e;
  e.kind = Kind::Decimal;
  e.value = std::move(v);
  e.span = s;
  return e;
}

Expr Expr::symbol(std::string n, SourceSpan s) {
  Expr e;
  e.kind = Kind::Symbol;
  e.name = std::move(n);
  e.span = s;
  return e;
}

Expr Expr::leaf(Kind k, SourceSpan s) {
  Expr e;
  e.kind = k;
  e.span = s;
  return e;
}

Expr Expr::node(Kind k, std::vector<Expr> children, SourceSpan s) {
  Expr e;
  e.kind = k;
  e.args = std::move(children);
  e.span = s;
  return e;
}

Expr Expr::interval(Expr lo, Expr hi, bool lc, bool hc, SourceSpan s) {
  Expr e = node(Kind::Interval, {std::move(lo), std::move(hi)}, s);
  e.lo_closed = lc;
  e.hi_closed = hc;
  return e;
}

bool Expr::is_integer() const {
  return kind == Kind::Number && denominator(value) == 1;
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

int compare(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  switch (a.kind) {
    case Kind::Number:
    case Kind::Decimal:
      if (numerator(a.value) == numerator(b.value) &&
          denominator(a.value) == denominator(b.value))
        return 0;
      // Denominators are positive, so cross multiplication preserves order.
      return numerator(a.value) * denominator(b.value) < numerator(b.value) * denominator(a.value)
                 ? -1
                 : 1;
    case Kind::Symbol:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case Kind::Interval:
      if (a.lo_closed != b.lo_closed) return a.lo_closed ? 1 : -1;
      if (a.hi_closed != b.hi_closed) return a.hi_closed ? 1 : -1;
      break;
    default:
      break;
  }
  const std::size_t n = std::min(a.args.size(), b.args.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
  }
  if (a.args.size() == b.args.size()) return 0;
  return a.args.size() < b.args.size() ? -1 : 1;
}

bool has_free_symbols(const Expr& e) {
  if (e.kind == Kind::Symbol) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_free_symbols);
}

std::size_t depth(const Expr& e) {
  std::size_t d = 0;
  for (const auto& a : e.args) d = std::max(d, depth(a));
  return d + 1;
}

std::string decimal_string(const Rational& v) {
  Integer num = numerator(v);
  Integer den = denominator(v);
  const bool neg = num < 0;
  if (neg) num = -num;
  // Scale to a power of ten.
  std::size_t digits = 0;
  Integer scale = 1;
  while (scale % den != 0) {
    scale *= 10;
    ++digits;
    if (digits > 4096) throw std::invalid_argument("rational has no finite decimal expansion");
  }
  Integer scaled = num * (scale / den);
  std::string s = scaled.str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
  } else {
    s += ".0";
  }
  return neg ? "-" + s : s;
}

namespace {

std::string paren(const Expr& e) { return "(" + to_string(e) + ")"; }

std::string join(const std::vector<Expr>& xs, const char* sep, bool wrap) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += wrap ? paren(xs[i]) : to_string(xs[i]);
  }
  return out;
}

std::string rational_string(const Rational& v) {
  std::string s = numerator(v).str();
  if (denominator(v) != 1) s += "/" + denominator(v).str();
  return sign(v) < 0 ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Kind::Number: return rational_string(e.value);
    case Kind::Decimal: {
      std::string s = decimal_string(e.value);
      return sign(e.value) < 0 ? "(" + s + ")" : s;
    }
    case Kind::Symbol: return e.name;
    case Kind::Pi: return "\\pi";
    case Kind::Infinity: return "\\infty";
    case Kind::Neg: return "-" + paren(e.args[0]);
    case Kind::Add: return join(e.args, "+", true);
    case Kind::Sub: return paren(e.args[0]) + "-" + paren(e.args[1]);
    case Kind::Mul: return join(e.args, "*", true);
    case Kind::Div: return paren(e.args[0]) + "/" + paren(e.args[1]);
    case Kind::Pow: return paren(e.args[0]) + "^" + paren(e.args[1]);
    case Kind::Sqrt: return "sqrt(" + to_string(e.args[0]) + ")";
    case Kind::Abs: return "|" + to_string(e.args[0]) + "|";
    case Kind::Factorial: return paren(e.args[0]) + "!";
    case Kind::Percent: return paren(e.args[0]) + "%";
    case Kind::Tuple: return "(" + join(e.args, ",", false) + ")";
    case Kind::Set: return "\\{" + join(e.args, ",", false) + "\\}";
    case Kind::Interval:
      return std::string(e.lo_closed ? "[" : "(") + to_string(e.args[0]) + "," +
             to_string(e.args[1]) + (e.hi_closed ? "]" : ")");
  }
  return {};
}

}  // namespace rlvr::math
