#include "rlvr/math/equivalence.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "rlvr/math/canonical.hpp"

namespace rlvr::math {

const char* reason_name(Reason r) noexcept {
  switch (r) {
    case Reason::ExactEqual: return "EXACT_EQUAL";
    case Reason::CanonicalEqual: return "CANONICAL_EQUAL";
    case Reason::NumericEqual: return "NUMERIC_EQUAL";
    case Reason::Mismatch: return "MISMATCH";
    case Reason::NoBoxedAnswer: return "NO_BOXED_ANSWER";
    case Reason::ParseFailure: return "PARSE_FAILURE";
  }
  return "?";
}

namespace {

long double to_ld(const Rational& v) {
  const Integer& n = numerator(v);
  const Integer& d = denominator(v);
  // Both parts are exact in a 64-bit mantissa; the division rounds once.
  if (n == 0) return 0.0L;
  if (msb(abs(n)) < 63 && msb(d) < 63)
    return n.convert_to<long double>() / d.convert_to<long double>();
  return v.convert_to<long double>();
}

std::optional<long double> eval(const Expr& e) {
  auto arg = [&](std::size_t i) { return eval(e.args[i]); };
  switch (e.kind) {
    case Kind::Number:
    case Kind::Decimal:
      return to_ld(e.value);
    case Kind::Pi:
      return std::numbers::pi_v<long double>;
    case Kind::Symbol:
    case Kind::Infinity:
    case Kind::Tuple:
    case Kind::Set:
    case Kind::Interval:
      return std::nullopt;
    case Kind::Neg: {
      auto a = arg(0);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Kind::Add:
    case Kind::Mul: {
      long double acc = e.kind == Kind::Add ? 0.0L : 1.0L;
      for (const auto& c : e.args) {
        auto v = eval(c);
        if (!v) return std::nullopt;
        acc = e.kind == Kind::Add ? acc + *v : acc * *v;
      }
      return acc;
    }
    case Kind::Sub:
    case Kind::Div:
    case Kind::Pow: {
      auto a = arg(0), b = arg(1);
      if (!a || !b) return std::nullopt;
      if (e.kind == Kind::Sub) return *a - *b;
      if (e.kind == Kind::Div) return *a / *b;
      return std::pow(*a, *b);
    }
    case Kind::Sqrt: {
      auto a = arg(0);
      if (!a || *a < 0) return std::nullopt;
      return std::sqrt(*a);
    }
    case Kind::Abs: {
      auto a = arg(0);
      if (!a) return std::nullopt;
      return std::fabs(*a);
    }
    case Kind::Factorial: {
      auto a = arg(0);
      if (!a || *a < 0 || *a != std::floor(*a)) return std::nullopt;
      return std::tgamma(*a + 1);
    }
    case Kind::Percent: {
      auto a = arg(0);
      if (!a) return std::nullopt;
      return *a / 100;
    }
  }
  return std::nullopt;
}

bool numeric_match(const Expr& a, const Expr& b, const Tolerance& tol);

bool element_match(const Expr& a, const Expr& b, const Tolerance& tol) {
  return a == b || numeric_match(a, b, tol);
}

/// Backtracking perfect matching between set elements.
bool match_sets(const std::vector<Expr>& xs, const std::vector<Expr>& ys, std::vector<bool>& used,
                std::size_t i, const Tolerance& tol) {
  if (i == xs.size()) return true;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (used[j] || !element_match(xs[i], ys[j], tol)) continue;
    used[j] = true;
    if (match_sets(xs, ys, used, i + 1, tol)) return true;
    used[j] = false;
  }
  return false;
}

bool numeric_match(const Expr& a, const Expr& b, const Tolerance& tol) {
  const bool a_coll = a.kind == Kind::Tuple || a.kind == Kind::Set || a.kind == Kind::Interval;
  const bool b_coll = b.kind == Kind::Tuple || b.kind == Kind::Set || b.kind == Kind::Interval;
  if (a_coll || b_coll) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == Kind::Interval &&
        (a.lo_closed != b.lo_closed || a.hi_closed != b.hi_closed))
      return false;
    if (a.kind == Kind::Set) {
      std::vector<bool> used(b.args.size(), false);
      return match_sets(a.args, b.args, used, 0, tol);
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (!element_match(a.args[i], b.args[i], tol)) return false;
    }
    return true;
  }
  if (has_free_symbols(a) || has_free_symbols(b)) return false;
  auto x = evaluate(a);
  auto y = evaluate(b);
  return x && y && numerically_close(*x, *y, tol);
}

std::optional<Expr> try_canonical(const Expr& e) {
  try {
    return canonicalize(e);
  } catch (const DivisionByZero&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<long double> evaluate(const Expr& e) {
  auto v = eval(e);
  if (!v || !std::isfinite(*v)) return std::nullopt;
  return v;
}

bool numerically_close(long double a, long double b, const Tolerance& tol) {
  const long double diff = std::fabs(a - b);
  if (std::fabs(a) < tol.small_magnitude || std::fabs(b) < tol.small_magnitude)
    return diff <= tol.absolute;
  return diff <= tol.relative * std::max(std::fabs(a), std::fabs(b));
}

Reason equivalent(const Expr& candidate, const Expr& oracle, const Tolerance& tol) {
  if (candidate == oracle) return Reason::ExactEqual;
  auto cc = try_canonical(candidate);
  auto co = try_canonical(oracle);
  if (cc && co && *cc == *co) return Reason::CanonicalEqual;
  const Expr& a = cc ? *cc : candidate;
  const Expr& b = co ? *co : oracle;
  if (numeric_match(a, b, tol)) return Reason::NumericEqual;
  return Reason::Mismatch;
}

}  // namespace rlvr::math
