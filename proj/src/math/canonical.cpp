#include "rlvr/math/canonical.hpp"

#include <algorithm>
#include <optional>
#include <utility>

#include <boost/multiprecision/integer.hpp>

namespace rlvr::math {
namespace {

// Folding limits keep canonicalization bounded on adversarial input.
constexpr unsigned kMaxPowerBits = 16384;
constexpr long kMaxFactorial = 500;
constexpr long kTrialDivisionLimit = 100000;

Expr num(const Rational& v) { return Expr::number(v); }

bool is_num(const Expr& e, long v) { return e.kind == Kind::Number && equals_int(e.value, v); }

unsigned bit_size(const Integer& v) {
  return v == 0 ? 1u : static_cast<unsigned>(msb(abs(v))) + 1u;
}

std::optional<long> small_integer(const Expr& e, long bound) {
  if (!e.is_integer()) return std::nullopt;
  const Integer& n = numerator(e.value);
  if (n > bound || n < -bound) return std::nullopt;
  return n.convert_to<long>();
}

Expr make_add(std::vector<Expr> terms);
Expr make_mul(std::vector<Expr> factors);
Expr make_pow(Expr base, Expr exp);
Expr make_sqrt(Expr x);
Expr make_abs(Expr x);

/// Splits a canonical term into rational coefficient and the remaining factors.
std::pair<Rational, Expr> split_coefficient(const Expr& t) {
  if (t.kind == Kind::Mul && !t.args.empty() && t.args.front().kind == Kind::Number) {
    std::vector<Expr> rest(t.args.begin() + 1, t.args.end());
    if (rest.size() == 1) return {t.args.front().value, std::move(rest.front())};
    return {t.args.front().value, Expr::node(Kind::Mul, std::move(rest))};
  }
  return {Rational(1), t};
}

Expr with_coefficient(const Rational& c, const Expr& rest) {
  if (equals_int(c, 1)) return rest;
  std::vector<Expr> fs{num(c)};
  if (rest.kind == Kind::Mul) {
    fs.insert(fs.end(), rest.args.begin(), rest.args.end());
  } else {
    fs.push_back(rest);
  }
  return Expr::node(Kind::Mul, std::move(fs));
}

Expr make_add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  for (auto& t : terms) {
    if (t.kind == Kind::Add) {
      for (auto& a : t.args) flat.push_back(std::move(a));
    } else {
      flat.push_back(std::move(t));
    }
  }
  Rational constant = 0;
  std::vector<std::pair<Expr, Rational>> groups;  // rest -> coefficient
  for (auto& t : flat) {
    if (t.kind == Kind::Number) {
      constant += t.value;
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == rest; });
    if (it == groups.end()) {
      groups.emplace_back(std::move(rest), c);
    } else {
      it->second += c;
    }
  }
  std::vector<Expr> out;
  for (auto& [rest, c] : groups) {
    if (sign(c) == 0) continue;
    out.push_back(with_coefficient(c, rest));
  }
  if (sign(constant) != 0) out.push_back(num(constant));
  if (out.empty()) return num(0);
  if (out.size() == 1) return std::move(out.front());
  std::sort(out.begin(), out.end());
  return Expr::node(Kind::Add, std::move(out));
}

void scale(Rational& acc, const Rational& by) {
  if (equals_int(by, 1)) return;
  if (equals_int(acc, 1)) {
    acc = by;
  } else {
    acc *= by;
  }
}

/// One grouping pass over the factors. The result may still contain factors that
/// regroup (for example sqrt(x)^2 rebuilding to x); make_mul iterates to a fixpoint.
Expr mul_once(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  for (auto& f : factors) {
    if (f.kind == Kind::Mul) {
      for (auto& a : f.args) flat.push_back(std::move(a));
    } else {
      flat.push_back(std::move(f));
    }
  }
  Rational coeff = 1;
  std::vector<std::pair<Expr, Rational>> groups;  // base -> summed exponent
  for (auto& f : flat) {
    if (f.kind == Kind::Number) {
      scale(coeff, f.value);
      continue;
    }
    Expr base;
    Rational e = 1;
    if (f.kind == Kind::Pow && f.args[1].kind == Kind::Number) {
      base = f.args[0];
      e = f.args[1].value;
    } else {
      base = std::move(f);
    }
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == base; });
    if (it == groups.end()) {
      groups.emplace_back(std::move(base), e);
    } else {
      it->second += e;
    }
  }
  if (sign(coeff) == 0) return num(0);

  std::vector<Expr> rebuilt;
  // sqrt(a)*sqrt(b) -> sqrt(ab) for positive rationals. Only bare radicals merge, so
  // reciprocals such as 1/sqrt(2) keep their written form.
  Rational radicand = 1;
  for (auto& [b, e] : groups) {
    if (equals_int(e, 1) && b.kind == Kind::Sqrt && b.args[0].kind == Kind::Number &&
        sign(b.args[0].value) > 0) {
      radicand *= b.args[0].value;
      e = 0;
    }
  }
  if (!equals_int(radicand, 1)) {
    Expr r = make_sqrt(num(radicand));
    if (r.kind == Kind::Number) {
      scale(coeff, r.value);
    } else {
      rebuilt.push_back(std::move(r));
    }
  }
  for (auto& [b, e] : groups) {
    if (sign(e) == 0) continue;
    Expr p = equals_int(e, 1) ? b : make_pow(b, num(e));
    if (p.kind == Kind::Number) {
      scale(coeff, p.value);
      continue;
    }
    rebuilt.push_back(std::move(p));
  }
  std::sort(rebuilt.begin(), rebuilt.end());
  if (rebuilt.empty()) return num(coeff);
  // A numeric coefficient times a single sum distributes: 2(x+1) -> 2x+2.
  if (rebuilt.size() == 1 && rebuilt.front().kind == Kind::Add && !equals_int(coeff, 1)) {
    std::vector<Expr> terms;
    for (const auto& t : rebuilt.front().args) terms.push_back(make_mul({num(coeff), t}));
    return make_add(std::move(terms));
  }
  if (equals_int(coeff, 1) && rebuilt.size() == 1) return std::move(rebuilt.front());
  std::vector<Expr> out;
  if (!equals_int(coeff, 1)) out.push_back(num(coeff));
  for (auto& r : rebuilt) out.push_back(std::move(r));
  return Expr::node(Kind::Mul, std::move(out));
}

Expr make_mul(std::vector<Expr> factors) {
  Expr r = mul_once(std::move(factors));
  for (int round = 0; round < 16; ++round) {
    if (r.kind != Kind::Mul) return r;
    Expr next = mul_once(r.args);
    if (next == r) return r;
    r = std::move(next);
  }
  throw std::logic_error("canonical product did not stabilize");
}

Expr make_pow(Expr base, Expr exp) {
  if (is_num(exp, 0)) return num(1);
  if (is_num(exp, 1)) return base;
  if (base.kind == Kind::Number && is_num(base, 1)) return num(1);

  if (base.kind == Kind::Number && exp.is_integer()) {
    const Integer& n = numerator(exp.value);
    if (sign(base.value) == 0) {
      if (n < 0) throw DivisionByZero();
      return num(0);
    }
    const unsigned bits =
        std::max(bit_size(numerator(base.value)), bit_size(denominator(base.value)));
    if (abs(n) * bits <= kMaxPowerBits) {
      const unsigned k = abs(n).convert_to<unsigned>();
      Integer p = boost::multiprecision::pow(numerator(base.value), k);
      Integer q = boost::multiprecision::pow(denominator(base.value), k);
      return num(n < 0 ? Rational(q) / Rational(p) : Rational(p, q));
    }
  }
  // b^(m/2) with rational b >= 0 goes through the radical simplification.
  if (base.kind == Kind::Number && sign(base.value) > 0 && exp.kind == Kind::Number &&
      denominator(exp.value) == 2) {
    return make_pow(make_sqrt(base), num(Rational(numerator(exp.value))));
  }
  if (exp.is_integer()) {
    const Integer& n = numerator(exp.value);
    // (b^m)^n = b^(mn) for integer m, n.
    if (base.kind == Kind::Pow && base.args[1].is_integer()) {
      return make_pow(base.args[0], num(base.args[1].value * exp.value));
    }
    // (a*b)^n = a^n * b^n.
    if (base.kind == Kind::Mul) {
      std::vector<Expr> fs;
      for (const auto& f : base.args) fs.push_back(make_pow(f, exp));
      return make_mul(std::move(fs));
    }
    // sqrt(r)^n for n >= 2 reduces to r^(n div 2) * sqrt(r)^(n mod 2).
    if (base.kind == Kind::Sqrt && n >= 2) {
      const Integer half = n / 2;
      Expr whole = make_pow(base.args[0], num(Rational(half)));
      if (n % 2 == 0) return whole;
      return make_mul({std::move(whole), std::move(base)});
    }
  }
  return Expr::node(Kind::Pow, {std::move(base), std::move(exp)});
}

Expr make_sqrt(Expr x) {
  if (x.kind == Kind::Number) {
    if (sign(x.value) < 0) return Expr::node(Kind::Sqrt, {std::move(x)});
    if (sign(x.value) == 0) return num(0);
    const Integer& p = numerator(x.value);
    const Integer& q = denominator(x.value);
    // sqrt(p/q) = sqrt(p*q)/q
    const Integer n = p * q;
    const Integer k = square_part(n);
    const Integer m = n / (k * k);
    const Rational outside(k, q);
    if (m == 1) return num(outside);
    Expr radical = Expr::node(Kind::Sqrt, {num(Rational(m))});
    if (outside == 1) return radical;
    return Expr::node(Kind::Mul, {num(outside), std::move(radical)});
  }
  if (x.kind == Kind::Pow && x.args[1].is_integer()) {
    const Integer& n = numerator(x.args[1].value);
    if (n % 2 == 0) return make_pow(make_abs(x.args[0]), num(Rational(n / 2)));
  }
  if (x.kind == Kind::Mul && x.args.front().kind == Kind::Number && sign(x.args.front().value) > 0) {
    std::vector<Expr> rest(x.args.begin() + 1, x.args.end());
    Expr inner = rest.size() == 1 ? std::move(rest.front()) : Expr::node(Kind::Mul, std::move(rest));
    return make_mul({make_sqrt(x.args.front()), make_sqrt(std::move(inner))});
  }
  return Expr::node(Kind::Sqrt, {std::move(x)});
}

Expr make_abs(Expr x) {
  switch (x.kind) {
    case Kind::Number: return num(abs(x.value));
    case Kind::Decimal: return Expr::decimal(abs(x.value));
    case Kind::Pi:
    case Kind::Infinity:
    case Kind::Abs:
    case Kind::Factorial:
      return x;
    case Kind::Sqrt:
      if (x.args[0].kind == Kind::Number && sign(x.args[0].value) >= 0) return x;
      break;
    case Kind::Mul:
      if (x.args.front().kind == Kind::Number) {
        std::vector<Expr> rest(x.args.begin() + 1, x.args.end());
        Expr inner =
            rest.size() == 1 ? std::move(rest.front()) : Expr::node(Kind::Mul, std::move(rest));
        return make_mul({num(abs(x.args.front().value)), make_abs(std::move(inner))});
      }
      break;
    default:
      break;
  }
  return Expr::node(Kind::Abs, {std::move(x)});
}

Expr make_factorial(Expr x) {
  if (auto n = small_integer(x, kMaxFactorial); n && *n >= 0) {
    Integer f = 1;
    for (long i = 2; i <= *n; ++i) f *= i;
    return num(Rational(f));
  }
  return Expr::node(Kind::Factorial, {std::move(x)});
}

Expr make_set(std::vector<Expr> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return Expr::node(Kind::Set, std::move(items));
}

}  // namespace

Integer square_part(const Integer& n) {
  Integer rest = n;
  Integer k = 1;
  for (long d = 2; d <= kTrialDivisionLimit; d += (d == 2 ? 1 : 2)) {
    const Integer dd = Integer(d) * d;
    if (dd > rest) break;
    while (rest % dd == 0) {
      rest /= dd;
      k *= d;
    }
    while (rest % d == 0) rest /= d;
  }
  // Whatever is left has no small prime factors; it may still be a perfect square.
  if (rest > 1) {
    const Integer r = boost::multiprecision::sqrt(rest);
    if (r * r == rest) k *= r;
  }
  return k;
}

Expr canonicalize(const Expr& e) {
  std::vector<Expr> c;
  c.reserve(e.args.size());
  for (const auto& a : e.args) c.push_back(canonicalize(a));

  switch (e.kind) {
    case Kind::Number:
    case Kind::Decimal: {
      Expr leaf = e;
      leaf.span = {};
      return leaf;
    }
    case Kind::Symbol:
      return Expr::symbol(e.name);
    case Kind::Pi:
    case Kind::Infinity:
      return Expr::leaf(e.kind);
    case Kind::Neg:
      if (c[0].kind == Kind::Number) {
        c[0].value.backend().negate();
        c[0].span = {};
        return std::move(c[0]);
      }
      return make_mul({num(-1), std::move(c[0])});
    case Kind::Add:
      return make_add(std::move(c));
    case Kind::Sub:
      return make_add({std::move(c[0]), make_mul({num(-1), std::move(c[1])})});
    case Kind::Mul:
      return make_mul(std::move(c));
    case Kind::Div:
      if (c[1].kind == Kind::Number && sign(c[1].value) == 0) throw DivisionByZero();
      return make_mul({std::move(c[0]), make_pow(std::move(c[1]), num(-1))});
    case Kind::Pow:
      return make_pow(std::move(c[0]), std::move(c[1]));
    case Kind::Sqrt:
      return make_sqrt(std::move(c[0]));
    case Kind::Abs:
      return make_abs(std::move(c[0]));
    case Kind::Factorial:
      return make_factorial(std::move(c[0]));
    case Kind::Percent:
      return make_mul({std::move(c[0]), num(Rational(1, 100))});
    case Kind::Tuple:
      return Expr::node(Kind::Tuple, std::move(c));
    case Kind::Set:
      return make_set(std::move(c));
    case Kind::Interval:
      return Expr::interval(std::move(c[0]), std::move(c[1]), e.lo_closed, e.hi_closed);
  }
  return e;
}

}  // namespace rlvr::math
