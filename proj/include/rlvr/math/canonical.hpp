#pragma once

#include <stdexcept>

#include "rlvr/math/expr.hpp"

namespace rlvr::math {

class DivisionByZero : public std::domain_error {
 public:
  DivisionByZero() : std::domain_error("division by zero during exact folding") {}
};

/// Rewrites an expression into canonical form:
///  - Sub/Neg/Div/Percent are eliminated (x-y -> x+(-1)y, x/y -> x*y^-1, p% -> p/100);
///  - Add and Mul are flattened, exact rational constants folded, like terms and
///    like factors collected, and operands sorted by the structural order;
///  - sqrt of a rational is split into k*sqrt(m) with m square-free;
///  - integer powers and small factorials of rationals are evaluated.
/// Decimal literals are kept as decimals. The result is a fixed point:
/// canonicalize(canonicalize(e)) == canonicalize(e).
Expr canonicalize(const Expr& e);

/// Largest k with k^2 | n, by trial division plus a perfect-square test of the
/// cofactor. n must be positive.
Integer square_part(const Integer& n);

}  // namespace rlvr::math
