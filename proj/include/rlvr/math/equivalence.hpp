#pragma once

#include <optional>

#include "rlvr/math/expr.hpp"

namespace rlvr::math {

enum class Reason {
  ExactEqual,
  CanonicalEqual,
  NumericEqual,
  Mismatch,
  NoBoxedAnswer,
  ParseFailure,
};

const char* reason_name(Reason r) noexcept;
inline bool is_reward(Reason r) noexcept {
  return r == Reason::ExactEqual || r == Reason::CanonicalEqual || r == Reason::NumericEqual;
}

/// Relative tolerance for numeric comparison. An absolute tolerance applies instead
/// when either value is smaller than small_magnitude.
struct Tolerance {
  double relative = 1e-9;
  double absolute = 1e-12;
  double small_magnitude = 1e-6;
};

/// Value of a symbol-free scalar expression, or nullopt if it contains symbols,
/// is not a scalar, or is not finite.
std::optional<long double> evaluate(const Expr& e);

bool numerically_close(long double a, long double b, const Tolerance& tol);

/// Decides equivalence in order: structural equality, canonical equality, numeric
/// agreement. Expressions with free symbols never take the numeric route.
Reason equivalent(const Expr& candidate, const Expr& oracle, const Tolerance& tol = {});

}  // namespace rlvr::math
