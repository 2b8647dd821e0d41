#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rlvr/math/expr.hpp"

namespace rlvr::math {

/// Raised when an answer string is outside the grammar. position() is the byte
/// offset of the first offending character in the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Parses a candidate or oracle answer.
///
/// Grammar (whitespace insignificant):
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor (('*'|'·'|'/'|'÷'|implicit) factor)*
///   factor := base ('^' base | '!' | '%')*
///   base   := number | symbol | 'pi' | '\pi' | '(' expr ')' | 'sqrt' '(' expr ')'
///           | '\sqrt{' expr '}' | '\frac{' expr '}{' expr '}' | '|' expr '|'
///           | tuple | set | interval
///   number := integer | decimal | integer '/' integer
///
/// An integer literal divided by an integer literal in lowest terms (denominator > 1)
/// is read as a single Number; any other quotient is a Div node.
/// Markup noise ($, \left, \right, \, \! and similar spacing) is ignored.
Expr parse_expr(std::string_view text);

}  // namespace rlvr::math
