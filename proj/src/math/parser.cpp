#include "rlvr/math/parser.hpp"

#include <array>
#include <cctype>
#include <optional>
#include <vector>

namespace rlvr::math {
namespace {

enum class Tok {
  Integer,
  Decimal,
  Symbol,
  Pi,
  Infinity,
  Sqrt,      // sqrt, \sqrt, √
  Frac,      // \frac, \dfrac, \tfrac, \cfrac
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  Bang,
  Percent,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  SetOpen,   // \{
  SetClose,  // \}
  Pipe,
  Comma,
  End,
};

struct Token {
  Tok kind;
  std::size_t begin;
  std::size_t end;
  std::string text;  // digits for numbers, name for symbols
};

bool starts_with(std::string_view s, std::size_t at, std::string_view p) {
  return s.substr(at, p.size()) == p;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_noise();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    out.push_back({Tok::End, src_.size(), src_.size(), {}});
    return out;
  }

 private:
  void skip_noise() {
    static constexpr std::array<std::string_view, 18> kSkip = {
        "\\left", "\\right", "\\bigl", "\\bigr", "\\Bigl", "\\Bigr", "\\big", "\\Big",
        "\\displaystyle", "\\qquad", "\\quad", "\\,", "\\;", "\\:", "\\!", "\\ ", "$", "~"};
    bool progressed = true;
    while (progressed && pos_ < src_.size()) {
      progressed = false;
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (std::isspace(c)) {
        ++pos_;
        progressed = true;
        continue;
      }
      for (std::string_view s : kSkip) {
        if (!starts_with(src_, pos_, s)) continue;
        // \left( etc: only skip if the command is not a prefix of a longer command name.
        const std::size_t after = pos_ + s.size();
        if (s.size() > 1 && s[0] == '\\' && std::isalpha(static_cast<unsigned char>(s.back())) &&
            after < src_.size() && std::isalpha(static_cast<unsigned char>(src_[after])))
          continue;
        pos_ = after;
        // "\right." closes an invisible delimiter.
        if ((s == "\\right" || s == "\\left") && pos_ < src_.size() && src_[pos_] == '.') ++pos_;
        progressed = true;
        break;
      }
    }
  }

  Token make(Tok k, std::size_t len, std::string text = {}) {
    Token t{k, pos_, pos_ + len, std::move(text)};
    pos_ += len;
    return t;
  }

  Token next() {
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))
      return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    switch (c) {
      case '+': return make(Tok::Plus, 1);
      case '-': return make(Tok::Minus, 1);
      case '*': return make(Tok::Star, 1);
      case '/': return make(Tok::Slash, 1);
      case '^': return make(Tok::Caret, 1);
      case '!': return make(Tok::Bang, 1);
      case '%': return make(Tok::Percent, 1);
      case '(': return make(Tok::LParen, 1);
      case ')': return make(Tok::RParen, 1);
      case '[': return make(Tok::LBrack, 1);
      case ']': return make(Tok::RBrack, 1);
      case '{': return make(Tok::LBrace, 1);
      case '}': return make(Tok::RBrace, 1);
      case '|': return make(Tok::Pipe, 1);
      case ',': return make(Tok::Comma, 1);
      case '\\': return command();
      default: break;
    }
    // UTF-8 operators and constants.
    static const std::array<std::pair<std::string_view, Tok>, 8> kUtf8 = {{
        {"·", Tok::Star},      // middle dot
        {"⋅", Tok::Star},      // dot operator
        {"×", Tok::Star},      // multiplication sign
        {"÷", Tok::Slash},     // division sign
        {"−", Tok::Minus},     // minus sign
        {"π", Tok::Pi},
        {"√", Tok::Sqrt},
        {"∞", Tok::Infinity},
    }};
    for (const auto& [s, k] : kUtf8) {
      if (starts_with(src_, pos_, s)) return make(k, s.size());
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  Token number() {
    std::size_t i = pos_;
    while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
    bool is_decimal = false;
    if (i < src_.size() && src_[i] == '.' && i + 1 < src_.size() &&
        std::isdigit(static_cast<unsigned char>(src_[i + 1]))) {
      is_decimal = true;
      ++i;
      while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
    }
    std::string text(src_.substr(pos_, i - pos_));
    return make(is_decimal ? Tok::Decimal : Tok::Integer, i - pos_, std::move(text));
  }

  Token word() {
    if (starts_with(src_, pos_, "sqrt")) return make(Tok::Sqrt, 4);
    if (starts_with(src_, pos_, "pi")) return make(Tok::Pi, 2);
    return make(Tok::Symbol, 1, std::string(1, src_[pos_]));
  }

  Token command() {
    std::size_t i = pos_ + 1;
    if (i < src_.size() && !std::isalpha(static_cast<unsigned char>(src_[i]))) {
      switch (src_[i]) {
        case '{': return make(Tok::SetOpen, 2);
        case '}': return make(Tok::SetClose, 2);
        case '%': return make(Tok::Percent, 2);
        case '|': return make(Tok::Pipe, 2);
        default: throw ParseError(pos_, "unsupported escape");
      }
    }
    while (i < src_.size() && std::isalpha(static_cast<unsigned char>(src_[i]))) ++i;
    const std::string_view name = src_.substr(pos_ + 1, i - pos_ - 1);
    const std::size_t len = i - pos_;
    if (name == "frac" || name == "dfrac" || name == "tfrac" || name == "cfrac")
      return make(Tok::Frac, len);
    if (name == "sqrt") return make(Tok::Sqrt, len);
    if (name == "pi") return make(Tok::Pi, len);
    if (name == "infty") return make(Tok::Infinity, len);
    if (name == "cdot" || name == "times" || name == "ast") return make(Tok::Star, len);
    if (name == "div") return make(Tok::Slash, len);
    if (name == "lvert" || name == "rvert" || name == "vert" || name == "mid")
      return make(Tok::Pipe, len);
    if (name == "lbrace") return make(Tok::SetOpen, len);
    if (name == "rbrace") return make(Tok::SetClose, len);
    throw ParseError(pos_, "unsupported command '\\" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Boost reads a leading 0 as an octal prefix, so digits are accumulated by hand.
Integer parse_digits(std::string_view digits) {
  Integer v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

Rational parse_decimal(const std::string& text) {
  const auto dot = text.find('.');
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const Integer num = parse_digits(digits);
  Integer den = 1;
  for (std::size_t k = 0; k < text.size() - dot - 1; ++k) den *= 10;
  return Rational(num, den);
}

/// Recursive-descent parser. Each parse_* returns the node plus whether it is a bare
/// integer literal (needed for the p/q literal rule).
class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expr parse_all() {
    if (peek().kind == Tok::End) throw ParseError(peek().begin, "empty expression");
    Expr e = expr();
    if (peek().kind != Tok::End) throw ParseError(peek().begin, "unexpected trailing input");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  const Token& advance() { return toks_[i_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(peek().begin, std::string("expected ") + what);
    return advance();
  }

  SourceSpan span_from(std::size_t begin) const {
    return {begin, i_ > 0 ? toks_[i_ - 1].end : begin};
  }

  Expr expr() {
    const std::size_t begin = peek().begin;
    Expr lhs = signed_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const bool minus = advance().kind == Tok::Minus;
      Expr rhs = signed_term();
      lhs = Expr::node(minus ? Kind::Sub : Kind::Add, {std::move(lhs), std::move(rhs)},
                       span_from(begin));
    }
    return lhs;
  }

  Expr signed_term() {
    const std::size_t begin = peek().begin;
    if (accept(Tok::Minus)) return Expr::node(Kind::Neg, {signed_term()}, span_from(begin));
    if (accept(Tok::Plus)) return signed_term();
    return term();
  }

  static bool starts_implicit(Tok k) {
    switch (k) {
      case Tok::Integer:
      case Tok::Decimal:
      case Tok::Symbol:
      case Tok::Pi:
      case Tok::Infinity:
      case Tok::Sqrt:
      case Tok::Frac:
      case Tok::LParen:
      case Tok::LBrace:
        return true;
      default:
        return false;
    }
  }

  Expr term() {
    const std::size_t begin = peek().begin;
    bool lhs_plain = false;
    bool lhs_numeric_literal = false;
    Expr lhs = factor(lhs_plain, lhs_numeric_literal);
    while (true) {
      const Tok k = peek().kind;
      if (k == Tok::Star || k == Tok::Slash) {
        advance();
        bool rhs_plain = false, rhs_lit = false;
        Expr rhs = signed_factor(rhs_plain, rhs_lit);
        if (k == Tok::Slash && lhs_plain && rhs_plain) {
          lhs = quotient_literal(std::move(lhs), std::move(rhs), span_from(begin));
        } else {
          lhs = Expr::node(k == Tok::Star ? Kind::Mul : Kind::Div, {std::move(lhs), std::move(rhs)},
                           span_from(begin));
        }
        lhs_plain = false;
        lhs_numeric_literal = false;
        continue;
      }
      if (starts_implicit(k)) {
        // "2 3" is not a product; a digit directly after a number literal is an error.
        const bool rhs_is_number = k == Tok::Integer || k == Tok::Decimal;
        if (rhs_is_number && lhs_numeric_literal) break;
        bool rhs_plain = false, rhs_lit = false;
        Expr rhs = factor(rhs_plain, rhs_lit);
        lhs = Expr::node(Kind::Mul, {std::move(lhs), std::move(rhs)}, span_from(begin));
        lhs_plain = false;
        lhs_numeric_literal = rhs_lit;
        continue;
      }
      break;
    }
    return lhs;
  }

  static Expr quotient_literal(Expr num, Expr den, SourceSpan span) {
    const Integer& p = numerator(num.value);
    const Integer& q = numerator(den.value);
    if (q > 1 && gcd(p, q) == 1) return Expr::number(Rational(p, q), span);
    return Expr::node(Kind::Div, {std::move(num), std::move(den)}, span);
  }

  Expr signed_factor(bool& plain, bool& literal) {
    const std::size_t begin = peek().begin;
    if (accept(Tok::Minus)) {
      bool p, l;
      Expr inner = signed_factor(p, l);
      plain = literal = false;
      return Expr::node(Kind::Neg, {std::move(inner)}, span_from(begin));
    }
    if (accept(Tok::Plus)) return signed_factor(plain, literal);
    return factor(plain, literal);
  }

  Expr factor(bool& plain, bool& literal) {
    const std::size_t begin = peek().begin;
    Expr e = base(plain, literal);
    while (true) {
      if (accept(Tok::Caret)) {
        Expr ex = exponent();
        e = Expr::node(Kind::Pow, {std::move(e), std::move(ex)}, span_from(begin));
      } else if (accept(Tok::Bang)) {
        e = Expr::node(Kind::Factorial, {std::move(e)}, span_from(begin));
      } else if (accept(Tok::Percent)) {
        e = Expr::node(Kind::Percent, {std::move(e)}, span_from(begin));
      } else {
        break;
      }
      plain = false;
      literal = false;
    }
    return e;
  }

  Expr exponent() {
    const std::size_t begin = peek().begin;
    if (accept(Tok::Minus)) return Expr::node(Kind::Neg, {exponent()}, span_from(begin));
    if (accept(Tok::Plus)) return exponent();
    bool p, l;
    return base(p, l);
  }

  std::vector<Expr> list_until(Tok close, const char* what) {
    std::vector<Expr> items;
    if (peek().kind == close) {
      advance();
      return items;
    }
    items.push_back(expr());
    while (accept(Tok::Comma)) items.push_back(expr());
    expect(close, what);
    return items;
  }

  Expr base(bool& plain, bool& literal) {
    plain = false;
    literal = false;
    const Token& t = peek();
    const std::size_t begin = t.begin;
    switch (t.kind) {
      case Tok::Integer: {
        advance();
        plain = literal = true;
        return Expr::number(Rational(parse_digits(t.text)), {t.begin, t.end});
      }
      case Tok::Decimal: {
        advance();
        literal = true;
        return Expr::decimal(parse_decimal(t.text), {t.begin, t.end});
      }
      case Tok::Symbol:
        advance();
        return Expr::symbol(t.text, {t.begin, t.end});
      case Tok::Pi:
        advance();
        return Expr::leaf(Kind::Pi, {t.begin, t.end});
      case Tok::Infinity:
        advance();
        return Expr::leaf(Kind::Infinity, {t.begin, t.end});
      case Tok::Sqrt: {
        advance();
        Expr inner;
        if (accept(Tok::LParen)) {
          inner = expr();
          expect(Tok::RParen, "')'");
        } else if (accept(Tok::LBrace)) {
          inner = expr();
          expect(Tok::RBrace, "'}'");
        } else {
          bool p, l;
          inner = base(p, l);
        }
        return Expr::node(Kind::Sqrt, {std::move(inner)}, span_from(begin));
      }
      case Tok::Frac: {
        advance();
        bool np = false, dp = false;
        Expr num = frac_arg(np);
        Expr den = frac_arg(dp);
        if (np && dp) return quotient_literal(std::move(num), std::move(den), span_from(begin));
        return Expr::node(Kind::Div, {std::move(num), std::move(den)}, span_from(begin));
      }
      case Tok::LParen: {
        advance();
        Expr first = expr();
        if (accept(Tok::RParen)) return first;
        if (!accept(Tok::Comma)) throw ParseError(peek().begin, "expected ')' or ','");
        std::vector<Expr> items{std::move(first)};
        items.push_back(expr());
        if (items.size() == 2 && accept(Tok::RBrack))
          return Expr::interval(std::move(items[0]), std::move(items[1]), false, true,
                                span_from(begin));
        while (accept(Tok::Comma)) items.push_back(expr());
        expect(Tok::RParen, "')'");
        return Expr::node(Kind::Tuple, std::move(items), span_from(begin));
      }
      case Tok::LBrack: {
        advance();
        std::vector<Expr> items{expr()};
        while (accept(Tok::Comma)) items.push_back(expr());
        if (items.size() == 2) {
          if (accept(Tok::RBrack))
            return Expr::interval(std::move(items[0]), std::move(items[1]), true, true,
                                  span_from(begin));
          expect(Tok::RParen, "']' or ')'");
          return Expr::interval(std::move(items[0]), std::move(items[1]), true, false,
                                span_from(begin));
        }
        expect(Tok::RBrack, "']'");
        if (items.size() == 1) return std::move(items[0]);
        return Expr::node(Kind::Tuple, std::move(items), span_from(begin));
      }
      case Tok::LBrace: {
        advance();
        std::vector<Expr> items = list_until(Tok::RBrace, "'}'");
        if (items.size() == 1) return std::move(items[0]);
        return Expr::node(Kind::Set, std::move(items), span_from(begin));
      }
      case Tok::SetOpen: {
        advance();
        return Expr::node(Kind::Set, list_until(Tok::SetClose, "'\\}'"), span_from(begin));
      }
      case Tok::Pipe: {
        advance();
        Expr inner = expr();
        expect(Tok::Pipe, "closing '|'");
        return Expr::node(Kind::Abs, {std::move(inner)}, span_from(begin));
      }
      case Tok::End:
        throw ParseError(t.begin, "unexpected end of input");
      default:
        throw ParseError(t.begin, "unexpected token");
    }
  }

  /// \frac argument: a braced expression, or a single digit / symbol (\frac12).
  Expr frac_arg(bool& plain) {
    plain = false;
    if (accept(Tok::LBrace)) {
      const bool single_int = peek().kind == Tok::Integer && peek(1).kind == Tok::RBrace;
      Expr e = expr();
      expect(Tok::RBrace, "'}'");
      plain = single_int;
      return e;
    }
    const Token& t = peek();
    if (t.kind == Tok::Integer) {
      // \frac12: each argument is one digit.
      advance();
      if (t.text.size() > 1) {
        // Split "12" into "1" and push back "2".
        Token rest{Tok::Integer, t.begin + 1, t.end, t.text.substr(1)};
        Token first{Tok::Integer, t.begin, t.begin + 1, t.text.substr(0, 1)};
        toks_[i_ - 1] = first;
        toks_.insert(toks_.begin() + static_cast<std::ptrdiff_t>(i_), rest);
      }
      plain = true;
      const Token& d = toks_[i_ - 1];
      return Expr::number(Rational(parse_digits(d.text)), {d.begin, d.end});
    }
    if (t.kind == Tok::Symbol) {
      advance();
      return Expr::symbol(t.text, {t.begin, t.end});
    }
    throw ParseError(t.begin, "expected '{' after \\frac");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) {
  Lexer lx(text);
  Parser p(lx.run());
  return p.parse_all();
}

}  // namespace rlvr::math
