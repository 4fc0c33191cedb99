#pragma once

#include "oplab/chain.hpp"
#include "oplab/errors.hpp"
#include "oplab/operator_word.hpp"
#include "oplab/relation.hpp"
#include "oplab/scalar_expr.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oplab {

/// lhs relation rhs, as read from text (no family/member attached).
struct ChainRelation {
  OperatorWord lhs;
  Relation relation;
  OperatorWord rhs;

  bool operator==(const ChainRelation&) const = default;
};

// ---------------------------------------------------------------------------
// Printing

inline std::string pretty_print(const OperatorWord& w);

namespace detail {

inline std::string print_factor(const OperatorWord& w) {
  if (w.is_product()) return "(" + pretty_print(w) + ")";
  return pretty_print(w);
}

}  // namespace detail

inline std::string pretty_print(const OperatorWord& w) {
  if (w.is_symbol()) {
    const auto& s = w.as_symbol();
    return "A" + std::to_string(s.index) + "^{" + s.exponent.to_string() + "}";
  }
  if (w.is_power()) {
    const auto& p = w.as_power();
    return "(" + pretty_print(*p.base) + ")^{" + p.exponent.to_string() + "}";
  }
  std::string out;
  const auto& f = w.as_product().factors;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ' ';
    out += detail::print_factor(f[i]);
  }
  return out;
}

inline std::string relation_token(Relation r) {
  if (r == Relation::GE) return ">=";
  if (r == Relation::LE) return "<=";
  throw RangeError("relation_token: only >= and <= are printable");
}

inline std::string pretty_print(const ChainRelation& c) {
  return pretty_print(c.lhs) + " " + relation_token(c.relation) + " " + pretty_print(c.rhs);
}

inline std::string pretty_print(const ChainInequality& c) {
  return pretty_print(c.lhs) + " " + relation_token(c.relation) + " " + pretty_print(c.rhs);
}

/// Collapses whitespace runs to one space and trims both ends.
inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexing

enum class TokenKind { SymbolA, Name, Number, LParen, RParen, Caret, LBrace, RBrace, Plus, Minus, Slash, Ge, Le, End };

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src, int first_line = 1) : src_(src), line_(first_line) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      const int line = line_, col = col_;
      if (pos_ >= src_.size()) {
        out.push_back({TokenKind::End, "", line, col});
        return out;
      }
      const char c = src_[pos_];
      if (c == 'A') {
        advance();
        std::string digits = take_digits();
        if (digits.empty()) throw ParseError("expected operator index after 'A'", line, col);
        out.push_back({TokenKind::SymbolA, digits, line, col});
      } else if (std::islower(static_cast<unsigned char>(c))) {
        std::string name;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) name += advance();
        out.push_back({TokenKind::Name, name, line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back({TokenKind::Number, take_number(line, col), line, col});
      } else if (c == '>' || c == '<') {
        advance();
        if (pos_ >= src_.size() || src_[pos_] != '=')
          throw ParseError(std::string("expected '=' after '") + c + "'", line, col);
        advance();
        out.push_back({c == '>' ? TokenKind::Ge : TokenKind::Le, c == '>' ? ">=" : "<=", line, col});
      } else {
        TokenKind kind;
        switch (c) {
          case '(': kind = TokenKind::LParen; break;
          case ')': kind = TokenKind::RParen; break;
          case '^': kind = TokenKind::Caret; break;
          case '{': kind = TokenKind::LBrace; break;
          case '}': kind = TokenKind::RBrace; break;
          case '+': kind = TokenKind::Plus; break;
          case '-': kind = TokenKind::Minus; break;
          case '/': kind = TokenKind::Slash; break;
          default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        advance();
        out.push_back({kind, std::string(1, c), line, col});
      }
    }
  }

 private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string take_digits() {
    std::string d;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) d += advance();
    return d;
  }

  std::string take_number(int line, int col) {
    std::string s = take_digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      s += advance();
      const std::string frac = take_digits();
      if (frac.empty()) throw ParseError("malformed number", line, col);
      s += frac;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) s += advance();
        s += take_digits();
      }
    }
    return s;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parsing
//
//   chain  := word rel word            rel := '>=' | '<='
//   word   := factor+                  (juxtaposition is product)
//   factor := atom ['^' '{' sexpr '}']
//   atom   := 'A' int | '(' word ')'
//   sexpr  := ['-'] sterm (('+'|'-') sterm)*
//   sterm  := name | number | name '/' number | number '/' number

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::variant<OperatorWord, ChainRelation> parse_any() {
    OperatorWord lhs = word();
    if (peek().kind == TokenKind::Ge || peek().kind == TokenKind::Le) {
      const Relation rel = take().kind == TokenKind::Ge ? Relation::GE : Relation::LE;
      OperatorWord rhs = word();
      expect(TokenKind::End, "end of input");
      return ChainRelation{std::move(lhs), rel, std::move(rhs)};
    }
    expect(TokenKind::End, "end of input or relation");
    return lhs;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string got = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + what + ", got " + got, t.line, t.column);
  }

  const Token& expect(TokenKind kind, const std::string& what) {
    if (peek().kind != kind) fail(what);
    return take();
  }

  bool starts_factor() const { return peek().kind == TokenKind::SymbolA || peek().kind == TokenKind::LParen; }

  OperatorWord word() {
    if (!starts_factor()) fail("operator symbol or '('");
    std::vector<OperatorWord> factors;
    while (starts_factor()) factors.push_back(factor());
    return OperatorWord::product(std::move(factors));
  }

  OperatorWord factor() {
    if (peek().kind == TokenKind::SymbolA) {
      const Token& t = take();
      int index = 0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), index);
      if (res.ec != std::errc() || index < 1) throw ParseError("operator index must be >= 1", t.line, t.column);
      ScalarExpr e = peek().kind == TokenKind::Caret ? exponent() : ScalarExpr::literal(1.0);
      return OperatorWord::symbol(index, std::move(e));
    }
    expect(TokenKind::LParen, "'('");
    OperatorWord inner = word();
    expect(TokenKind::RParen, "')'");
    if (peek().kind == TokenKind::Caret) return OperatorWord::power(std::move(inner), exponent());
    return inner;
  }

  ScalarExpr exponent() {
    expect(TokenKind::Caret, "'^'");
    expect(TokenKind::LBrace, "'{'");
    std::vector<ScalarTerm> terms;
    bool negative = false;
    if (peek().kind == TokenKind::Minus) {
      take();
      negative = true;
    }
    terms.push_back(term(negative));
    while (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
      negative = take().kind == TokenKind::Minus;
      terms.push_back(term(negative));
    }
    expect(TokenKind::RBrace, "'}'");
    return ScalarExpr(std::move(terms));
  }

  static double to_number(const Token& t) {
    double v = 0.0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
      throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
    return v;
  }

  ScalarTerm term(bool negative) {
    ScalarTerm st;
    st.negative = negative;
    if (peek().kind == TokenKind::Name) {
      const Token& t = take();
      if (!is_scalar_name(t.text))
        throw ParseError("exponent name '" + t.text + "' outside vocabulary {r, t<i>, p<i>, w<i>}", t.line, t.column);
      st.atom = t.text;
    } else if (peek().kind == TokenKind::Number) {
      st.atom = to_number(take());
    } else {
      fail("scalar name or number");
    }
    if (peek().kind == TokenKind::Slash) {
      take();
      const Token& d = expect(TokenKind::Number, "number after '/'");
      st.divisor = to_number(d);
    }
    return st;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline std::variant<OperatorWord, ChainRelation> parse(std::string_view src) {
  return Parser(Lexer(src).tokenize()).parse_any();
}

inline OperatorWord parse_word(std::string_view src) {
  auto v = parse(src);
  if (!std::holds_alternative<OperatorWord>(v)) throw ParseError("expected a word, found an inequality", 1, 1);
  return std::get<OperatorWord>(std::move(v));
}

inline ChainRelation parse_chain(std::string_view src, int first_line = 1) {
  auto v = Parser(Lexer(src, first_line).tokenize()).parse_any();
  if (!std::holds_alternative<ChainRelation>(v))
    throw ParseError("expected an inequality 'word >= word' or 'word <= word'", first_line, 1);
  return std::get<ChainRelation>(std::move(v));
}

struct GoldenEntry {
  int line = 0;
  std::string text;   // whitespace-normalized source line, comment stripped
  ChainRelation chain;
};

/// Reads a golden file: one inequality per line, `#` starts a comment.
inline std::vector<GoldenEntry> parse_golden(std::string_view content) {
  std::vector<GoldenEntry> out;
  std::istringstream in{std::string(content)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = normalize_whitespace(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    out.push_back({line, body, parse_chain(body, line)});
  }
  return out;
}

}  // namespace oplab
