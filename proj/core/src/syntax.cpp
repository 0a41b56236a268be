#include "obskernel/syntax.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace obskernel {

namespace {

enum class Tok {
  End,
  Number,
  Ident,
  Blank,  // x_, _, _T, x_T
  Slot,   // #, #n
  LBracket,
  RBracket,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  At,
  Amp,
  Bang,
  Semi,
  Arrow,         // ->
  DelayedArrow,  // :>
  Condition,     // /;
  ReplaceAll,    // /.
  Equal,
  Less,
  LessEqual,
  Greater,
  GreaterEqual,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipSpaceAndComments();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, {at, std::min(at + 1, text_.size())});
  }

  void skipSpaceAndComments() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  static bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '$'; }
  static bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '$'; }

  std::string readIdent() {
    std::size_t s = pos_;
    while (pos_ < text_.size() && identChar(text_[pos_])) ++pos_;
    return std::string(text_.substr(s, pos_ - s));
  }

  Token make(Tok kind, std::size_t start) {
    return Token{kind, std::string(text_.substr(start, pos_ - start)), {start, pos_}};
  }

  Token next() {
    std::size_t start = pos_;
    if (pos_ >= text_.size()) return Token{Tok::End, "", {pos_, pos_}};
    char c = text_[pos_];
    auto peek = [&](std::size_t k) { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; };

    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek(0)))) ++pos_;
      if (peek(0) == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        ++pos_;
        while (std::isdigit(static_cast<unsigned char>(peek(0)))) ++pos_;
      }
      if ((peek(0) == 'e' || peek(0) == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        pos_ += 2;
        while (std::isdigit(static_cast<unsigned char>(peek(0)))) ++pos_;
      }
      return make(Tok::Number, start);
    }
    if (identStart(c) || c == '_') {
      if (c != '_') readIdent();
      if (peek(0) == '_') {
        ++pos_;
        if (identStart(peek(0))) readIdent();
        return make(Tok::Blank, start);
      }
      return make(Tok::Ident, start);
    }
    if (c == '#') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek(0)))) ++pos_;
      return make(Tok::Slot, start);
    }

    auto two = text_.substr(pos_, 2);
    static const std::array<std::pair<std::string_view, Tok>, 6> pairs{{
        {"->", Tok::Arrow},
        {":>", Tok::DelayedArrow},
        {"/;", Tok::Condition},
        {"/.", Tok::ReplaceAll},
        {"<=", Tok::LessEqual},
        {">=", Tok::GreaterEqual},
    }};
    for (const auto& [spelling, kind] : pairs) {
      if (two == spelling) {
        pos_ += 2;
        return make(kind, start);
      }
    }

    ++pos_;
    switch (c) {
      case '[': return make(Tok::LBracket, start);
      case ']': return make(Tok::RBracket, start);
      case '(': return make(Tok::LParen, start);
      case ')': return make(Tok::RParen, start);
      case '{': return make(Tok::LBrace, start);
      case '}': return make(Tok::RBrace, start);
      case ',': return make(Tok::Comma, start);
      case '+': return make(Tok::Plus, start);
      case '-': return make(Tok::Minus, start);
      case '*': return make(Tok::Star, start);
      case '/': return make(Tok::Slash, start);
      case '^': return make(Tok::Caret, start);
      case '@': return make(Tok::At, start);
      case '&': return make(Tok::Amp, start);
      case '!': return make(Tok::Bang, start);
      case ';': return make(Tok::Semi, start);
      case '=': return make(Tok::Equal, start);
      case '<': return make(Tok::Less, start);
      case '>': return make(Tok::Greater, start);
      default: fail(std::string("unexpected character '") + c + "'", start);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

const std::map<std::string, std::string, std::less<>>& aliases() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"star", "Star"}, {"delta", "Delta"}, {"ul", "Underline"}, {"exp", "Exp"},
      {"log", "Log"},   {"sqrt", "Sqrt"},   {"sin", "Sin"},      {"cos", "Cos"},
      {"tan", "Tan"},   {"abs", "Absolute"}};
  return table;
}

/// Unary minus as the parser builds it; the printer inverts it exactly.
Expr negate(const Expr& u) {
  if (u.isExact()) return Expr::exact(-u.exactValue());
  if (u.isReal()) return Expr::real(-u.realValue());
  if (u.hasHead("Times") && u.size() >= 1) {
    std::vector<Expr> f(u.args().begin(), u.args().end());
    if (f[0].isExact()) {
      f[0] = Expr::exact(-f[0].exactValue());
    } else if (f[0].isReal()) {
      f[0] = Expr::real(-f[0].realValue());
    } else {
      f.insert(f.begin(), num(-1));
    }
    return times(std::move(f));
  }
  return times({num(-1), u});
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

  std::vector<Expr> statements() {
    std::vector<Expr> out;
    while (peek().kind != Tok::End) {
      if (accept(Tok::Semi)) continue;
      Expr e = replace();
      if (accept(Tok::Bang)) e = call("Assert", {e});
      out.push_back(std::move(e));
      if (peek().kind != Tok::End && peek().kind != Tok::Semi && !previousWas(Tok::Bang))
        fail("expected end of statement");
    }
    return out;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }
  bool previousWas(Tok kind) const { return pos_ > 0 && tokens_[pos_ - 1].kind == kind; }
  const Token& advance() { return tokens_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Tok::End ? " (end of input)" : " near '" + t.text + "'"), t.span);
  }
  void expect(Tok kind, const char* what) {
    if (!accept(kind)) fail(std::string("expected ") + what);
  }

  Expr replace() {
    Expr e = rule();
    while (accept(Tok::ReplaceAll)) e = call("ReplaceAll", {e, rule()});
    return e;
  }

  Expr rule() {
    Expr lhs = condition();
    if (accept(Tok::Arrow)) return call("Rule", {lhs, rule()});
    if (accept(Tok::DelayedArrow)) return call("RuleDelayed", {lhs, rule()});
    return lhs;
  }

  Expr condition() {
    Expr e = function();
    while (accept(Tok::Condition)) e = call("Condition", {e, function()});
    return e;
  }

  Expr function() {
    Expr e = relation();
    while (accept(Tok::Amp)) {
      e = call("Function", {e});
      while (peek().kind == Tok::LBracket) e = postfixSuffix(e);
    }
    return e;
  }

  Expr relation() {
    Expr lhs = arith();
    const Token& t = peek();
    const char* head = nullptr;
    switch (t.kind) {
      case Tok::Equal: head = "Equal"; break;
      case Tok::Less: head = "Less"; break;
      case Tok::LessEqual: head = "LessEqual"; break;
      case Tok::Greater: head = "Greater"; break;
      case Tok::GreaterEqual: head = "GreaterEqual"; break;
      case Tok::Ident:
        if (t.text == "in") head = "Element";
        break;
      default: break;
    }
    if (!head) return lhs;
    advance();
    return call(head, {lhs, arith()});
  }

  Expr arith() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept(Tok::Plus)) {
        terms.push_back(term());
      } else if (accept(Tok::Minus)) {
        terms.push_back(negate(term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : plus(std::move(terms));
  }

  Expr term() {
    if (accept(Tok::Minus)) return negate(term());
    return product();
  }

  Expr product() {
    std::vector<Expr> factors{composition()};
    for (;;) {
      if (accept(Tok::Star)) {
        factors.push_back(composition());
      } else if (accept(Tok::Slash)) {
        Expr divisor = composition();
        if (factors.back().isExact() && divisor.isExact() && divisor.exactValue() != 0) {
          factors.back() = Expr::exact(factors.back().exactValue() / divisor.exactValue());
        } else {
          factors.push_back(power(divisor, num(-1)));
        }
      } else {
        break;
      }
    }
    return factors.size() == 1 ? factors[0] : times(std::move(factors));
  }

  Expr composition() {
    std::vector<Expr> parts{powerExpr()};
    while (accept(Tok::At)) parts.push_back(powerExpr());
    return parts.size() == 1 ? parts[0] : call("Circle", std::move(parts));
  }

  Expr powerExpr() {
    Expr base = postfix();
    if (accept(Tok::Caret)) return power(base, exponent());
    return base;
  }

  Expr exponent() {
    if (accept(Tok::Minus)) return negate(exponent());
    return powerExpr();
  }

  Expr postfix() {
    Expr e = primary();
    while (peek().kind == Tok::LBracket) e = postfixSuffix(e);
    return e;
  }

  Expr postfixSuffix(const Expr& e) {
    expect(Tok::LBracket, "'['");
    if (peek().kind == Tok::LBracket && peek().span.start == tokens_[pos_ - 1].span.end) {
      advance();
      std::vector<Expr> parts{e};
      for (auto& a : arguments(Tok::RBracket)) parts.push_back(std::move(a));
      expect(Tok::RBracket, "']' closing part");
      expect(Tok::RBracket, "']]' closing part");
      return call("Part", std::move(parts));
    }
    std::vector<Expr> args = arguments(Tok::RBracket);
    expect(Tok::RBracket, "']'");
    return Expr::compound(e, std::move(args));
  }

  std::vector<Expr> arguments(Tok close) {
    std::vector<Expr> args;
    if (peek().kind == close) return args;
    args.push_back(replace());
    while (accept(Tok::Comma)) args.push_back(replace());
    return args;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        advance();
        return number(t);
      }
      case Tok::Ident: {
        if (t.text == "in") fail("unexpected 'in'");
        advance();
        const Token& n = peek();
        if (n.kind == Tok::LParen && n.span.start == t.span.end) {
          advance();
          std::vector<Expr> args = arguments(Tok::RParen);
          expect(Tok::RParen, "')'");
          auto alias = aliases().find(t.text);
          return call(alias != aliases().end() ? alias->second : t.text, std::move(args));
        }
        return sym(t.text);
      }
      case Tok::Blank: {
        advance();
        auto underscore = t.text.find('_');
        std::string name = t.text.substr(0, underscore);
        std::string type = t.text.substr(underscore + 1);
        Expr blank = type.empty() ? call("Blank", {}) : call("Blank", {sym(type)});
        return name.empty() ? blank : call("Pattern", {sym(name), blank});
      }
      case Tok::Slot: {
        advance();
        long long index = 1;
        if (t.text.size() > 1) index = std::stoll(t.text.substr(1));
        return call("Slot", {num(index)});
      }
      case Tok::LParen: {
        advance();
        Expr inner = replace();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBrace: {
        advance();
        std::vector<Expr> items = arguments(Tok::RBrace);
        expect(Tok::RBrace, "'}'");
        return list(std::move(items));
      }
      default: fail("unexpected token");
    }
  }

  Expr number(const Token& t) {
    bool real = t.text.find_first_of(".eE") != std::string::npos;
    if (!real) return Expr::exact(Exact(BigInt(t.text)));
    double value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError("malformed number '" + t.text + "'", t.span);
    return Expr::real(value);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer. Levels mirror the parser, loosest first.

enum Level : int {
  kReplace = 1,
  kRule,
  kCondition,
  kFunction,
  kRelation,
  kArith,
  kTerm,
  kProduct,
  kComposition,
  kPower,
  kPostfix,
  kPrimary,
};

std::string realText(double v) {
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  if (std::isnan(v)) return "Indeterminate";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

const std::map<std::string, std::string, std::less<>>& relationSpelling() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"Element", " in "}, {"Equal", " = "},   {"Less", " < "},
      {"LessEqual", " <= "}, {"Greater", " > "}, {"GreaterEqual", " >= "}};
  return table;
}

const std::map<std::string, std::string, std::less<>>& callSpelling() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"Star", "star"}, {"Delta", "delta"}, {"Underline", "ul"}};
  return table;
}

bool isIdentifier(const std::string& s) {
  if (s.empty() || s == "in") return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '$')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '$')) return false;
  return true;
}

class Printer {
 public:
  std::string operator()(const Expr& e) { return print(e, kReplace); }

 private:
  struct Out {
    std::string text;
    int level;
  };

  std::string print(const Expr& e, int minLevel) {
    Out o = render(e);
    return o.level < minLevel ? "(" + o.text + ")" : o.text;
  }

  /// The u with negate(u) == t, when t can be written as "-u".
  static std::optional<Expr> negationOf(const Expr& t) {
    std::optional<Expr> u;
    if (t.isExact() && t.exactValue() < 0) {
      u = Expr::exact(-t.exactValue());
    } else if (t.isReal() && std::signbit(t.realValue())) {
      u = Expr::real(-t.realValue());
    } else if (t.hasHead("Times") && t.size() >= 1 && t.arg(0).isNumber()) {
      const Expr& c = t.arg(0);
      bool negative = c.isExact() ? c.exactValue() < 0 : std::signbit(c.realValue());
      if (!negative) return std::nullopt;
      std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
      if (c.isExact() && c.exactValue() == -1 && !rest.empty()) {
        u = rest.size() == 1 ? rest[0] : times(rest);
      } else {
        rest.insert(rest.begin(), c.isExact() ? Expr::exact(-c.exactValue()) : Expr::real(-c.realValue()));
        u = times(rest);
      }
    }
    if (u && negate(*u) == t) return u;
    return std::nullopt;
  }

  Out render(const Expr& e) {
    if (e.isSymbol()) return {e.name(), kPrimary};
    if (e.isExact()) {
      const Exact& v = e.exactValue();
      std::string text = boost::multiprecision::numerator(v).str();
      int level = v < 0 ? kTerm : kPrimary;
      if (boost::multiprecision::denominator(v) != 1) {
        text += "/" + boost::multiprecision::denominator(v).str();
        level = v < 0 ? kTerm : kProduct;
      }
      return {text, level};
    }
    if (e.isReal()) {
      std::string t = realText(e.realValue());
      return {t, t[0] == '-' ? kTerm : kPrimary};
    }
    return renderCompound(e);
  }

  std::string joinArgs(std::span<const Expr> args) {
    std::string s;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ", ";
      s += print(args[i], kReplace);
    }
    return s;
  }

  Out renderCompound(const Expr& e) {
    const Expr& h = e.head();
    std::string hn = h.isSymbol() ? h.name() : std::string();
    std::size_t n = e.size();

    if (hn == "ReplaceAll" && n == 2)
      return {print(e.arg(0), kReplace) + " /. " + print(e.arg(1), kRule), kReplace};
    if ((hn == "Rule" || hn == "RuleDelayed") && n == 2)
      return {print(e.arg(0), kCondition) + (hn == "Rule" ? " -> " : " :> ") + print(e.arg(1), kRule),
              kRule};
    if (hn == "Condition" && n == 2)
      return {print(e.arg(0), kCondition) + " /; " + print(e.arg(1), kFunction), kCondition};
    if (hn == "Function" && n == 1) return {print(e.arg(0), kFunction) + "&", kFunction};
    if (auto rel = relationSpelling().find(hn); rel != relationSpelling().end() && n == 2)
      return {print(e.arg(0), kArith) + rel->second + print(e.arg(1), kArith), kRelation};
    if (hn == "Plus" && n >= 2) return renderPlus(e);
    if (hn == "Times" && n >= 2) {
      if (auto u = negationOf(e)) return {"-" + print(*u, kProduct), kTerm};
      std::string s;
      for (std::size_t i = 0; i < n; ++i) {
        if (i) s += "*";
        s += print(e.arg(i), kComposition);
      }
      return {s, kProduct};
    }
    if (hn == "Circle" && n >= 2) {
      std::string s;
      for (std::size_t i = 0; i < n; ++i) {
        if (i) s += "@";
        s += print(e.arg(i), kPower);
      }
      return {s, kComposition};
    }
    if (hn == "Power" && n == 2)
      return {print(e.arg(0), kPostfix) + "^" + print(e.arg(1), kPower), kPower};
    if (hn == "Part" && n >= 2) {
      return {print(e.arg(0), kPostfix) + "[[" + joinArgs(e.args().subspan(1)) + "]]", kPostfix};
    }
    if (hn == "List") return {"{" + joinArgs(e.args()) + "}", kPrimary};
    if (hn == "Slot" && n == 1 && e.arg(0).isInteger() && e.arg(0).exactValue() >= 0) {
      return {e.arg(0).exactValue() == 1 ? "#" : "#" + boost::multiprecision::numerator(e.arg(0).exactValue()).str(),
              kPrimary};
    }
    if (hn == "Blank" && n <= 1 && (n == 0 || (e.arg(0).isSymbol() && isIdentifier(e.arg(0).name()))))
      return {"_" + (n ? e.arg(0).name() : std::string()), kPrimary};
    if (hn == "Pattern" && n == 2 && e.arg(0).isSymbol() && isIdentifier(e.arg(0).name())) {
      const Expr& b = e.arg(1);
      if (b.hasHead("Blank") && b.size() <= 1 &&
          (b.size() == 0 || (b.arg(0).isSymbol() && isIdentifier(b.arg(0).name()))))
        return {e.arg(0).name() + "_" + (b.size() ? b.arg(0).name() : std::string()), kPrimary};
    }
    if (auto c = callSpelling().find(hn); c != callSpelling().end())
      return {c->second + "(" + joinArgs(e.args()) + ")", kPrimary};

    return {print(h, kPostfix) + "[" + joinArgs(e.args()) + "]", kPostfix};
  }

  Out renderPlus(const Expr& e) {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const Expr& t = e.arg(i);
      if (i == 0) {
        s = print(t, kTerm);
      } else if (auto u = negationOf(t)) {
        s += "-" + print(*u, kProduct);
      } else {
        s += "+" + print(t, kTerm);
      }
    }
    return {s, kArith};
  }
};

}  // namespace

Expr parse(std::string_view text) {
  auto stmts = parseStatements(text);
  if (stmts.size() != 1)
    throw ParseError(stmts.empty() ? "empty input" : "expected a single statement", {0, text.size()});
  return stmts.front();
}

std::vector<Expr> parseStatements(std::string_view text) { return Parser(text).statements(); }

std::string print(const Expr& e) { return Printer{}(e); }

}  // namespace obskernel
