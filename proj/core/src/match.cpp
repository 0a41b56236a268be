#include "obskernel/match.hpp"

#include <algorithm>

#include "obskernel/canonical.hpp"

namespace obskernel {

namespace {

std::optional<AtomKind> blankType(const std::string& name) {
  if (name == "Integer") return AtomKind::Integer;
  if (name == "Rational") return AtomKind::Rational;
  if (name == "Real") return AtomKind::Real;
  if (name == "Symbol") return AtomKind::Symbol;
  return std::nullopt;
}

bool containsPatternSyntax(const Expr& e) {
  if (e.isAtom()) return false;
  if (e.hasHead("Blank") || e.hasHead("Pattern") || e.hasHead("Condition")) return true;
  if (containsPatternSyntax(e.head())) return true;
  return std::any_of(e.args().begin(), e.args().end(), containsPatternSyntax);
}

Pattern::Blank compileBlank(const Expr& blank) {
  Pattern::Blank b;
  if (blank.size() == 1) {
    if (!blank.arg(0).isSymbol()) throw PatternError("blank type must be a symbol");
    b.type = blankType(blank.arg(0).name());
    if (!b.type) throw PatternError("unknown blank type '" + blank.arg(0).name() + "'");
  } else if (blank.size() != 0) {
    throw PatternError("Blank takes at most one argument");
  }
  return b;
}

std::optional<std::string> innermostHead(const Expr& e) {
  if (e.isSymbol()) return e.name();
  if (e.isCompound()) return innermostHead(e.head());
  return std::nullopt;
}

struct Matcher {
  const ConditionOracle& oracle;

  using Cont = std::function<bool(Bindings&)>;

  bool conditionHolds(const Expr& predicate, const Bindings& b) const {
    Expr p = substitute(predicate, b);
    Expr v = oracle ? oracle(p) : p;
    return isTrue(v);
  }

  bool typeMatches(AtomKind type, const Expr& e) const {
    return e.isAtom() && e.kind() == type;
  }

  bool run(const Pattern& p, const Expr& e, Bindings& b, const Cont& k) const {
    return std::visit([&](const auto& node) { return step(node, e, b, k); }, p.node());
  }

  bool step(const Pattern::Blank& node, const Expr& e, Bindings& b, const Cont& k) const {
    if (node.type && !typeMatches(*node.type, e)) return false;
    if (!node.name) return k(b);
    auto it = b.find(*node.name);
    if (it != b.end()) return it->second == e && k(b);
    b.emplace(*node.name, e);
    if (k(b)) return true;
    b.erase(*node.name);
    return false;
  }

  bool step(const Pattern::Literal& node, const Expr& e, Bindings& b, const Cont& k) const {
    return node.value == e && k(b);
  }

  bool step(const Pattern::Conditional& node, const Expr& e, Bindings& b, const Cont& k) const {
    return run(*node.inner, e, b, [&](Bindings& inner) {
      return conditionHolds(node.predicate, inner) && k(inner);
    });
  }

  bool step(const Pattern::Compound& node, const Expr& e, Bindings& b, const Cont& k) const {
    if (!e.isCompound()) return false;
    std::size_t n = e.size(), m = node.args.size();
    if (m > n || (m < n && !(node.flat && m >= 1))) return false;
    return run(*node.head, e.head(), b, [&](Bindings& hb) {
      if (node.orderless) {
        std::vector<bool> used(n, false);
        return orderless(node, e, 0, used, hb, k);
      }
      return ordered(node, e, 0, hb, k);
    });
  }

  /// Remaining arguments from `from`, grouped under the head when more than one.
  static Expr group(const Expr& e, const std::vector<Expr>& rest) {
    if (rest.size() == 1) return rest[0];
    return Expr::compound(e.head(), rest);
  }

  bool ordered(const Pattern::Compound& node, const Expr& e, std::size_t i, Bindings& b,
               const Cont& k) const {
    std::size_t m = node.args.size();
    if (i == m) return k(b);
    if (i + 1 == m && e.size() > m) {
      std::vector<Expr> rest(e.args().begin() + static_cast<std::ptrdiff_t>(i), e.args().end());
      return run(node.args[i], group(e, rest), b, k);
    }
    return run(node.args[i], e.arg(i), b,
               [&](Bindings& nb) { return ordered(node, e, i + 1, nb, k); });
  }

  bool orderless(const Pattern::Compound& node, const Expr& e, std::size_t i,
                 std::vector<bool>& used, Bindings& b, const Cont& k) const {
    std::size_t m = node.args.size();
    if (i == m) return k(b);
    if (i + 1 == m && e.size() > m) {
      std::vector<Expr> rest;
      for (std::size_t j = 0; j < e.size(); ++j)
        if (!used[j]) rest.push_back(e.arg(j));
      return run(node.args[i], group(e, rest), b, k);
    }
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      bool ok = run(node.args[i], e.arg(j), b,
                    [&](Bindings& nb) { return orderless(node, e, i + 1, used, nb, k); });
      used[j] = false;
      if (ok) return true;
    }
    return false;
  }
};

}  // namespace

Pattern Pattern::compile(const Expr& e) {
  if (e.hasHead("Blank")) return Pattern(compileBlank(e));
  if (e.hasHead("Pattern")) {
    if (e.size() != 2 || !e.arg(0).isSymbol() || !e.arg(1).hasHead("Blank"))
      throw PatternError("only named blanks (x_, x_T) are supported");
    Blank b = compileBlank(e.arg(1));
    b.name = e.arg(0).name();
    return Pattern(b);
  }
  if (e.hasHead("Condition", 2))
    return Pattern(Conditional{std::make_shared<const Pattern>(compile(e.arg(0))), e.arg(1)});
  if (!containsPatternSyntax(e)) return Pattern(Literal{e});

  Compound c;
  c.head = std::make_shared<const Pattern>(compile(e.head()));
  for (const auto& a : e.args()) c.args.push_back(compile(a));
  const Expr& h = e.head();
  c.orderless = h.isSymbol("Plus") || h.isSymbol("Times");
  c.flat = c.orderless || h.isSymbol("Circle");
  return Pattern(std::move(c));
}

std::set<std::string> Pattern::names() const {
  std::set<std::string> out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Blank>) {
          if (node.name) out.insert(*node.name);
        } else if constexpr (std::is_same_v<T, Conditional>) {
          out = node.inner->names();
        } else if constexpr (std::is_same_v<T, Compound>) {
          out = node.head->names();
          for (const auto& a : node.args) out.merge(a.names());
        }
      },
      node_);
  return out;
}

std::optional<std::string> Pattern::key() const {
  return std::visit(
      [](const auto& node) -> std::optional<std::string> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return innermostHead(node.value);
        } else if constexpr (std::is_same_v<T, Conditional>) {
          return node.inner->key();
        } else if constexpr (std::is_same_v<T, Compound>) {
          return node.head->key();
        } else {
          return std::nullopt;
        }
      },
      node_);
}

std::optional<Bindings> match(const Pattern& p, const Expr& e, const ConditionOracle& oracle) {
  Matcher m{oracle};
  Bindings b;
  std::optional<Bindings> result;
  m.run(p, e, b, [&](Bindings& done) {
    result = done;
    return true;
  });
  return result;
}

Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  if (e.isSymbol()) {
    auto it = b.find(e.name());
    return it != b.end() ? it->second : e;
  }
  if (e.isAtom()) return e;
  if (e.hasHead("Pattern", 2) && e.arg(0).isSymbol()) {
    auto it = b.find(e.arg(0).name());
    if (it != b.end()) return it->second;
  }
  Expr head = substitute(e.head(), b);
  bool changed = head != e.head();
  std::vector<Expr> args;
  args.reserve(e.size());
  for (const auto& a : e.args()) {
    args.push_back(substitute(a, b));
    changed = changed || args.back() != a;
  }
  return changed ? Expr::compound(std::move(head), std::move(args)) : e;
}

namespace {

bool contains(const Expr& haystack, const Expr& needle) {
  if (haystack == needle) return true;
  if (haystack.isAtom()) return false;
  if (contains(haystack.head(), needle)) return true;
  return std::any_of(haystack.args().begin(), haystack.args().end(),
                     [&](const Expr& a) { return contains(a, needle); });
}

}  // namespace

bool occurs(const Expr& x, const Expr& f) { return contains(canonicalize(f), canonicalize(x)); }

}  // namespace obskernel
