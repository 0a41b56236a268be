#include "obskernel/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "obskernel/canonical.hpp"
#include "obskernel/funalg.hpp"
#include "obskernel/syntax.hpp"

namespace obskernel {

std::string_view reasonName(Calculability::Reason r) {
  switch (r) {
    case Calculability::Reason::None: return "none";
    case Calculability::Reason::FreeSymbol: return "free symbol";
    case Calculability::Reason::Budget: return "budget";
    case Calculability::Reason::NonNumeric: return "non-numeric normal form";
  }
  return "?";
}

Rule Rule::fromExpr(const Expr& rule) {
  bool delayed = rule.hasHead("RuleDelayed", 2);
  if (!delayed && !rule.hasHead("Rule", 2)) throw Error("not a rule: " + print(rule));
  Expr lhs = rule.arg(0), rhs = rule.arg(1);
  if (rhs.hasHead("Condition", 2)) {
    lhs = call("Condition", {lhs, rhs.arg(1)});
    rhs = rhs.arg(0);
  }
  Pattern p = Pattern::compile(lhs);
  auto key = p.key();
  return Rule{lhs, std::move(p), rhs, delayed, std::move(key), print(rule)};
}

Rule Rule::parse(std::string_view text) { return fromExpr(obskernel::parse(text)); }

namespace {

std::optional<std::string> exprKey(const Expr& e) {
  if (e.isSymbol()) return e.name();
  if (e.isCompound()) return exprKey(e.head());
  return std::nullopt;
}

bool isConstantSymbol(const Expr& e) { return e.isSymbol("Pi") || e.isSymbol("E"); }

const std::set<std::string>& numericHeads() {
  static const std::set<std::string> heads{"Plus", "Times", "Power", "Exp",  "Log",
                                           "Sqrt", "Sin",   "Cos",   "Tan",  "Absolute"};
  return heads;
}

void collectBlocking(const Expr& e, std::set<Expr, ExprLess>& out) {
  if (e.isSymbol()) {
    if (!isConstantSymbol(e)) out.insert(e);
    return;
  }
  if (e.isAtom()) return;
  if (!(e.head().isSymbol() && numericHeads().count(e.head().name()))) collectBlocking(e.head(), out);
  for (const auto& a : e.args()) collectBlocking(a, out);
}

double checked(double v, const Expr& e) {
  if (!std::isfinite(v)) throw NotNumeric("no real value for " + print(e), {});
  return v;
}

std::optional<Expr> exactFunction(const std::string& name, const Expr& x) {
  if (!x.isExact()) return std::nullopt;
  const Exact& v = x.exactValue();
  if (name == "Absolute") return Expr::exact(v < 0 ? Exact(-v) : v);
  if (name == "Exp" && v == 0) return Expr::integer(1);
  if (name == "Log" && v == 1) return Expr::integer(0);
  if ((name == "Sin" || name == "Tan") && v == 0) return Expr::integer(0);
  if (name == "Cos" && v == 0) return Expr::integer(1);
  if (name == "Sqrt" && v >= 0) return arith::power(x, Expr::rational(1, 2));
  return std::nullopt;
}

double realFunction(const std::string& name, double x) {
  if (name == "Exp") return std::exp(x);
  if (name == "Log") return x > 0 ? std::log(x) : std::nan("");
  if (name == "Sqrt") return x >= 0 ? std::sqrt(x) : std::nan("");
  if (name == "Sin") return std::sin(x);
  if (name == "Cos") return std::cos(x);
  if (name == "Tan") return std::tan(x);
  return std::fabs(x);
}

bool isUnaryFunction(const Expr& e) {
  return e.isCompound() && e.size() == 1 && e.head().isSymbol() && e.head().name() != "Plus" &&
         e.head().name() != "Times" && e.head().name() != "Power" &&
         numericHeads().count(e.head().name());
}

std::optional<int> compareNumbers(const Expr& a, const Expr& b) {
  if (!a.isNumber() || !b.isNumber()) return std::nullopt;
  if (a.isExact() && b.isExact()) {
    if (a.exactValue() < b.exactValue()) return -1;
    return a.exactValue() == b.exactValue() ? 0 : 1;
  }
  double x = a.toDouble(), y = b.toDouble();
  return x < y ? -1 : (x == y ? 0 : 1);
}

Expr boolean(bool b) { return b ? trueExpr() : falseExpr(); }

}  // namespace

double numericValue(const Expr& e) {
  if (e.isNumber()) return e.toDouble();
  if (e.isSymbol("Pi")) return M_PI;
  if (e.isSymbol("E")) return M_E;
  if (e.isCompound() && e.head().isSymbol()) {
    const std::string& h = e.head().name();
    bool known = numericHeads().count(h) > 0;
    if (known) {
      std::set<Expr, ExprLess> blocking;
      collectBlocking(e, blocking);
      if (blocking.empty()) {
        if (h == "Plus") {
          double s = 0;
          for (const auto& a : e.args()) s += numericValue(a);
          return checked(s, e);
        }
        if (h == "Times") {
          double p = 1;
          for (const auto& a : e.args()) p *= numericValue(a);
          return checked(p, e);
        }
        if (h == "Power" && e.size() == 2)
          return checked(std::pow(numericValue(e.arg(0)), numericValue(e.arg(1))), e);
        if (e.size() == 1) return checked(realFunction(h, numericValue(e.arg(0))), e);
      }
    }
  }
  std::set<Expr, ExprLess> blocking;
  collectBlocking(e, blocking);
  std::string msg = "not numeric: " + print(e);
  if (!blocking.empty()) {
    msg += " (blocked by";
    for (const auto& b : blocking) msg += " " + print(b);
    msg += ")";
  }
  throw NotNumeric(msg, {blocking.begin(), blocking.end()});
}

/// One top-level evaluation: step counter, recursion depth and a normal-form memo.
class Evaluator final : public Context {
 public:
  explicit Evaluator(Session& s) : s_(s) {}

  Session& session() override { return s_; }
  Expr evaluate(const Expr& e) override { return eval(e); }

  void assertRelation(const Expr& rel) {
    if (rel.hasHead("And")) {
      for (const auto& a : rel.args()) assertRelation(a);
      return;
    }
    Expr ground = rel;
    if (rel.isCompound()) {
      std::vector<Expr> args;
      for (const auto& a : rel.args())
        args.push_back(rel.hasHead("Element") && !args.empty() ? a : eval(a));
      ground = Expr::compound(rel.head(), std::move(args));
    }
    s_.facts_.add(ground);
    memo_.clear();
  }

 private:
  struct DepthGuard {
    std::size_t& d;
    explicit DepthGuard(std::size_t& depth) : d(depth) { ++d; }
    ~DepthGuard() { --d; }
  };

  Expr eval(const Expr& e) {
    DepthGuard guard(depth_);
    if (depth_ > s_.budgets_.recursion)
      throw BudgetExceeded("recursion budget of " + std::to_string(s_.budgets_.recursion) +
                               " exceeded",
                           e);
    if (e.isNumber()) return e;
    if (auto it = memo_.find(e); it != memo_.end()) return it->second;

    Expr cur = e;
    while (true) {
      if (cur.isCompound()) {
        Expr node = children(cur);
        if (!node.isCompound()) {
          cur = node;
          if (cur.isNumber()) break;
          continue;
        }
        cur = node;
        if (auto b = builtin(cur)) {
          step(cur, *b, "builtin");
          cur = *b;
          continue;
        }
      }
      if (cur.isNumber()) break;
      if (auto r = rules(cur)) {
        step(cur, r->first, r->second);
        cur = r->first;
        continue;
      }
      break;
    }
    memo_.emplace(e, cur);
    return cur;
  }

  void step(const Expr& before, const Expr& after, const std::string& label) {
    if (s_.trace_) s_.trace_(before, after, label);
    if (++steps_ > s_.budgets_.steps)
      throw BudgetExceeded("step budget of " + std::to_string(s_.budgets_.steps) + " exceeded",
                           after);
  }

  Expr children(const Expr& e) {
    Expr head;
    try {
      head = eval(e.head());
    } catch (BudgetExceeded& b) {
      b.setPartial(Expr::compound(b.partial(), {e.args().begin(), e.args().end()}));
      throw;
    }
    std::vector<Expr> args(e.args().begin(), e.args().end());
    if (!isHoldingHead(head) && !head.isSymbol("Assert")) {
      // Set operands of Element are names, never evaluated.
      std::size_t count = head.isSymbol("Element") ? std::min<std::size_t>(1, args.size()) : args.size();
      for (std::size_t i = 0; i < count; ++i) {
        try {
          args[i] = eval(args[i]);
        } catch (BudgetExceeded& b) {
          args[i] = b.partial();
          b.setPartial(Expr::compound(head, std::move(args)));
          throw;
        }
      }
    }
    return canonicalNode(head, std::move(args));
  }

  std::optional<std::pair<Expr, std::string>> rules(const Expr& e) {
    auto key = exprKey(e);
    ConditionOracle oracle = [this](const Expr& c) { return eval(c); };
    auto tryPack = [&](const Pack& pack) -> std::optional<std::pair<Expr, std::string>> {
      for (const auto& any : pack.rules) {
        if (const auto* r = std::get_if<Rule>(&any)) {
          if (r->key && r->key != key) continue;
          auto b = match(r->pattern, e, oracle);
          if (!b) continue;
          Expr out = substitute(r->rhs, *b);
          if (out != e) return std::pair{out, pack.name + ": " + r->label};
        } else {
          const auto& n = std::get<NativeRule>(any);
          if (n.key && n.key != key) continue;
          auto out = n.apply(*this, e);
          if (out && *out != e) return std::pair{*out, pack.name + ": " + n.name};
        }
      }
      return std::nullopt;
    };
    if (auto r = tryPack(s_.user_)) return r;
    for (const auto& p : s_.packs_)
      if (auto r = tryPack(p)) return r;
    return std::nullopt;
  }

  std::optional<Expr> builtin(const Expr& e) {
    const Expr& h = e.head();
    if (h.hasHead("Function")) return applyFunction(h, e.args());
    if (h.isNumber() && e.size() > 0) return h;
    if (!h.isSymbol()) return std::nullopt;
    const std::string& n = h.name();
    std::size_t argc = e.size();

    if (n == "Assert" && argc == 1) {
      assertRelation(e.arg(0));
      return trueExpr();
    }
    if (n == "Element" && argc == 2) return element(e.arg(0), e.arg(1));
    if (n == "Equal" && argc == 2) {
      if (e.arg(0) == e.arg(1) || s_.facts_.identical(e.arg(0), e.arg(1))) return trueExpr();
      if (auto c = compareNumbers(e.arg(0), e.arg(1))) return boolean(*c == 0);
      return std::nullopt;
    }
    if ((n == "Less" || n == "LessEqual" || n == "Greater" || n == "GreaterEqual") && argc == 2) {
      auto c = compareNumbers(e.arg(0), e.arg(1));
      if (!c) return std::nullopt;
      if (n == "Less") return boolean(*c < 0);
      if (n == "LessEqual") return boolean(*c <= 0);
      if (n == "Greater") return boolean(*c > 0);
      return boolean(*c >= 0);
    }
    if (n == "SameQ" && argc == 2) return boolean(e.arg(0) == e.arg(1));
    if (n == "UnsameQ" && argc == 2) return boolean(e.arg(0) != e.arg(1));
    if (n == "And") {
      bool all = true;
      for (const auto& a : e.args()) {
        if (isFalse(a)) return falseExpr();
        all = all && isTrue(a);
      }
      return all ? std::optional<Expr>(trueExpr()) : std::nullopt;
    }
    if (n == "Or") {
      bool all = true;
      for (const auto& a : e.args()) {
        if (isTrue(a)) return trueExpr();
        all = all && isFalse(a);
      }
      return all ? std::optional<Expr>(falseExpr()) : std::nullopt;
    }
    if (n == "Not" && argc == 1) {
      if (isTrue(e.arg(0))) return falseExpr();
      if (isFalse(e.arg(0))) return trueExpr();
      return std::nullopt;
    }
    if (n == "Identity" && argc == 1) return e.arg(0);
    if (n == "Depth" && argc == 1) return Expr::integer(static_cast<long long>(depth(e.arg(0))));
    if (n == "LeafCount" && argc == 1)
      return Expr::integer(static_cast<long long>(leafCount(e.arg(0))));
    if (n == "Part" && argc >= 2) return part(e);
    if (n == "N" && argc == 1) {
      try {
        return Expr::real(numericValue(e.arg(0)));
      } catch (const NotNumeric&) {
        return std::nullopt;
      }
    }
    if (n == "Expand" && argc == 1) return expand(e.arg(0));
    if (n == "ReplaceAll" && argc == 2) return replaceAll(e.arg(0), e.arg(1));
    if (n == "Rho" && argc == 1) {
      auto it = s_.eigeninputs_.find(e.arg(0));
      if (it != s_.eigeninputs_.end()) return Expr::real(it->second);
      return std::nullopt;
    }
    if (isUnaryFunction(e)) {
      if (auto x = exactFunction(n, e.arg(0))) return x;
      if (e.arg(0).isReal()) {
        double v = realFunction(n, e.arg(0).realValue());
        if (std::isfinite(v)) return Expr::real(v);
      }
    }
    return std::nullopt;
  }

  std::optional<Expr> element(const Expr& x, const Expr& set) {
    if (s_.facts_.member(x, set)) return trueExpr();
    if (set.isSymbol("Reals") && (x.isNumber() || isConstantSymbol(x))) return trueExpr();
    if (set.isSymbol("Rationals") && x.isExact()) return trueExpr();
    if (set.isSymbol("Integers") && x.isInteger()) return trueExpr();
    return std::nullopt;
  }

  std::optional<Expr> part(const Expr& e) {
    Expr cur = e.arg(0);
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!e.arg(i).isInteger() || cur.isAtom()) return std::nullopt;
      auto k = e.arg(i).exactValue().convert_to<long long>();
      auto size = static_cast<long long>(cur.size());
      if (k < 0) k = size + 1 + k;
      if (k < 0 || k > size) return std::nullopt;
      cur = k == 0 ? cur.head() : cur.arg(static_cast<std::size_t>(k - 1));
    }
    return cur;
  }

  std::optional<Expr> replaceAll(const Expr& target, const Expr& spec) {
    std::vector<Rule> rs;
    try {
      if (spec.hasHead("List")) {
        for (const auto& r : spec.args()) rs.push_back(Rule::fromExpr(r));
      } else {
        rs.push_back(Rule::fromExpr(spec));
      }
    } catch (const PatternError&) {
      throw;
    } catch (const Error&) {
      return std::nullopt;
    }
    ConditionOracle oracle = [this](const Expr& c) { return eval(c); };
    std::function<Expr(const Expr&)> walk = [&](const Expr& x) -> Expr {
      for (const auto& r : rs)
        if (auto b = match(r.pattern, x, oracle)) return substitute(r.rhs, *b);
      if (x.isAtom()) return x;
      Expr head = walk(x.head());
      std::vector<Expr> args;
      for (const auto& a : x.args()) args.push_back(walk(a));
      return Expr::compound(head, std::move(args));
    };
    return walk(target);
  }

  Session& s_;
  std::size_t steps_ = 0;
  std::size_t depth_ = 0;
  std::unordered_map<Expr, Expr, ExprHash> memo_;
};

Session::Session(Budgets budgets) : budgets_(budgets) {}

void Session::install(const Pack& pack) {
  if (hasPack(pack.name)) return;
  packs_.push_back(pack);
  for (const auto& [name, rule] : pack.inferences) facts_.addInference(name, rule);
  for (const auto& f : pack.facts) facts_.add(f);
}

Session Session::withLeadingPack(const Pack& pack) const {
  Session copy = *this;
  if (copy.hasPack(pack.name)) return copy;
  copy.packs_.insert(copy.packs_.begin(), pack);
  for (const auto& [name, rule] : pack.inferences) copy.facts_.addInference(name, rule);
  for (const auto& f : pack.facts) copy.facts_.add(f);
  return copy;
}

bool Session::hasPack(std::string_view name) const {
  for (const auto& p : packs_)
    if (p.name == name) return true;
  return false;
}

std::vector<std::string> Session::packNames() const {
  std::vector<std::string> out;
  for (const auto& p : packs_) out.push_back(p.name);
  return out;
}

void Session::addRule(const Expr& rule) {
  Rule r = Rule::fromExpr(rule);
  if (!r.delayed) r.rhs = evaluate(r.rhs);
  user_.rules.emplace_back(std::move(r));
}

void Session::assertFact(const Expr& rel) {
  Evaluator ev(*this);
  ev.assertRelation(rel);
}

Expr Session::evaluate(const Expr& e) {
  Evaluator ev(*this);
  return ev.evaluate(e);
}

Expr Session::numeric(const Expr& e) { return Expr::real(numericValue(evaluate(e))); }

Calculability Session::calculable(const Expr& e, AtomKind target) {
  Calculability c;
  try {
    if (target == AtomKind::Real) {
      c.value = numeric(e);
    } else {
      Expr v = evaluate(e);
      if (!(v.isAtom() && v.kind() == target)) {
        c.reason = Calculability::Reason::NonNumeric;
        std::set<Expr, ExprLess> blocking;
        collectBlocking(v, blocking);
        c.blocking.assign(blocking.begin(), blocking.end());
        if (!c.blocking.empty() && target != AtomKind::Symbol)
          c.reason = Calculability::Reason::FreeSymbol;
        return c;
      }
      c.value = v;
    }
    c.ok = true;
  } catch (const BudgetExceeded&) {
    c.reason = Calculability::Reason::Budget;
  } catch (const NotNumeric& n) {
    c.blocking = n.blocking();
    c.reason = c.blocking.empty() ? Calculability::Reason::NonNumeric
                                  : Calculability::Reason::FreeSymbol;
  }
  return c;
}

double Session::complexity(const Expr& e) {
  try {
    return static_cast<double>(leafCount(canonicalize(evaluate(e))));
  } catch (const BudgetExceeded&) {
    return std::numeric_limits<double>::infinity();
  }
}

IdentityWitness Session::conveysIdentity(const Expr& f,
                                         const std::vector<std::pair<Expr, Expr>>& pairs) {
  IdentityWitness w;
  for (const auto& [x, y] : pairs) {
    Expr fx = canonicalize(evaluate(call(f, {x})));
    Expr fy = canonicalize(evaluate(call(f, {y})));
    if (fx == fy || facts_.identical(fx, fy)) continue;
    w.conveys = false;
    w.pair = std::pair{x, y};
    w.images = std::pair{fx, fy};
    return w;
  }
  return w;
}

bool moreSpecialized(Session& first, Session& second, const Expr& x) {
  return first.complexity(x) <= second.complexity(x);
}

}  // namespace obskernel
