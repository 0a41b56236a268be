#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "obskernel/errors.hpp"
#include "obskernel/expr.hpp"
#include "obskernel/facts.hpp"
#include "obskernel/match.hpp"

namespace obskernel {

class Context;

/// A rewrite rule `lhs -> rhs` (immediate) or `lhs :> rhs` (delayed). A condition
/// written on either side (`lhs /; c -> rhs` or `lhs -> rhs /; c`) is folded into
/// the pattern.
struct Rule {
  Expr lhs;
  Pattern pattern;
  Expr rhs;
  bool delayed = false;
  std::optional<std::string> key;
  std::string label;

  static Rule fromExpr(const Expr& rule);
  /// Parses `lhs -> rhs` / `lhs :> rhs` surface text.
  static Rule parse(std::string_view text);
};

/// Rule implemented in C++. Returns the replacement, or nullopt when it does not
/// apply. `key`, when set, restricts the rule to expressions with that head symbol.
struct NativeRule {
  std::string name;
  std::optional<std::string> key;
  std::function<std::optional<Expr>(Context&, const Expr&)> apply;
};

using AnyRule = std::variant<Rule, NativeRule>;

/// Named, immutable bundle of rules, initial facts and inference rules.
struct Pack {
  std::string name;
  std::vector<AnyRule> rules;
  std::vector<Expr> facts;
  std::vector<std::pair<std::string, InferenceRule>> inferences;
};

struct Budgets {
  std::size_t steps = 4096;
  std::size_t recursion = 256;
  double tolerance = 1e-10;
};

/// Outcome of a calculability check.
struct Calculability {
  enum class Reason { None, FreeSymbol, Budget, NonNumeric };
  bool ok = false;
  Reason reason = Reason::None;
  std::optional<Expr> value;
  std::vector<Expr> blocking;
};

std::string_view reasonName(Calculability::Reason r);

/// Result of conveysIdentity: holds, or the first pair (x, y) with f[x] != f[y].
struct IdentityWitness {
  bool conveys = true;
  std::optional<std::pair<Expr, Expr>> pair;
  std::optional<std::pair<Expr, Expr>> images;
};

using TraceHook = std::function<void(const Expr& before, const Expr& after, const std::string& rule)>;

/// Evaluation context: ordered rule packs, a monotone fact base, budgets and the
/// eigeninput cache. User rules live in a pack named "user" that is consulted
/// before every other pack.
class Session {
 public:
  Session() = default;
  explicit Session(Budgets budgets);

  /// Installs a pack after the ones already present; a pack name is installed once.
  void install(const Pack& pack);
  bool hasPack(std::string_view name) const;
  /// Copy of this session with `pack` consulted before every installed pack.
  Session withLeadingPack(const Pack& pack) const;
  std::vector<std::string> packNames() const;

  /// Adds a user rule (Rule[...] or RuleDelayed[...]). Immediate rules get their
  /// right-hand side evaluated once, here.
  void addRule(const Expr& rule);

  /// Asserts a relation (And[...] asserts each operand). Arguments of the relation
  /// are evaluated first; nothing checks consistency.
  void assertFact(const Expr& rel);

  const FactBase& facts() const { return facts_; }

  Expr evaluate(const Expr& e);

  /// Evaluates, then folds to a double. Throws NotNumeric listing blocking symbols,
  /// BudgetExceeded when evaluation does not terminate.
  Expr numeric(const Expr& e);

  Calculability calculable(const Expr& e, AtomKind target = AtomKind::Real);

  /// Leaf count of the canonical normal form; infinity when evaluation exceeds
  /// the budget.
  double complexity(const Expr& e);

  /// Applies f to both sides of every pair and compares canonical forms.
  IdentityWitness conveysIdentity(const Expr& f, const std::vector<std::pair<Expr, Expr>>& pairs);

  Budgets& budgets() { return budgets_; }
  const Budgets& budgets() const { return budgets_; }

  void setTrace(TraceHook hook) { trace_ = std::move(hook); }
  const TraceHook& trace() const { return trace_; }

  /// Eigeninputs by material-system tag; Rho[T] evaluates to the cached value.
  std::map<Expr, double, ExprLess>& eigeninputs() { return eigeninputs_; }
  const std::map<Expr, double, ExprLess>& eigeninputs() const { return eigeninputs_; }

  /// Servo results keyed by the full declaration (T, R, S, bracket, tolerance).
  std::map<Expr, double, ExprLess>& servoCache() { return servoCache_; }

  const std::vector<Pack>& packs() const { return packs_; }

 private:
  friend class Evaluator;

  std::vector<Pack> packs_;
  Pack user_{"user", {}, {}, {}};
  FactBase facts_;
  Budgets budgets_;
  TraceHook trace_;
  std::map<Expr, double, ExprLess> eigeninputs_;
  std::map<Expr, double, ExprLess> servoCache_;
};

/// What native rules see: the session plus evaluation sharing the caller's budget.
class Context {
 public:
  virtual ~Context() = default;
  virtual Session& session() = 0;
  virtual Expr evaluate(const Expr& e) = 0;
  const FactBase& facts() { return session().facts(); }
  bool member(const Expr& x, std::string_view set) { return facts().member(x, sym(set)); }
};

/// The first session is more specialized in x than the second: complexity of x
/// there is at most the complexity in the second.
bool moreSpecialized(Session& first, Session& second, const Expr& x);

/// Pure double-precision folding of an already evaluated expression. Pi and E are
/// the only known constants. Throws NotNumeric.
double numericValue(const Expr& e);

}  // namespace obskernel
