#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "obskernel/errors.hpp"
#include "obskernel/expr.hpp"

namespace obskernel {

/// Name -> bound subexpression. Ordered so that printing and iteration are deterministic.
using Bindings = std::map<std::string, Expr>;

/// Evaluates a condition predicate (already substituted). The kernel passes the
/// session evaluator; anything other than True counts as a failed condition.
using ConditionOracle = std::function<Expr(const Expr&)>;

class Pattern {
 public:
  struct Blank {
    std::optional<std::string> name;
    std::optional<AtomKind> type;
  };
  struct Conditional {
    std::shared_ptr<const Pattern> inner;
    Expr predicate;
  };
  struct Literal {
    Expr value;
  };
  struct Compound {
    std::shared_ptr<const Pattern> head;
    std::vector<Pattern> args;
    bool orderless = false;
    bool flat = false;
  };

  using Node = std::variant<Blank, Conditional, Literal, Compound>;

  explicit Pattern(Node node) : node_(std::move(node)) {}

  /// Compiles pattern syntax: `_`, `x_`, `_Integer`, `x_Real`, `p /; cond`,
  /// literals, and compounds of those. Plus and Times compile as orderless heads;
  /// Plus, Times and Circle as flat heads.
  static Pattern compile(const Expr& e);

  const Node& node() const { return node_; }

  /// Names bound by this pattern.
  std::set<std::string> names() const;

  /// Symbol that every matching expression has as head (or as its value for atom
  /// literals); empty when the pattern can match anything.
  std::optional<std::string> key() const;

 private:
  Node node_;
};

/// First match in canonical argument order, or nullopt. Condition predicates that
/// evaluate to anything but True make the match fail; BudgetExceeded from the
/// oracle propagates.
std::optional<Bindings> match(const Pattern& p, const Expr& e, const ConditionOracle& oracle = {});

/// Replaces symbols and `x_`-style references named in `b` by their bindings.
Expr substitute(const Expr& e, const Bindings& b);

/// True iff `x` occurs as a subexpression (heads included) of the canonical form
/// of `f`. This is the kernel's syntactic stand-in for "f depends on x".
bool occurs(const Expr& x, const Expr& f);

}  // namespace obskernel
