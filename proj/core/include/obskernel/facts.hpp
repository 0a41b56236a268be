#pragma once

#include <functional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "obskernel/expr.hpp"

namespace obskernel {

class FactBase;

/// Backward-chaining membership rule: may `x` be inferred to belong to `set`?
/// Rules only ever derive truths, so adding facts never invalidates a derivation.
using InferenceRule = std::function<bool(const FactBase&, const Expr& x, const Expr& set)>;

/// Monotone store of asserted relations. Facts are never retracted.
class FactBase {
 public:
  /// Stores a ground relation, e.g. Element[x, Cst] or Equal[a, b]. Duplicates are ignored.
  void add(const Expr& fact);
  void addInference(std::string name, InferenceRule rule);

  /// Direct lookup, no inference.
  bool contains(const Expr& fact) const;

  /// Element[x, set] either asserted or derivable through the inference rules.
  bool member(const Expr& x, const Expr& set) const;

  /// Equal[a, b] or Equal[b, a] asserted.
  bool identical(const Expr& a, const Expr& b) const;

  /// Sets S with Element[x, S] asserted directly.
  std::vector<Expr> setsOf(const Expr& x) const;

  /// Every asserted Equal[a, b] as a pair.
  std::vector<std::pair<Expr, Expr>> identities() const;

  const std::vector<Expr>& all() const { return facts_; }
  std::size_t size() const { return facts_.size(); }

 private:
  std::vector<Expr> facts_;
  std::unordered_set<Expr, ExprHash> index_;
  std::vector<std::pair<std::string, InferenceRule>> rules_;
  mutable int depth_ = 0;
};

}  // namespace obskernel
