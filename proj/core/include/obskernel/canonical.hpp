#pragma once

#include <optional>
#include <vector>

#include "obskernel/expr.hpp"

namespace obskernel {

/// Canonical form for the arithmetic heads. Flattens Plus, Times and Circle,
/// sorts the orderless heads (Plus, Times) by the kernel total order, folds exact
/// numerals (a real operand makes the result real), collects identical terms with
/// numeric coefficients and identical factors with summed exponents. Idempotent.
/// Held heads (Pattern, Blank, Condition, Rule, RuleDelayed, Function, Hold) are
/// left untouched.
Expr canonicalize(const Expr& e);

/// canonicalize plus distribution of Times over Plus and expansion of Plus raised
/// to small positive integer powers.
Expr expand(const Expr& e);

/// Rebuilds head[args] assuming the arguments are already canonical.
Expr canonicalNode(const Expr& head, std::vector<Expr> args);

/// True for heads whose arguments canonicalize/evaluate must not touch.
bool isHoldingHead(const Expr& head);

namespace arith {

bool isZero(const Expr& n);
bool isOne(const Expr& n);
bool isNegative(const Expr& n);

/// Number arithmetic with real contamination. Arguments must be number atoms.
Expr add(const Expr& a, const Expr& b);
Expr multiply(const Expr& a, const Expr& b);
/// Exact results when representable (integer powers, perfect rational roots);
/// nullopt when the power should stay symbolic.
std::optional<Expr> power(const Expr& base, const Expr& exponent);

/// Exact rational value of a finite double.
Exact exactFromDouble(double value);

}  // namespace arith

}  // namespace obskernel
