#pragma once

#include <string>

#include "obskernel/expr.hpp"
#include "obskernel/facts.hpp"
#include "obskernel/session.hpp"

namespace obskernel {

/// Star/Delta calculus. Star[x] is x*, Star[e, x] is x*_e, Delta[x] and
/// Delta[e, x] the matching errors. Installs, in order: the e = 0 / e = 1 rules,
/// Cst absorption, Uns scaling, head distribution of Star over compounds, Delta
/// over sums and products, and the chain rule. Frame facts: Plus, Times, -1,
/// Power, Circle in Cst; Star, Delta, eps in Abs. Also installs cstClosure.
Pack perturbPack();

/// Delta[x] -> Star[x] - x and Delta[e, x] -> Star[e, x] - x. Used ahead of the
/// other packs to compare both sides of a theorem.
Pack definitionsPack();

/// Inference rules for Cst, Uns and Abs membership: numerals are constant; Cst is
/// closed under application (so under +, *, powers, composition); Cst is inside
/// Uns; Uns is closed under constant linear maps, sums, constant multiples, and
/// Uns heads applied to constants, never under products of two Uns terms; Abs is
/// closed under application; Rho and Underline are constant when some controllable
/// declaration has R and S constant.
void cstClosure(FactBase& facts);

/// Delta[e, expr] evaluated to normal form.
Expr expandError(Session& s, const Expr& e, const Expr& eps);

struct TheoremCheck {
  bool holds = false;
  Expr lhs;
  Expr rhs;
  Expr difference;
};

/// Copy of `s` with definitionsPack (and expandPack) consulted before its packs.
Session definitionalSession(const Session& s);

/// Evaluates `lhs` in `s`, then reduces both sides under the definitions and
/// compares canonical forms.
TheoremCheck checkIdentity(Session& s, const Expr& lhs, const Expr& rhs);

/// Delta[e, f[x]] == f[x*_e] - f[x] + Delta[e, f][x*_e].
TheoremCheck checkChainRule(Session& s, const Expr& f, const Expr& x, const Expr& eps);

/// Delta[e, y x] == y Delta[e, x] + x*_e Delta[e, y].
TheoremCheck checkProductRule(Session& s, const Expr& y, const Expr& x, const Expr& eps);

/// For x, y in Uns: Delta[e, y x] == e (y Delta[x] + x Delta[y]) + e^2 Delta[x] Delta[y].
TheoremCheck checkUnshieldedProduct(Session& s, const Expr& y, const Expr& x, const Expr& eps);

/// For f in Cst: Delta[e, f[x]] == f[x*_e] - f[x].
TheoremCheck checkConstantHead(Session& s, const Expr& f, const Expr& x, const Expr& eps);

}  // namespace obskernel
