#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "obskernel/errors.hpp"
#include "obskernel/expr.hpp"
#include "obskernel/session.hpp"

namespace obskernel {

/// Highest slot index in `body`, ignoring slots inside nested Function bodies.
/// 0 for a constant body.
std::size_t slotArity(const Expr& body);

/// Substitutes `args` into a Function expression without evaluating. Slot form
/// `Function[body]` fills #n positionally; named form `Function[x, body]` or
/// `Function[{x, y}, body]` replaces the parameters. Nested Function bodies keep
/// their own slots. Throws ArityError when too few arguments are given.
Expr applyFunction(const Expr& function, std::span<const Expr> args);

/// applyFunction followed by evaluation in `s`.
Expr apply(Session& s, const Expr& function, const std::vector<Expr>& args);

/// Function algebra: (f+g)[x] -> f[x]+g[x], (f g)[x] -> f[x] g[x],
/// (f@g)[x] -> f[g[x]], f[_] /; f in K -> f, Subtract[x, y] -> x + (-1) y.
/// Asserts -1 in K.
Pack funalgPack(const std::string& field = "K");

/// K-linear maps: for f in LFs[K], f[a+b] -> f[a]+f[b], f[l r] -> l f[r] and
/// f[l] -> l f[1] for l in K. Asserts 0, 1, -1 in K.
Pack linearPack(const std::string& field = "K");

/// Expand[...] made automatic: distributes products and small powers of sums.
Pack expandPack();

}  // namespace obskernel
