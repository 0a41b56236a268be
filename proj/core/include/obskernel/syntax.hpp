#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "obskernel/errors.hpp"
#include "obskernel/expr.hpp"

namespace obskernel {

/// Parses one statement. A trailing `!` wraps the expression in `Assert[...]`.
/// Throws ParseError with the offending span on malformed input.
///
/// Surface forms: `f[a,b]` and `name(a,b)` applications, `{a,b}` lists, `e[[i]]`
/// parts, `+ - * / ^`, `@` (Circle, composition), `&` (Function), `#`/`#n` slots,
/// `_`, `x_`, `_Integer`, `x_Real` blanks, `/;` conditions, `->` and `:>` rules,
/// `/.` replacement, `in`, `=`, `<`, `<=`, `>`, `>=` relations. The ASCII aliases
/// `star`, `delta`, `ul`, `exp`, `log`, `sqrt`, `sin`, `cos`, `abs` map to the
/// kernel heads Star, Delta, Underline, Exp, Log, Sqrt, Sin, Cos, Absolute.
Expr parse(std::string_view text);

/// Parses a sequence of statements separated by `;` or terminated by `!`.
std::vector<Expr> parseStatements(std::string_view text);

/// Deterministic text form; parse(print(e)) == e for every expression.
std::string print(const Expr& e);

}  // namespace obskernel
