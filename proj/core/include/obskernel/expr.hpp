#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace obskernel {

/// Exact numeric payload. Integers are rationals with denominator 1.
using Exact = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class AtomKind { Symbol, Integer, Rational, Real };

std::string_view kindName(AtomKind kind);

/// Immutable expression tree. Either an atom (symbol, integer, rational or
/// double-precision real) or a compound `head[args...]` whose head is itself an
/// expression. Copies share structure; values are safe to share across threads.
class Expr {
 public:
  /// The symbol `Null`.
  Expr();

  static Expr symbol(std::string_view name);
  static Expr integer(long long value);
  static Expr exact(Exact value);
  static Expr rational(long long numerator, long long denominator);
  static Expr real(double value);
  static Expr compound(Expr head, std::vector<Expr> args);

  bool isAtom() const { return !isCompound(); }
  bool isCompound() const;
  bool isSymbol() const;
  bool isSymbol(std::string_view name) const;
  bool isNumber() const;
  bool isExact() const;
  bool isInteger() const;
  bool isReal() const;

  /// Compound whose head is the symbol `name`.
  bool hasHead(std::string_view name) const;
  bool hasHead(std::string_view name, std::size_t arity) const;

  /// Only meaningful for atoms.
  AtomKind kind() const;

  const std::string& name() const;
  const Exact& exactValue() const;
  double realValue() const;
  /// Numeric value of a number atom as a double.
  double toDouble() const;

  const Expr& head() const;
  std::span<const Expr> args() const;
  const Expr& arg(std::size_t i) const { return args()[i]; }
  std::size_t size() const { return args().size(); }

  std::size_t hash() const;

  /// Structural equality; the only primitive equality in the kernel.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  struct Node;

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Kernel total order: atoms before compounds; numbers before symbols; numbers by
/// value (exact before real on ties); symbols lexicographically; compounds by head,
/// then arguments lexicographically, then length.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Builders.
inline Expr sym(std::string_view name) { return Expr::symbol(name); }
Expr call(std::string_view head, std::vector<Expr> args);
Expr call(const Expr& head, std::vector<Expr> args);
Expr num(long long value);

Expr plus(std::vector<Expr> terms);
Expr times(std::vector<Expr> factors);
Expr power(Expr base, Expr exponent);
Expr minus(Expr e);
Expr list(std::vector<Expr> items);
Expr element(Expr x, Expr set);

const Expr& trueExpr();
const Expr& falseExpr();
bool isTrue(const Expr& e);
bool isFalse(const Expr& e);

/// 1 for atoms; 1 + max(1, depth of each argument) for compounds (the head counts
/// as an atom).
std::size_t depth(const Expr& e);

/// Number of atoms in the tree, heads included.
std::size_t leafCount(const Expr& e);

/// Replace every occurrence of `from` (structurally) by `to`.
Expr replaceAll(const Expr& e, const Expr& from, const Expr& to);

}  // namespace obskernel
