#include "obskernel/expr.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <functional>

namespace obskernel {

namespace {

struct CompoundData {
  Expr head;
  std::vector<Expr> args;
};

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hashExact(const Exact& value) {
  std::size_t h = 0x51ed270b;
  for (const BigInt& part : {boost::multiprecision::numerator(value),
                             boost::multiprecision::denominator(value)}) {
    if (part == 0) {
      h = mix(h, 0);
    } else if (boost::multiprecision::msb(abs(part)) < 62) {
      h = mix(h, std::hash<long long>{}(part.convert_to<long long>()));
    } else {
      h = mix(h, std::hash<std::string>{}(part.str()));
    }
  }
  return h;
}

}  // namespace

struct Expr::Node {
  std::variant<std::string, Exact, double, CompoundData> data;
  std::size_t hash = 0;
};

std::string_view kindName(AtomKind kind) {
  switch (kind) {
    case AtomKind::Symbol: return "Symbol";
    case AtomKind::Integer: return "Integer";
    case AtomKind::Rational: return "Rational";
    case AtomKind::Real: return "Real";
  }
  return "Unknown";
}

Expr::Expr() {
  static const Expr null = symbol("Null");
  node_ = null.node_;
}

Expr Expr::symbol(std::string_view name) {
  auto node = std::make_shared<Node>();
  node->data = std::string(name);
  node->hash = mix(0x5bd1e995, std::hash<std::string_view>{}(name));
  return Expr(std::move(node));
}

Expr Expr::integer(long long value) { return exact(Exact(value)); }

Expr Expr::exact(Exact value) {
  auto node = std::make_shared<Node>();
  node->hash = hashExact(value);
  node->data = std::move(value);
  return Expr(std::move(node));
}

Expr Expr::rational(long long numerator, long long denominator) {
  assert(denominator != 0);
  return exact(Exact(numerator) / Exact(denominator));
}

Expr Expr::real(double value) {
  if (value == 0.0) value = 0.0;  // fold -0.0
  auto node = std::make_shared<Node>();
  node->data = value;
  node->hash = mix(0x27d4eb2f, std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(value)));
  return Expr(std::move(node));
}

Expr Expr::compound(Expr head, std::vector<Expr> args) {
  auto node = std::make_shared<Node>();
  std::size_t h = mix(0x165667b1, head.hash());
  for (const auto& a : args) h = mix(h, a.hash());
  node->hash = mix(h, args.size());
  node->data = CompoundData{std::move(head), std::move(args)};
  return Expr(std::move(node));
}

bool Expr::isCompound() const { return std::holds_alternative<CompoundData>(node_->data); }
bool Expr::isSymbol() const { return std::holds_alternative<std::string>(node_->data); }
bool Expr::isSymbol(std::string_view n) const { return isSymbol() && name() == n; }
bool Expr::isExact() const { return std::holds_alternative<Exact>(node_->data); }
bool Expr::isReal() const { return std::holds_alternative<double>(node_->data); }
bool Expr::isNumber() const { return isExact() || isReal(); }

bool Expr::isInteger() const {
  return isExact() && boost::multiprecision::denominator(exactValue()) == 1;
}

bool Expr::hasHead(std::string_view n) const { return isCompound() && head().isSymbol(n); }

bool Expr::hasHead(std::string_view n, std::size_t arity) const {
  return hasHead(n) && size() == arity;
}

AtomKind Expr::kind() const {
  if (isSymbol()) return AtomKind::Symbol;
  if (isReal()) return AtomKind::Real;
  assert(isExact());
  return isInteger() ? AtomKind::Integer : AtomKind::Rational;
}

const std::string& Expr::name() const { return std::get<std::string>(node_->data); }
const Exact& Expr::exactValue() const { return std::get<Exact>(node_->data); }
double Expr::realValue() const { return std::get<double>(node_->data); }

double Expr::toDouble() const {
  if (isReal()) return realValue();
  return exactValue().convert_to<double>();
}

const Expr& Expr::head() const { return std::get<CompoundData>(node_->data).head; }

std::span<const Expr> Expr::args() const {
  if (!isCompound()) return {};
  return std::get<CompoundData>(node_->data).args;
}

std::size_t Expr::hash() const { return node_->hash; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  if (a.node_->data.index() != b.node_->data.index()) return false;
  if (a.isSymbol()) return a.name() == b.name();
  if (a.isExact()) return a.exactValue() == b.exactValue();
  if (a.isReal()) {
    double x = a.realValue(), y = b.realValue();
    return x == y || (std::isnan(x) && std::isnan(y));
  }
  if (a.head() != b.head() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.arg(i) != b.arg(i)) return false;
  return true;
}

namespace {

int rank(const Expr& e) {
  if (e.isNumber()) return 0;
  if (e.isSymbol()) return 1;
  return 2;
}

template <typename T>
int cmp(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

int compareNumbers(const Expr& a, const Expr& b) {
  if (a.isExact() && b.isExact()) return cmp(a.exactValue(), b.exactValue());
  double x = a.toDouble(), y = b.toDouble();
  if (int c = cmp(x, y); c != 0) return c;
  if (std::isnan(x) || std::isnan(y)) return cmp(std::isnan(x), std::isnan(y));
  // Equal values: exact before real.
  return cmp(a.isReal(), b.isReal());
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  if (a == b) return 0;
  if (int c = cmp(rank(a), rank(b)); c != 0) return c;
  if (a.isNumber()) return compareNumbers(a, b);
  if (a.isSymbol()) return a.name().compare(b.name()) < 0 ? -1 : 1;
  if (int c = compare(a.head(), b.head()); c != 0) return c;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a.arg(i), b.arg(i)); c != 0) return c;
  return cmp(a.size(), b.size());
}

Expr call(std::string_view head, std::vector<Expr> args) {
  return Expr::compound(Expr::symbol(head), std::move(args));
}

Expr call(const Expr& head, std::vector<Expr> args) { return Expr::compound(head, std::move(args)); }

Expr num(long long value) { return Expr::integer(value); }

Expr plus(std::vector<Expr> terms) { return call("Plus", std::move(terms)); }
Expr times(std::vector<Expr> factors) { return call("Times", std::move(factors)); }
Expr power(Expr base, Expr exponent) { return call("Power", {std::move(base), std::move(exponent)}); }
Expr minus(Expr e) { return times({num(-1), std::move(e)}); }
Expr list(std::vector<Expr> items) { return call("List", std::move(items)); }
Expr element(Expr x, Expr set) { return call("Element", {std::move(x), std::move(set)}); }

const Expr& trueExpr() {
  static const Expr t = sym("True");
  return t;
}

const Expr& falseExpr() {
  static const Expr f = sym("False");
  return f;
}

bool isTrue(const Expr& e) { return e.isSymbol("True"); }
bool isFalse(const Expr& e) { return e.isSymbol("False"); }

std::size_t depth(const Expr& e) {
  if (e.isAtom()) return 1;
  std::size_t deepest = 1;
  for (const auto& a : e.args()) deepest = std::max(deepest, depth(a));
  return 1 + deepest;
}

std::size_t leafCount(const Expr& e) {
  if (e.isAtom()) return 1;
  std::size_t n = leafCount(e.head());
  for (const auto& a : e.args()) n += leafCount(a);
  return n;
}

Expr replaceAll(const Expr& e, const Expr& from, const Expr& to) {
  if (e == from) return to;
  if (e.isAtom()) return e;
  bool changed = false;
  Expr head = replaceAll(e.head(), from, to);
  changed = head != e.head();
  std::vector<Expr> args;
  args.reserve(e.size());
  for (const auto& a : e.args()) {
    args.push_back(replaceAll(a, from, to));
    changed = changed || args.back() != a;
  }
  return changed ? Expr::compound(std::move(head), std::move(args)) : e;
}

}  // namespace obskernel
