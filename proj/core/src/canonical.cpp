#include "obskernel/canonical.hpp"

#include <cmath>
#include <map>

namespace obskernel {

namespace arith {

bool isZero(const Expr& n) {
  if (n.isExact()) return n.exactValue() == 0;
  return n.isReal() && n.realValue() == 0.0;
}

bool isOne(const Expr& n) { return n.isExact() && n.exactValue() == 1; }

bool isNegative(const Expr& n) {
  if (n.isExact()) return n.exactValue() < 0;
  return n.isReal() && n.realValue() < 0;
}

Expr add(const Expr& a, const Expr& b) {
  if (a.isExact() && b.isExact()) return Expr::exact(a.exactValue() + b.exactValue());
  return Expr::real(a.toDouble() + b.toDouble());
}

Expr multiply(const Expr& a, const Expr& b) {
  if (a.isExact() && b.isExact()) return Expr::exact(a.exactValue() * b.exactValue());
  return Expr::real(a.toDouble() * b.toDouble());
}

namespace {

constexpr long long kMaxExactExponent = 4096;

BigInt powInt(const BigInt& base, unsigned long long e) {
  BigInt result = 1, b = base;
  while (e) {
    if (e & 1) result *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return result;
}

/// Integer k-th root of a non-negative value, if exact.
std::optional<BigInt> exactRoot(const BigInt& value, unsigned k) {
  if (value < 2) return value;
  BigInt lo = 0, hi = BigInt(1) << (boost::multiprecision::msb(value) / k + 1);
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (powInt(mid, k) <= value) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  if (powInt(lo, k) == value) return lo;
  return std::nullopt;
}

}  // namespace

std::optional<Expr> power(const Expr& base, const Expr& exponent) {
  if (base.isExact() && exponent.isExact()) {
    const Exact& b = base.exactValue();
    const Exact& x = exponent.exactValue();
    BigInt p = boost::multiprecision::numerator(x);
    BigInt q = boost::multiprecision::denominator(x);
    if (boost::multiprecision::abs(p) > kMaxExactExponent || q > 64) return std::nullopt;
    if (b == 0) {
      if (p > 0) return Expr::integer(0);
      return std::nullopt;
    }
    BigInt bn = boost::multiprecision::numerator(b);
    BigInt bd = boost::multiprecision::denominator(b);
    if (q != 1) {
      if (bn < 0) return std::nullopt;
      auto rn = exactRoot(bn, q.convert_to<unsigned>());
      auto rd = exactRoot(bd, q.convert_to<unsigned>());
      if (!rn || !rd) return std::nullopt;
      bn = *rn;
      bd = *rd;
    }
    bool invert = p < 0;
    auto e = boost::multiprecision::abs(p).convert_to<unsigned long long>();
    Exact result(powInt(bn, e), powInt(bd, e));
    if (invert) result = 1 / result;
    return Expr::exact(result);
  }
  double b = base.toDouble(), x = exponent.toDouble();
  bool integral = exponent.isInteger() || (exponent.isReal() && std::floor(x) == x);
  if (b < 0 && !integral) return std::nullopt;
  if (b == 0 && x < 0) return std::nullopt;
  return Expr::real(std::pow(b, x));
}

Exact exactFromDouble(double value) {
  int exp = 0;
  double mant = std::frexp(value, &exp);
  // 53 significant bits.
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Exact r(scaled);
  if (exp > 0) {
    r *= Exact(BigInt(1) << exp);
  } else if (exp < 0) {
    r /= Exact(BigInt(1) << -exp);
  }
  return r;
}

}  // namespace arith

bool isHoldingHead(const Expr& head) {
  if (!head.isSymbol()) return false;
  const std::string& n = head.name();
  return n == "Pattern" || n == "Blank" || n == "Condition" || n == "Rule" || n == "RuleDelayed" ||
         n == "Function" || n == "Hold";
}

namespace {

Expr canonicalPlus(const std::vector<Expr>& input);
Expr canonicalTimes(const std::vector<Expr>& input);
Expr canonicalPower(const Expr& base, const Expr& exponent);

void flattenInto(std::vector<Expr>& out, const Expr& e, std::string_view head) {
  if (e.hasHead(head)) {
    for (const auto& a : e.args()) flattenInto(out, a, head);
  } else {
    out.push_back(e);
  }
}

/// Split a term into numeric coefficient and the remaining product.
std::pair<Expr, Expr> splitCoefficient(const Expr& term) {
  if (term.hasHead("Times") && term.size() >= 2 && term.arg(0).isNumber()) {
    std::vector<Expr> rest(term.args().begin() + 1, term.args().end());
    return {term.arg(0), rest.size() == 1 ? rest[0] : times(std::move(rest))};
  }
  return {Expr::integer(1), term};
}

Expr canonicalPlus(const std::vector<Expr>& input) {
  std::vector<Expr> flat;
  for (const auto& a : input) flattenInto(flat, a, "Plus");

  Expr constant = Expr::integer(0);
  bool sawNumber = false;
  std::map<Expr, Expr, ExprLess> collected;
  for (const auto& t : flat) {
    if (t.isNumber()) {
      constant = arith::add(constant, t);
      sawNumber = true;
      continue;
    }
    auto [coeff, rest] = splitCoefficient(t);
    auto [it, inserted] = collected.try_emplace(rest, coeff);
    if (!inserted) it->second = arith::add(it->second, coeff);
  }

  std::vector<Expr> terms;
  if (sawNumber && !arith::isZero(constant)) terms.push_back(constant);
  for (const auto& [rest, coeff] : collected) {
    if (arith::isZero(coeff)) continue;
    if (arith::isOne(coeff)) {
      terms.push_back(rest);
    } else {
      terms.push_back(canonicalTimes({coeff, rest}));
    }
  }
  std::sort(terms.begin(), terms.end(), ExprLess{});
  if (terms.empty()) return constant.isReal() ? Expr::real(0.0) : Expr::integer(0);
  if (terms.size() == 1) return terms[0];
  return plus(std::move(terms));
}

Expr canonicalTimes(const std::vector<Expr>& input) {
  std::vector<Expr> flat;
  for (const auto& a : input) flattenInto(flat, a, "Times");

  Expr coefficient = Expr::integer(1);
  std::map<Expr, std::vector<Expr>, ExprLess> exponents;
  for (const auto& f : flat) {
    if (f.isNumber()) {
      coefficient = arith::multiply(coefficient, f);
      continue;
    }
    if (f.hasHead("Power", 2)) {
      exponents[f.arg(0)].push_back(f.arg(1));
    } else {
      exponents[f].push_back(Expr::integer(1));
    }
  }
  if (arith::isZero(coefficient)) return coefficient;

  std::vector<Expr> factors;
  bool renormalize = false;
  for (const auto& [base, exps] : exponents) {
    Expr exponent = exps.size() == 1 ? exps[0] : canonicalPlus(exps);
    if (exponent.isExact() && exponent.exactValue() == 0) continue;
    Expr f = canonicalPower(base, exponent);
    if (f.isNumber() || f.hasHead("Times")) renormalize = true;
    factors.push_back(std::move(f));
  }
  if (renormalize) {
    factors.push_back(coefficient);
    return canonicalTimes(factors);
  }
  std::sort(factors.begin(), factors.end(), ExprLess{});
  if (!arith::isOne(coefficient)) factors.insert(factors.begin(), coefficient);
  if (factors.empty()) return Expr::integer(1);
  if (factors.size() == 1) return factors[0];
  return times(std::move(factors));
}

Expr canonicalPower(const Expr& base, const Expr& exponent) {
  if (exponent.isExact() && exponent.exactValue() == 0) return Expr::integer(1);
  if (exponent.isExact() && exponent.exactValue() == 1) return base;
  if (base.isExact() && base.exactValue() == 1) return base;
  if (base.isNumber() && exponent.isNumber()) {
    if (auto folded = arith::power(base, exponent)) return *folded;
    return power(base, exponent);
  }
  if (exponent.isInteger()) {
    if (base.hasHead("Power", 2)) {
      Expr inner = canonicalTimes({base.arg(1), exponent});
      return canonicalPower(base.arg(0), inner);
    }
    if (base.hasHead("Times")) {
      std::vector<Expr> factors;
      for (const auto& f : base.args()) factors.push_back(canonicalPower(f, exponent));
      return canonicalTimes(factors);
    }
  }
  return power(base, exponent);
}

Expr canonicalCircle(const std::vector<Expr>& input) {
  std::vector<Expr> flat;
  for (const auto& a : input) flattenInto(flat, a, "Circle");
  std::erase_if(flat, [](const Expr& f) { return f.isSymbol("Identity"); });
  if (flat.empty()) return sym("Identity");
  if (flat.size() == 1) return flat[0];
  return call("Circle", std::move(flat));
}

Expr rebuild(const Expr& head, std::vector<Expr> args) {
  if (head.isSymbol("Plus")) return canonicalPlus(args);
  if (head.isSymbol("Times")) return canonicalTimes(args);
  if (head.isSymbol("Power") && args.size() == 2) return canonicalPower(args[0], args[1]);
  if (head.isSymbol("Circle")) return canonicalCircle(args);
  return Expr::compound(head, std::move(args));
}

constexpr std::size_t kMaxExpandedTerms = 20000;
constexpr long long kMaxExpandedPower = 32;

std::vector<Expr> summands(const Expr& e) {
  if (e.hasHead("Plus")) return {e.args().begin(), e.args().end()};
  return {e};
}

Expr distribute(const std::vector<Expr>& factors) {
  std::vector<Expr> acc{Expr::integer(1)};
  for (const auto& f : factors) {
    std::vector<Expr> terms = summands(f);
    if (acc.size() * terms.size() > kMaxExpandedTerms) {
      std::vector<Expr> rest;
      rest.push_back(canonicalPlus(acc));
      rest.push_back(f);
      return canonicalTimes(rest);
    }
    std::vector<Expr> next;
    next.reserve(acc.size() * terms.size());
    for (const auto& a : acc)
      for (const auto& t : terms) next.push_back(canonicalTimes({a, t}));
    acc = std::move(next);
  }
  return canonicalPlus(acc);
}

Expr expandNode(const Expr& e) {
  if (e.hasHead("Times")) {
    bool any = false;
    for (const auto& f : e.args()) any = any || f.hasHead("Plus");
    if (any) return distribute({e.args().begin(), e.args().end()});
    return e;
  }
  if (e.hasHead("Power", 2) && e.arg(0).hasHead("Plus") && e.arg(1).isInteger()) {
    const Exact& n = e.arg(1).exactValue();
    if (n > 1 && n <= kMaxExpandedPower) {
      std::vector<Expr> factors(n.convert_to<std::size_t>(), e.arg(0));
      return distribute(factors);
    }
  }
  return e;
}

}  // namespace

Expr canonicalNode(const Expr& head, std::vector<Expr> args) { return rebuild(head, std::move(args)); }

Expr canonicalize(const Expr& e) {
  if (e.isAtom()) return e;
  if (isHoldingHead(e.head())) return e;
  Expr head = canonicalize(e.head());
  std::vector<Expr> args;
  args.reserve(e.size());
  for (const auto& a : e.args()) args.push_back(canonicalize(a));
  return rebuild(head, std::move(args));
}

Expr expand(const Expr& e) {
  if (e.isAtom()) return e;
  if (isHoldingHead(e.head())) return e;
  Expr head = expand(e.head());
  std::vector<Expr> args;
  args.reserve(e.size());
  for (const auto& a : e.args()) args.push_back(expand(a));
  Expr node = expandNode(rebuild(head, std::move(args)));
  // Distribution can expose new Times-over-Plus products inside terms.
  if (node.hasHead("Plus")) {
    std::vector<Expr> terms;
    bool changed = false;
    for (const auto& t : node.args()) {
      Expr x = expandNode(t);
      changed = changed || x != t;
      terms.push_back(std::move(x));
    }
    if (changed) return canonicalPlus(terms);
  }
  return node;
}

}  // namespace obskernel
