#include "obskernel/perturb.hpp"

#include <algorithm>

#include "obskernel/canonical.hpp"
#include "obskernel/funalg.hpp"

namespace obskernel {

namespace {

/// Star[x] / Star[e, x] and Delta[x] / Delta[e, x] share their argument layout.
struct Form {
  std::optional<Expr> eps;
  Expr x;
};

std::optional<Form> form(const Expr& e, std::string_view head) {
  if (e.hasHead(head, 1)) return Form{std::nullopt, e.arg(0)};
  if (e.hasHead(head, 2)) return Form{e.arg(0), e.arg(1)};
  return std::nullopt;
}

Expr make(std::string_view head, const std::optional<Expr>& eps, const Expr& x) {
  return eps ? call(head, {*eps, x}) : call(head, {x});
}

bool isLinearMap(const FactBase& facts, const Expr& f) {
  auto sets = facts.setsOf(f);
  return std::any_of(sets.begin(), sets.end(), [](const Expr& s) { return s.hasHead("LFs"); });
}

bool allMembers(const FactBase& facts, std::span<const Expr> xs, const Expr& set) {
  return std::all_of(xs.begin(), xs.end(), [&](const Expr& a) { return facts.member(a, set); });
}

/// f[args]* = f*[args*].
std::optional<Expr> distributeStar(Context&, const Expr& e) {
  auto s = form(e, "Star");
  if (!s || !s->x.isCompound()) return std::nullopt;
  std::vector<Expr> args;
  for (const auto& a : s->x.args()) args.push_back(make("Star", s->eps, a));
  return Expr::compound(make("Star", s->eps, s->x.head()), std::move(args));
}

/// Delta of a compound whose head is neither Plus nor Times.
std::optional<Expr> chainRule(Context& ctx, const Expr& e) {
  auto d = form(e, "Delta");
  if (!d || !d->x.isCompound()) return std::nullopt;
  const Expr& f = d->x.head();
  if (f.isSymbol("Plus") || f.isSymbol("Times")) return std::nullopt;
  const FactBase& facts = ctx.facts();
  bool constant = facts.member(f, sym("Cst"));
  if (constant && d->x.size() == 1 && isLinearMap(facts, f))
    return call(f, {make("Delta", d->eps, d->x.arg(0))});
  std::vector<Expr> starred;
  for (const auto& a : d->x.args()) starred.push_back(make("Star", d->eps, a));
  Expr moved = Expr::compound(f, starred);
  Expr diff = plus({moved, minus(d->x)});
  if (constant) return diff;
  return plus({diff, Expr::compound(make("Delta", d->eps, f), starred)});
}

void addRules(Pack& p, std::initializer_list<const char*> texts) {
  for (const char* t : texts) p.rules.emplace_back(Rule::parse(t));
}

bool inferCst(const FactBase& facts, const Expr& x, const Expr& set) {
  if (!set.isSymbol("Cst")) return false;
  if (x.isNumber()) return true;
  if (x.isCompound())
    return facts.member(x.head(), set) && allMembers(facts, x.args(), set);
  if (x.isSymbol("Rho") || x.isSymbol("Underline")) {
    for (const auto& f : facts.all()) {
      if (!f.hasHead("Element", 2) || !f.arg(1).hasHead("Controllable", 2)) continue;
      const Expr& decl = f.arg(1);
      if (facts.member(decl.arg(0), set) && facts.member(decl.arg(1), set)) return true;
    }
  }
  return false;
}

bool inferUns(const FactBase& facts, const Expr& x, const Expr& set) {
  if (!set.isSymbol("Uns")) return false;
  const Expr cst = sym("Cst");
  if (facts.member(x, cst)) return true;
  if (!x.isCompound()) return false;
  const Expr& h = x.head();
  if (h.isSymbol("Plus")) return allMembers(facts, x.args(), set);
  if (h.isSymbol("Times")) {
    std::size_t unshielded = 0;
    for (const auto& a : x.args()) {
      if (facts.member(a, cst)) continue;
      if (!facts.member(a, set)) return false;
      ++unshielded;
    }
    return unshielded <= 1;
  }
  if (x.size() == 1 && facts.member(h, cst) && isLinearMap(facts, h) && facts.member(x.arg(0), set))
    return true;
  return facts.member(h, set) && allMembers(facts, x.args(), cst);
}

bool inferAbs(const FactBase& facts, const Expr& x, const Expr& set) {
  if (!set.isSymbol("Abs")) return false;
  if (x.isNumber()) return true;
  return x.isCompound() && facts.member(x.head(), set) && allMembers(facts, x.args(), set);
}

}  // namespace

void cstClosure(FactBase& facts) {
  facts.addInference("Cst closure", inferCst);
  facts.addInference("Uns closure", inferUns);
  facts.addInference("Abs closure", inferAbs);
}

Pack perturbPack() {
  Pack p;
  p.name = "perturb";
  addRules(p, {
                  "Star[0, x_] -> x",
                  "Star[1, x_] -> Star[x]",
                  "Delta[0, _] -> 0",
                  "Delta[1, x_] -> Delta[x]",
                  "Star[x_] /; Element[x, Cst] -> x",
                  "Star[e_, x_] /; Element[x, Cst] -> x",
                  "Delta[x_] /; Element[x, Cst] -> 0",
                  "Delta[e_, x_] /; Element[x, Cst] -> 0",
                  "Delta[e_, x_] /; Element[x, Uns] -> e*Delta[x]",
                  "Star[e_, x_] /; Element[x, Uns] -> x+e*Delta[x]",
              });
  p.rules.emplace_back(NativeRule{"star distribution", "Star", distributeStar});
  addRules(p, {
                  "Delta[a_+b_] -> Delta[a]+Delta[b]",
                  "Delta[e_, a_+b_] -> Delta[e, a]+Delta[e, b]",
                  "Delta[x_*y_] -> y*Delta[x]+Star[x]*Delta[y]",
                  "Delta[e_, x_*y_] -> y*Delta[e, x]+Star[e, x]*Delta[e, y]",
              });
  p.rules.emplace_back(NativeRule{"chain rule", "Delta", chainRule});

  for (const char* c : {"Plus", "Times", "Power", "Circle"}) p.facts.push_back(element(sym(c), sym("Cst")));
  p.facts.push_back(element(num(-1), sym("Cst")));
  for (const char* a : {"Star", "Delta", "eps"}) p.facts.push_back(element(sym(a), sym("Abs")));
  p.inferences = {{"Cst closure", inferCst}, {"Uns closure", inferUns}, {"Abs closure", inferAbs}};
  return p;
}

Pack definitionsPack() {
  Pack p;
  p.name = "definitions";
  addRules(p, {
                  "Delta[x_] -> Star[x]-x",
                  "Delta[e_, x_] -> Star[e, x]-x",
              });
  return p;
}

Expr expandError(Session& s, const Expr& e, const Expr& eps) {
  return s.evaluate(call("Delta", {eps, e}));
}

Session definitionalSession(const Session& s) {
  Session d = s.withLeadingPack(definitionsPack());
  d.install(expandPack());
  if (!d.hasPack("funalg")) d.install(funalgPack());
  return d;
}

TheoremCheck checkIdentity(Session& s, const Expr& lhs, const Expr& rhs) {
  TheoremCheck r;
  r.lhs = s.evaluate(lhs);
  r.rhs = rhs;
  Session d = definitionalSession(s);
  Expr diff = plus({r.lhs, minus(rhs)});
  // Expansion can expose new redexes; iterate to a fixpoint.
  for (int i = 0; i < 8; ++i) {
    Expr next = expand(d.evaluate(diff));
    if (next == diff) break;
    diff = next;
  }
  r.difference = canonicalize(diff);
  r.holds = arith::isZero(r.difference) && r.difference.isNumber();
  return r;
}

TheoremCheck checkChainRule(Session& s, const Expr& f, const Expr& x, const Expr& eps) {
  Expr xs = call("Star", {eps, x});
  Expr rhs = plus({call(f, {xs}), minus(call(f, {x})), call(call("Delta", {eps, f}), {xs})});
  return checkIdentity(s, call("Delta", {eps, call(f, {x})}), rhs);
}

TheoremCheck checkProductRule(Session& s, const Expr& y, const Expr& x, const Expr& eps) {
  Expr rhs = plus({times({y, call("Delta", {eps, x})}),
                   times({call("Star", {eps, x}), call("Delta", {eps, y})})});
  return checkIdentity(s, call("Delta", {eps, times({y, x})}), rhs);
}

TheoremCheck checkUnshieldedProduct(Session& s, const Expr& y, const Expr& x, const Expr& eps) {
  Expr dx = call("Delta", {x}), dy = call("Delta", {y});
  Expr rhs = plus({times({eps, plus({times({y, dx}), times({x, dy})})}),
                   times({power(eps, num(2)), dx, dy})});
  return checkIdentity(s, call("Delta", {eps, times({y, x})}), rhs);
}

TheoremCheck checkConstantHead(Session& s, const Expr& f, const Expr& x, const Expr& eps) {
  Expr rhs = plus({call(f, {call("Star", {eps, x})}), minus(call(f, {x}))});
  return checkIdentity(s, call("Delta", {eps, call(f, {x})}), rhs);
}

}  // namespace obskernel
