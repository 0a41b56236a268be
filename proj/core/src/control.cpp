#include "obskernel/control.hpp"

#include <algorithm>
#include <cmath>

#include "obskernel/funalg.hpp"
#include "obskernel/match.hpp"
#include "obskernel/syntax.hpp"

namespace obskernel {

DichotomyResult dichotomy(const RealFunction& f, double a, double b, double tol, int maxIterations) {
  double fa = f(a), fb = f(b);
  if (std::fabs(fa) <= tol) return {a, 0};
  if (std::fabs(fb) <= tol) return {b, 0};
  if (fa * fb > 0)
    throw NoSignChange("no sign change on [" + print(Expr::real(a)) + ", " + print(Expr::real(b)) + "]");
  for (int i = 1; i <= maxIterations; ++i) {
    double mid = a + (b - a) / 2;
    double fm = f(mid);
    if (std::fabs(fm) <= tol) return {mid, i};
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  throw MaxIterations("dichotomy did not reach tolerance in " + std::to_string(maxIterations) +
                      " iterations");
}

RealFunction numericFunction(Session& s, const Expr& f) {
  return [&s, f](double z) {
    Expr applied = call(f, {Expr::real(z)});
    try {
      return numericValue(s.evaluate(applied));
    } catch (const NotNumeric& n) {
      throw NotObservable(print(applied) + " is not observable",
                          n.blocking().empty() ? "non-numeric normal form" : "free symbol",
                          n.blocking());
    } catch (const BudgetExceeded&) {
      throw NotObservable(print(applied) + " is not observable", "budget");
    }
  };
}

double eigeninput(Session& s, const Expr& T, const Expr& R, const Servo& servo) {
  Expr key = list({T, R, sym(servo.name), Expr::real(servo.a), Expr::real(servo.b),
                   Expr::real(servo.tolerance)});
  auto& cache = s.servoCache();
  if (auto it = cache.find(key); it != cache.end()) {
    s.eigeninputs()[T] = it->second;
    return it->second;
  }

  RealFunction t = numericFunction(s, T), r = numericFunction(s, R);
  auto f = [&](double z) { return r(t(z)); };

  constexpr int kGrid = 64;
  std::vector<double> values;
  for (int i = 0; i <= kGrid; ++i) values.push_back(f(servo.a + (servo.b - servo.a) * i / kGrid));
  bool increasing = true, decreasing = true;
  for (int i = 0; i < kGrid; ++i) {
    increasing = increasing && values[i + 1] > values[i];
    decreasing = decreasing && values[i + 1] < values[i];
  }
  if (!increasing && !decreasing)
    throw ControllabilityError("R o T is not strictly monotonous on the bracket; a unique root is not guaranteed");
  if (values.front() * values.back() > 0)
    throw ControllabilityError("R o T does not cross 0 on the bracket");

  double rho = dichotomy(f, servo.a, servo.b, servo.tolerance, servo.maxIterations).root;
  cache[key] = rho;
  s.eigeninputs()[T] = rho;
  s.assertFact(element(T, call("Controllable", {R, sym(servo.name)})));
  return rho;
}

std::vector<Expr> controllableSystems(const Session& s) {
  std::vector<Expr> out;
  for (const auto& f : s.facts().all())
    if (f.hasHead("Element", 2) && f.arg(1).hasHead("Controllable") &&
        std::find(out.begin(), out.end(), f.arg(0)) == out.end())
      out.push_back(f.arg(0));
  return out;
}

namespace {

bool mentions(const Expr& haystack, const Expr& needle) {
  if (haystack == needle) return true;
  if (haystack.isAtom()) return false;
  if (mentions(haystack.head(), needle)) return true;
  return std::any_of(haystack.args().begin(), haystack.args().end(),
                     [&](const Expr& a) { return mentions(a, needle); });
}

void collectCandidates(const Expr& g, const std::vector<Expr>& systems, std::vector<Expr>& out) {
  if (std::find(systems.begin(), systems.end(), g) != systems.end()) {
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    return;
  }
  if (g.isAtom()) return;
  collectCandidates(g.head(), systems, out);
  for (const auto& a : g.args()) collectCandidates(a, systems, out);
}

Expr rho(const Expr& x) { return call("Rho", {x}); }

Expr resolve(const Expr& g, const Expr& x) {
  if (g == x) return call(x, {rho(x)});
  if (g.hasHead("Function")) {
    std::vector<Expr> args{rho(x)};
    return applyFunction(g, args);
  }
  if (g.hasHead("Underline", 1)) return resolve(g.arg(0), x);
  if (g.isAtom()) throw UnresolvedConstraint("no controllable system in " + print(g));
  if (g.hasHead("Circle")) {
    std::size_t k = g.size();
    for (std::size_t i = 0; i + 1 < k; ++i)
      if (mentions(g.arg(i), x))
        throw UnresolvedConstraint("controllable system inside a composition: " + print(g));
    Expr out = resolve(g.arg(k - 1), x);
    for (std::size_t i = k - 1; i-- > 0;) out = call(g.arg(i), {out});
    return out;
  }
  if (std::any_of(g.args().begin(), g.args().end(), [&](const Expr& a) { return a == x; }))
    return call(g, {rho(x)});
  if (mentions(g.head(), x))
    throw UnresolvedConstraint("cannot constrain " + print(g) + ": its head depends on " + print(x));
  std::vector<Expr> args;
  for (const auto& a : g.args()) args.push_back(mentions(a, x) ? resolve(a, x) : a);
  return Expr::compound(g.head(), std::move(args));
}

/// The single controllable system in g, or the matching error.
Expr soleCandidate(Session& s, const Expr& g) {
  std::vector<Expr> candidates;
  collectCandidates(g, controllableSystems(s), candidates);
  if (candidates.empty())
    throw UnresolvedConstraint("no controllable system in " + print(g));
  if (candidates.size() > 1) {
    std::vector<Expr> reductions;
    std::string msg = "ambiguous constraint ul(" + print(g) + "):";
    for (const auto& c : candidates) {
      Expr r = s.evaluate(call(g, {rho(c)}));
      msg += " " + print(r) + " (with " + print(c) + ");";
      reductions.push_back(r);
    }
    throw AmbiguousConstraint(msg, std::move(reductions));
  }
  return candidates.front();
}

Expr constrainWalk(Session& s, const Expr& e) {
  if (e.isAtom()) return e;
  Expr head = constrainWalk(s, e.head());
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(constrainWalk(s, a));
  if (head.isSymbol("Underline") && args.size() == 1) {
    Expr x = soleCandidate(s, args[0]);
    return resolve(args[0], x);
  }
  return Expr::compound(head, std::move(args));
}

}  // namespace

Expr pushConstraint(Session& s, const Expr& e) {
  if (!e.hasHead("Underline", 1)) throw UnresolvedConstraint("not a constraint: " + print(e));
  const Expr& g = e.arg(0);
  Expr x = soleCandidate(s, g);
  bool direct = g == x || g.isAtom() || g.hasHead("Circle") ||
                std::any_of(g.args().begin(), g.args().end(), [&](const Expr& a) { return a == x; });
  if (direct || g.hasHead("Function") || mentions(g.head(), x))
    return s.evaluate(resolve(g, x));
  std::vector<Expr> args;
  for (const auto& a : g.args()) args.push_back(mentions(a, x) ? call("Underline", {a}) : a);
  return Expr::compound(g.head(), std::move(args));
}

Expr constrain(Session& s, const Expr& e) { return s.evaluate(constrainWalk(s, e)); }

CommutationReport checkConstraintStarCommute(Session& s, const ConstraintScenario& sc,
                                             double tolerance) {
  RealFunction t = numericFunction(s, sc.T), ts = numericFunction(s, sc.Tstar);
  RealFunction r = numericFunction(s, sc.R), rs = numericFunction(s, sc.Rstar);
  RealFunction m = numericFunction(s, sc.M);
  double tol = s.budgets().tolerance;
  CommutationReport rep;
  rep.rho = dichotomy([&](double z) { return r(t(z)); }, sc.a, sc.b, tol).root;
  rep.rhoStar = dichotomy([&](double z) { return rs(ts(z)); }, sc.a, sc.b, tol).root;
  rep.perturbAfterConstrain = m(ts(rep.rho));
  rep.constrainAfterPerturb = m(ts(rep.rhoStar));
  rep.gap = std::fabs(rep.perturbAfterConstrain - rep.constrainAfterPerturb);
  rep.rhoConstant = std::fabs(rep.rho - rep.rhoStar) <= tolerance;
  rep.agree = rep.gap <= tolerance;
  return rep;
}

NonFunctionWitness constraintNonFunctionWitness(Session& s, const Expr& T, const Expr& Tstar,
                                                const Expr& R, double a, double b) {
  RealFunction t = numericFunction(s, T), ts = numericFunction(s, Tstar);
  RealFunction r = numericFunction(s, R);
  double tol = s.budgets().tolerance;
  NonFunctionWitness w;
  w.rho = dichotomy([&](double z) { return r(t(z)); }, a, b, tol).root;
  w.rhoStar = dichotomy([&](double z) { return r(ts(z)); }, a, b, tol).root;
  w.constrained = ts(w.rhoStar);
  w.naive = ts(w.rho);
  w.gap = w.constrained - w.naive;
  w.witness = std::fabs(w.gap) > tol;
  return w;
}

NonFunctionWitness constraintNonFunctionWitness(Session& s) {
  return constraintNonFunctionWitness(s, parse("#-1&"), parse("#-3/2&"), parse("#&"), 0, 5);
}

}  // namespace obskernel
