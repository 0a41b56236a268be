#pragma once

#include <functional>
#include <string>
#include <vector>

#include "obskernel/errors.hpp"
#include "obskernel/expr.hpp"
#include "obskernel/session.hpp"

namespace obskernel {

class NoSignChange : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

/// The declared uniqueness precondition of a controllable system failed.
class ControllabilityError : public Error {
 public:
  using Error::Error;
};

class UnresolvedConstraint : public Error {
 public:
  using Error::Error;
};

/// Several controllable systems qualify; carries one reduction per candidate.
class AmbiguousConstraint : public Error {
 public:
  AmbiguousConstraint(const std::string& what, std::vector<Expr> reductions)
      : Error(what), reductions_(std::move(reductions)) {}
  const std::vector<Expr>& reductions() const { return reductions_; }

 private:
  std::vector<Expr> reductions_;
};

using RealFunction = std::function<double(double)>;

struct DichotomyResult {
  double root = 0;
  int iterations = 0;
};

/// Bisection on [a, b]. Stops as soon as |f(mid)| <= tol. Throws NoSignChange
/// when f(a) f(b) > 0 and MaxIterations when the budget runs out first.
DichotomyResult dichotomy(const RealFunction& f, double a, double b, double tol = 1e-10,
                          int maxIterations = 200);

struct Servo {
  std::string name = "S";
  double a = 0;
  double b = 1;
  double tolerance = 1e-10;
  int maxIterations = 200;
};

/// z -> numeric value of f[z] in `s`. Throws NotObservable when f[z] is not calculable.
RealFunction numericFunction(Session& s, const Expr& f);

/// rho[T] = S[R o T]. T and R are applicable expressions (pure functions or
/// symbols with rules). Checks sign change and strict monotonicity of R o T on a
/// 64-interval grid, solves by dichotomy, caches the root under T (so Rho[T]
/// evaluates to it) and asserts T in Controllable[R, S].
double eigeninput(Session& s, const Expr& T, const Expr& R, const Servo& servo);

/// Controllable systems named by the facts.
std::vector<Expr> controllableSystems(const Session& s);

/// ul(g) one level down: distributes over heads that do not mention the
/// controllable system, otherwise resolves as `constrain` does.
Expr pushConstraint(Session& s, const Expr& e);

/// Resolves every Underline in `e`. For the single controllable system X in g:
/// ul(X) = X[Rho[X]]; ul(F&) = F with # := Rho[X]; ul(M[..X..]) = M[..X..][Rho[X]];
/// ul(f1@...@fk) = f1[...ul(fk)]; ul(P[args]) = P[ul(args)] when P does not
/// mention X. Throws UnresolvedConstraint (no candidate) or AmbiguousConstraint.
Expr constrain(Session& s, const Expr& e);

/// The two paths of the constraint/perturbation commutation square, computed
/// numerically. All members are one-input pure functions.
struct ConstraintScenario {
  Expr T;
  Expr Tstar;
  Expr R;
  Expr Rstar;
  Expr M;
  double a = 0;
  double b = 1;
};

struct CommutationReport {
  double rho = 0;
  double rhoStar = 0;
  double perturbAfterConstrain = 0;
  double constrainAfterPerturb = 0;
  double gap = 0;
  bool rhoConstant = false;
  bool agree = false;
};

/// Perturbing the constrained value keeps rho (rho in Cst), giving M[T*][rho[T]];
/// constraining the perturbed system gives M[T*][rho[T*]]. agree when the paths
/// are within `tolerance`.
CommutationReport checkConstraintStarCommute(Session& s, const ConstraintScenario& sc,
                                             double tolerance = 1e-9);

struct NonFunctionWitness {
  double rho = 0;
  double rhoStar = 0;
  double constrained = 0;  // T*[rho[T*]]
  double naive = 0;        // T*[rho[T]] = (T + delta[T])[rho[T]]
  double gap = 0;
  bool witness = false;
};

NonFunctionWitness constraintNonFunctionWitness(Session& s, const Expr& T, const Expr& Tstar,
                                                const Expr& R, double a, double b);

/// T[z] = z - 1, T*[z] = z - 1.5, R = identity on [0, 5].
NonFunctionWitness constraintNonFunctionWitness(Session& s);

}  // namespace obskernel
