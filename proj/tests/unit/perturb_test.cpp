#include <gtest/gtest.h>

#include "obskernel/canonical.hpp"
#include "obskernel/funalg.hpp"
#include "obskernel/perturb.hpp"
#include "obskernel/syntax.hpp"

using namespace obskernel;

namespace {

Session calculus() {
  Session s;
  s.install(funalgPack());
  s.install(perturbPack());
  return s;
}

Expr eval(Session& s, const char* text) { return s.evaluate(parse(text)); }

/// Both sides agree once Delta is unfolded to its definition.
bool sameUnderDefinitions(Session& s, const Expr& a, const Expr& b) {
  return checkIdentity(s, a, b).holds;
}

}  // namespace

TEST(Perturb, ZeroAmplitudeAnnihilates) {
  Session s = calculus();
  EXPECT_EQ(eval(s, "delta(0, f[x]*y)"), num(0));
  EXPECT_EQ(eval(s, "star(0, q)"), sym("q"));
}

TEST(Perturb, UnitAmplitudeDropsParameter) {
  Session s = calculus();
  EXPECT_EQ(eval(s, "star(1, q)"), parse("star(q)"));
  EXPECT_EQ(eval(s, "delta(1, q)"), parse("delta(q)"));
}

TEST(Perturb, ConstantsAreFixed) {
  Session s = calculus();
  s.assertFact(parse("x in Cst"));
  EXPECT_EQ(eval(s, "star(x)"), sym("x"));
  EXPECT_EQ(eval(s, "delta(x)"), num(0));
  EXPECT_EQ(eval(s, "delta(eps, x)"), num(0));
  EXPECT_EQ(eval(s, "delta(3)"), num(0));
}

TEST(Perturb, UnshieldedScales) {
  Session s = calculus();
  s.assertFact(parse("x in Uns"));
  EXPECT_EQ(eval(s, "delta(eps, x)"), canonicalize(parse("eps*delta(x)")));
}

TEST(Perturb, ProductRuleForm) {
  Session s = calculus();
  Expr got = expandError(s, parse("y*x"), sym("eps"));
  EXPECT_EQ(got, canonicalize(parse("y*delta(eps,x) + star(eps,x)*delta(eps,y)")));
}

TEST(Perturb, UnshieldedProductIsPolynomialInEps) {
  Session s = calculus();
  s.assertFact(parse("x in Uns"));
  s.assertFact(parse("y in Uns"));
  Expr got = expandError(s, parse("y*x"), sym("eps"));
  Expr want = parse("eps*(y*delta(x)+x*delta(y)) + eps^2*delta(x)*delta(y)");
  EXPECT_EQ(canonicalize(expand(got)), canonicalize(expand(want)));
}

TEST(Perturb, ConstantHead) {
  Session s = calculus();
  s.assertFact(parse("f in Cst"));
  Expr got = expandError(s, parse("f[x]"), sym("eps"));
  EXPECT_EQ(got, canonicalize(parse("f[star(eps,x)] - f[x]")));
}

TEST(Perturb, ChainRuleGeneric) {
  Session s = calculus();
  EXPECT_TRUE(checkChainRule(s, sym("f"), sym("x"), sym("eps")).holds);
}

TEST(Perturb, ChainRuleConstantHead) {
  Session s = calculus();
  s.assertFact(parse("f in Cst"));
  auto c = checkChainRule(s, sym("f"), sym("x"), sym("eps"));
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.lhs, canonicalize(parse("f[star(eps,x)] - f[x]")));
}

TEST(Perturb, ChainRuleAtZero) {
  Session s = calculus();
  auto c = checkChainRule(s, sym("f"), sym("x"), num(0));
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.lhs, num(0));
}

TEST(Perturb, DefiningIdentity) {
  Session s = calculus();
  for (const char* t : {"x", "f[x]", "a+b", "a*b", "g[a, b]"}) {
    Expr e = parse(t);
    EXPECT_TRUE(sameUnderDefinitions(s, call("Delta", {sym("eps"), e}),
                                     plus({call("Star", {sym("eps"), e}), minus(e)})))
        << t;
  }
}

TEST(Perturb, LinearOverCst) {
  Session s = calculus();
  s.assertFact(parse("c in Cst"));
  EXPECT_EQ(canonicalize(eval(s, "delta(a+b) - delta(a) - delta(b)")), num(0));
  EXPECT_EQ(canonicalize(eval(s, "delta(c*a) - c*delta(a)")), num(0));
  EXPECT_EQ(canonicalize(eval(s, "star(c*a) - c*star(a)")), num(0));
}

TEST(Closure, SumOfConstants) {
  Session s = calculus();
  s.assertFact(parse("x in Cst"));
  s.assertFact(parse("y in Cst"));
  EXPECT_EQ(eval(s, "x+y in Cst"), trueExpr());
  EXPECT_EQ(eval(s, "x*y in Cst"), trueExpr());
  EXPECT_EQ(eval(s, "x^-1 in Cst"), trueExpr());
}

TEST(Closure, ConstantLinearMapOfUnshielded) {
  Session s = calculus();
  s.install(linearPack());
  s.assertFact(parse("f in Cst"));
  s.assertFact(parse("f in LFs[K]"));
  s.assertFact(parse("x in Uns"));
  EXPECT_EQ(eval(s, "f[x] in Uns"), trueExpr());
}

TEST(Closure, ProductOfUnshieldedIsUnknown) {
  Session s = calculus();
  s.assertFact(parse("x in Uns"));
  s.assertFact(parse("y in Uns"));
  EXPECT_EQ(eval(s, "x*y in Uns"), element(canonicalize(parse("x*y")), sym("Uns")));
}

TEST(NonFunction, DeltaDoesNotConveyIdentity) {
  Session s = calculus();
  s.assertFact(parse("x = y"));
  auto w = s.conveysIdentity(sym("Delta"), {{sym("x"), sym("y")}});
  EXPECT_FALSE(w.conveys);
}
