#include <gtest/gtest.h>

#include "generators.hpp"
#include "obskernel/canonical.hpp"
#include "obskernel/control.hpp"
#include "obskernel/funalg.hpp"
#include "obskernel/perturb.hpp"
#include "obskernel/syntax.hpp"
#include "obskernel/theorems.hpp"

using namespace obskernel;

namespace {

Session calculus() {
  Session s;
  s.install(funalgPack());
  s.install(perturbPack());
  return s;
}

Expr randomEps(gen::Rng& rng) {
  switch (gen::below(rng, 3)) {
    case 0: return sym("eps");
    case 1: return num(static_cast<long long>(gen::below(rng, 2)));
    default: return Expr::rational(1 + static_cast<long long>(gen::below(rng, 6)), 7);
  }
}

}  // namespace

TEST(CalculusProperty, TheoremSuiteOverThousandEnvironments) {
  SuiteReport r = runTheoremSuite(1000, 20240607);
  for (const auto& t : r.theorems) {
    EXPECT_EQ(t.checked, 1000u) << t.name;
    EXPECT_EQ(t.failed, 0u) << t.name << ": " << (t.firstFailure ? print(t.firstFailure->difference) : "");
  }
}

TEST(CalculusProperty, DefiningIdentity) {
  gen::Rng rng(301);
  Session s = calculus();
  for (int i = 0; i < 300; ++i) {
    Expr e = gen::polynomial(rng, 3);
    Expr eps = randomEps(rng);
    auto c = checkIdentity(s, call("Delta", {eps, e}), plus({call("Star", {eps, e}), minus(e)}));
    ASSERT_TRUE(c.holds) << print(e) << " eps=" << print(eps) << " diff " << print(c.difference);
  }
}

TEST(CalculusProperty, DeltaAndStarAreLinearOverCst) {
  gen::Rng rng(302);
  Session s = calculus();
  s.assertFact(parse("k in Cst"));
  for (int i = 0; i < 300; ++i) {
    Expr a = gen::polynomial(rng, 2), b = gen::polynomial(rng, 2);
    Expr sum = s.evaluate(plus({call("Delta", {plus({a, b})}), minus(call("Delta", {a})), minus(call("Delta", {b}))}));
    ASSERT_EQ(canonicalize(expand(sum)), num(0)) << print(a) << " ; " << print(b);
    Expr scaled = s.evaluate(plus({call("Delta", {times({sym("k"), a})}), minus(times({sym("k"), call("Delta", {a})}))}));
    ASSERT_EQ(canonicalize(expand(scaled)), num(0)) << print(a);
    Expr star = s.evaluate(plus({call("Star", {times({sym("k"), a})}), minus(times({sym("k"), call("Star", {a})}))}));
    ASSERT_EQ(canonicalize(expand(star)), num(0)) << print(a);
  }
}

TEST(CalculusProperty, CstIsTheKernelOfDelta) {
  gen::Rng rng(303);
  Session s = calculus();
  for (const char* c : {"a", "b", "c"}) s.assertFact(element(sym(c), sym("Cst")));
  s.assertFact(parse("h in Cst"));
  const std::vector<Expr> atoms{sym("a"), sym("b"), sym("c"), num(2), Expr::rational(1, 3)};
  for (int i = 0; i < 300; ++i) {
    Expr x = atoms[gen::below(rng, atoms.size())];
    for (int k = 0; k < 3; ++k) {
      Expr y = atoms[gen::below(rng, atoms.size())];
      switch (gen::below(rng, 4)) {
        case 0: x = plus({x, y}); break;
        case 1: x = times({x, y}); break;
        case 2: x = power(x, num(2)); break;
        default: x = call(sym("h"), {x}); break;
      }
    }
    ASSERT_TRUE(s.facts().member(canonicalize(x), sym("Cst"))) << print(x);
    ASSERT_EQ(s.evaluate(call("Delta", {x})), num(0)) << print(x);
    ASSERT_EQ(s.evaluate(call("Delta", {randomEps(rng), x})), num(0)) << print(x);
  }
}

// Abstract P (no occurrence of the system) commutes with the constraint.
TEST(ControlProperty, ConstraintCommutesWithAbstract) {
  gen::Rng rng(304);
  Session s = calculus();
  s.assertFact(parse("T in Controllable[R, S]"));
  const std::vector<std::string> forms{"g", "g@h", "g[#]+2&", "3*#&", "(g+h)", "#^2&"};
  const std::vector<std::string> props{"M[T]", "M1[T]+M2[T]", "M[T]*2", "N[T][#]&"};
  for (int i = 0; i < 300; ++i) {
    Expr P = parse(forms[gen::below(rng, forms.size())]);
    if (gen::below(rng, 2)) P = call("Circle", {parse(forms[gen::below(rng, forms.size())]), P});
    Expr MT = parse(props[gen::below(rng, props.size())]);
    Expr lhs = constrain(s, call("Underline", {call(P, {MT})}));
    Expr rhs = s.evaluate(call(P, {constrain(s, call("Underline", {MT}))}));
    ASSERT_EQ(canonicalize(expand(plus({lhs, minus(rhs)}))), num(0)) << print(P) << " on " << print(MT);
  }
}

TEST(ControlProperty, ServoContractAndCache) {
  gen::Rng rng(305);
  std::uniform_real_distribution<double> root(0.5, 4.5), slope(0.2, 3.0);
  Session s = calculus();
  for (int i = 0; i < 100; ++i) {
    double c = root(rng), k = slope(rng);
    Expr T = call("Function", {times({Expr::real(k), plus({call("Slot", {num(1)}), Expr::real(-c)})})});
    Servo servo;
    servo.b = 5;
    double rho = eigeninput(s, T, parse("#&"), servo);
    ASSERT_LE(std::fabs(k * (rho - c)), servo.tolerance);
    ASSERT_EQ(eigeninput(s, T, parse("#&"), servo), rho);
  }
}

TEST(ControlProperty, CommutationSquareUnderHypotheses) {
  gen::Rng rng(306);
  std::uniform_real_distribution<double> root(1.0, 9.0), gain(0.5, 1.5), coef(-1.0, 1.0);
  Session s = calculus();
  for (int i = 0; i < 100; ++i) {
    double c = root(rng), k = gain(rng), a = coef(rng), b = coef(rng);
    auto fn = [](const std::string& text) { return parse(text); };
    std::string cs = print(Expr::real(c));
    ConstraintScenario sc{fn("#&"),
                          fn(cs + "+" + print(Expr::real(k)) + "*(#-" + cs + ")&"),
                          fn("#-" + cs + "&"),
                          fn("#-" + cs + "&"),
                          fn(print(Expr::real(a)) + "*#+" + print(Expr::real(b)) + "&"),
                          0,
                          10};
    auto r = checkConstraintStarCommute(s, sc);
    ASSERT_TRUE(r.agree) << "c=" << c << " k=" << k << " gap=" << r.gap;
  }
  // The counterexample kept in the suite: the perturbation moves the root.
  ConstraintScenario moved{parse("#&"), parse("#+0.2&"), parse("#-3&"), parse("#-3&"), parse("#&"), 0, 10};
  EXPECT_FALSE(checkConstraintStarCommute(s, moved).agree);
}
