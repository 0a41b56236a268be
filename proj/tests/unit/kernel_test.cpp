#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "obskernel/canonical.hpp"
#include "obskernel/session.hpp"
#include "obskernel/syntax.hpp"
#include "oracle.hpp"

using namespace obskernel;

TEST(Parse, NestedApplication) {
  Expr expected = call(sym("x"), {sym("y"), call(sym("z"), {num(1), num(2)})});
  EXPECT_EQ(parse("x[y,z[1,2]]"), expected);
}

TEST(Parse, InfixPlusIsPlusHead) {
  Expr e = parse("x+y");
  ASSERT_TRUE(e.hasHead("Plus", 2));
  EXPECT_EQ(e.arg(0), sym("x"));
  EXPECT_EQ(e.arg(1), sym("y"));
}

TEST(Parse, RationalNumeral) {
  Expr e = parse("22/7");
  ASSERT_TRUE(e.isExact());
  EXPECT_EQ(e.exactValue(), Exact(22) / Exact(7));
}

TEST(Parse, RealAndIntegerNumerals) {
  EXPECT_EQ(parse("3"), num(3));
  ASSERT_TRUE(parse("3.14").isReal());
  EXPECT_EQ(parse("3.14").realValue(), 3.14);
}

TEST(Parse, MalformedInputReportsSpan) {
  try {
    parse("f[x,");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().start, 4u);
  }
  EXPECT_THROW(parse("1 +* 2"), ParseError);
  EXPECT_THROW(parse(")"), ParseError);
}

TEST(Parse, AliasesMapToKernelHeads) {
  EXPECT_EQ(parse("star(eps, x)"), call("Star", {sym("eps"), sym("x")}));
  EXPECT_EQ(parse("delta(x)"), call("Delta", {sym("x")}));
  EXPECT_EQ(parse("ul(T)"), call("Underline", {sym("T")}));
}

TEST(Parse, BangAsserts) {
  EXPECT_EQ(parse("x in Cst !"), call("Assert", {element(sym("x"), sym("Cst"))}));
}

TEST(Depth, NestedExample) { EXPECT_EQ(depth(parse("x[y,z[1,2]]")), 3u); }

TEST(Depth, AtomIsOne) { EXPECT_EQ(depth(sym("Pi")), 1u); }

TEST(Depth, MatchesHandRecursion) {
  for (const char* t : {"f[g[h[1]]]", "{1,{2,{3}}}", "a+b*c", "f[]", "#&"}) {
    Expr e = parse(t);
    EXPECT_EQ(depth(e), oracle::depth(e)) << t;
  }
  EXPECT_EQ(depth(parse("f[g[h[1]]]")), 4u);
}

TEST(Print, InfixAndSugar) {
  EXPECT_EQ(print(call("Plus", {sym("x"), sym("y")})), "x+y");
  EXPECT_EQ(print(Expr::rational(22, 7)), "22/7");
  EXPECT_EQ(print(call("Function", {call(sym("f"), {call("Slot", {num(1)})})})), "f[#]&");
}

TEST(Exact, RationalsAreReducedWithPositiveDenominator) {
  Expr half = Expr::rational(3, -6);
  EXPECT_EQ(half.exactValue(), Exact(-1) / Exact(2));
  EXPECT_TRUE(Expr::rational(4, 2).isInteger());
  EXPECT_EQ(Expr::rational(4, 2), num(2));
}

TEST(Structural, EqualityIgnoresSourceSpans) {
  EXPECT_EQ(parse("f[ x , y ]"), parse("f[x,y]"));
  EXPECT_NE(parse("f[x,y]"), parse("f[y,x]"));
}

TEST(Canonicalize, SortsOrderlessArguments) {
  EXPECT_EQ(canonicalize(call("Times", {sym("b"), sym("a")})), call("Times", {sym("a"), sym("b")}));
}

TEST(Canonicalize, AdditiveInverse) {
  EXPECT_EQ(canonicalize(call("Plus", {sym("x"), call("Times", {num(-1), sym("x")})})), num(0));
}

TEST(Canonicalize, FlattensAssociativeHeads) {
  Expr nested = call("Plus", {call("Plus", {sym("x"), sym("y")}), sym("z")});
  EXPECT_EQ(canonicalize(nested), call("Plus", {sym("x"), sym("y"), sym("z")}));
}

TEST(Canonicalize, CollectsLikeFactors) {
  EXPECT_EQ(canonicalize(parse("x*x*y")), canonicalize(parse("y*x^2")));
  EXPECT_EQ(canonicalize(parse("2*x+3*x")), canonicalize(parse("5*x")));
}

TEST(Canonicalize, RealContaminatesExactArithmetic) {
  Expr r = canonicalize(parse("1/2 + 0.25"));
  ASSERT_TRUE(r.isReal());
  EXPECT_EQ(r.realValue(), 0.75);
}

TEST(Canonicalize, LeavesHeldHeadsAlone) {
  Expr f = parse("(b+a)&");
  EXPECT_EQ(canonicalize(f), f);
}

TEST(Numeric, RationalMatchesDoubleDivision) {
  Session s;
  Expr n = s.numeric(parse("22/7"));
  ASSERT_TRUE(n.isReal());
  EXPECT_EQ(n.realValue(), 22.0 / 7.0);
}

TEST(Numeric, PiMatchesMachinSeries) {
  Session s;
  double pi = s.numeric(sym("Pi")).realValue();
  EXPECT_NEAR(pi, oracle::machinPi(), 4 * std::numeric_limits<double>::epsilon());
}

TEST(Numeric, LogIsNoisyWithinFourUlp) {
  Session s;
  double direct = s.numeric(parse("Log[3/2]")).realValue();
  double split = s.numeric(parse("Log[3]")).realValue() - s.numeric(parse("Log[2]")).realValue();
  EXPECT_LE(oracle::ulpDistance(direct, split), 4);
  EXPECT_EQ(direct, std::log(1.5));
}

TEST(Numeric, FreeSymbolBlocks) {
  Session s;
  try {
    s.numeric(parse("q+1"));
    FAIL() << "expected NotNumeric";
  } catch (const NotNumeric& e) {
    ASSERT_EQ(e.blocking().size(), 1u);
    EXPECT_EQ(e.blocking()[0], sym("q"));
  }
}
