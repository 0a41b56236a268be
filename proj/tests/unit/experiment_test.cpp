#include <gtest/gtest.h>

#include <cmath>

#include "obskernel/canonical.hpp"
#include "obskernel/experiment.hpp"
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

Experiment staticExperiment(const char* property, const char* state, std::size_t outputs = 1) {
  return Experiment{parse(property), MaterialSystem{sym("T"), 0, parse(state)}, outputs};
}

}  // namespace

TEST(RunExperiment, StateSum) {
  Session s = calculus();
  auto out = runExperiment(s, staticExperiment("#[[1]]+#[[2]]&", "{1.0, 2.0}"));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], 1.0 + 2.0);
}

TEST(RunExperiment, FreeSymbolIsNotObservable) {
  Session s = calculus();
  try {
    runExperiment(s, staticExperiment("q*#&", "2"));
    FAIL() << "expected NotObservable";
  } catch (const NotObservable& e) {
    EXPECT_EQ(e.reason(), "free symbol");
    ASSERT_EQ(e.blocking().size(), 1u);
    EXPECT_EQ(e.blocking()[0], sym("q"));
  }
}

TEST(RunExperiment, BudgetIsNotObservable) {
  Session s = calculus();
  s.addRule(parse("w :> w + 1"));
  try {
    runExperiment(s, staticExperiment("w*#&", "2"));
    FAIL() << "expected NotObservable";
  } catch (const NotObservable& e) {
    EXPECT_EQ(e.reason(), "budget");
  }
}

TEST(RunExperiment, SeveralOutputs) {
  Session s = calculus();
  auto out = runExperiment(s, staticExperiment("{#[[1]], 2*#[[2]]}&", "{3, 4}", 2));
  EXPECT_EQ(out, (std::vector<double>{3.0, 8.0}));
  EXPECT_THROW(runExperiment(s, staticExperiment("{#, #}&", "1", 1)), Error);
}

TEST(RunExperiment, LiftedOverInput) {
  Session s = calculus();
  Experiment ex{parse("#^2&"), MaterialSystem{sym("T"), 1, parse("3*#+1&")}, 1};
  for (double z : {0.0, 0.5, 2.0}) {
    auto out = runExperimentAt(s, ex, {z});
    EXPECT_DOUBLE_EQ(out[0], (3 * z + 1) * (3 * z + 1));
  }
  EXPECT_THROW(runExperiment(s, ex), Error);
}

TEST(Interpret, LogOfPositiveOutput) {
  Session s = calculus();
  auto in = interpret(s, staticExperiment("#&", "2.0"), parse("Log[#]&"));
  EXPECT_EQ(in.output[0], std::log(2.0));
  EXPECT_FALSE(in.tautologic);
  EXPECT_FALSE(in.isPrivate);
}

TEST(Interpret, FirstComponent) {
  Session s = calculus();
  Experiment ex = staticExperiment("{M1[#], M2[#]}&", "T0", 2);
  s.addRule(parse("M1[T0] -> 5"));
  s.addRule(parse("M2[T0] -> 7"));
  auto in = interpret(s, ex, parse("#[[1]]&"));
  EXPECT_EQ(in.output, std::vector<double>{5.0});
  EXPECT_EQ(in.experiment.outputs, 1u);
  EXPECT_EQ(in.gauge.gamma, parse("#[[1]]&"));
}

TEST(Interpret, IdentityIsTautologic) {
  Session s = calculus();
  EXPECT_TRUE(interpret(s, staticExperiment("2*#&", "3"), sym("Identity")).tautologic);
  EXPECT_TRUE(interpret(s, staticExperiment("2*#&", "3"), parse("#&")).tautologic);
}

TEST(Interpret, MentioningTheSystemIsPrivate) {
  Session s = calculus();
  s.addRule(parse("k[T] -> 4"));
  auto in = interpret(s, staticExperiment("2*#&", "3"), parse("#/k[T]&"));
  EXPECT_TRUE(in.isPrivate);
  EXPECT_EQ(in.output[0], 1.5);
}

TEST(Gauge, ConsistentFactorization) {
  Session s = calculus();
  Experiment ex = staticExperiment("3*#^2&", "2");
  EXPECT_TRUE(gaugeConsistent(s, ex, Gauge{parse("3*#&"), parse("#^2&")}));
  EXPECT_FALSE(gaugeConsistent(s, ex, Gauge{parse("2*#&"), parse("#^2&")}));
}

TEST(Current, SignIsLost) {
  Session s = calculus();
  auto r = currentExample(s, num(2), num(-3));
  EXPECT_EQ(r.observed, 2.0 * 9.0);
  EXPECT_EQ(r.interpreted, 3.0);
  EXPECT_TRUE(r.signLost);
}

TEST(Current, ZeroCurrent) {
  Session s = calculus();
  auto r = currentExample(s, num(2), num(0));
  EXPECT_EQ(r.observed, 0.0);
  EXPECT_EQ(r.interpreted, 0.0);
  EXPECT_FALSE(r.signLost);
}

TEST(Current, KInterpretationFails) {
  Session s = calculus();
  auto r = currentExample(s, num(2), num(-3));
  EXPECT_NE(r.kFailure.find("not observable"), std::string::npos);
  ASSERT_EQ(r.kBlocking.size(), 1u);
  EXPECT_EQ(r.kBlocking[0], sym("k"));
}

TEST(Program, MonteCarloMean) {
  auto prog = monteCarloMean([](std::mt19937_64& rng) { return uniform01(rng); }, 12345);
  auto res = runProgram(prog);
  EXPECT_EQ(res.trace.size(), res.t + 1);
  EXPECT_NEAR(res.estimate.value, 0.5, 0.05);
  EXPECT_LT(res.estimate.standardError(), 0.01);
  for (std::size_t k = 0; k < res.t; ++k) EXPECT_FALSE(prog.test(k, res.trace[k])) << k;
}

TEST(Program, PassingAtStartDrawsNothing) {
  ExperimentalProgram p;
  p.step = [](std::size_t, const Estimate&, std::mt19937_64&) -> Estimate {
    ADD_FAILURE() << "step should not run";
    return {};
  };
  p.test = [](std::size_t, const Estimate&) { return true; };
  auto res = runProgram(p);
  EXPECT_EQ(res.t, 0u);
  EXPECT_EQ(res.trace.size(), 1u);
}

TEST(Program, NeverPassingRaisesWithTrace) {
  ExperimentalProgram p = monteCarloMean([](std::mt19937_64& rng) { return uniform01(rng); }, 1);
  p.test = [](std::size_t, const Estimate&) { return false; };
  p.maxSteps = 50;
  try {
    runProgram(p);
    FAIL() << "expected MaxSteps";
  } catch (const MaxSteps& e) {
    EXPECT_EQ(e.trace().size(), 51u);
  }
}

TEST(Program, SeedDeterminesRun) {
  auto a = runProgram(monteCarloMean([](std::mt19937_64& rng) { return uniform01(rng); }, 9));
  auto b = runProgram(monteCarloMean([](std::mt19937_64& rng) { return uniform01(rng); }, 9));
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.estimate.value, b.estimate.value);
}

TEST(Decomposition, NoPerturbation) {
  Session s = calculus();
  auto d = errorDecomposition(s, parse("#&"), parse("#&"), num(1), num(1));
  EXPECT_EQ(d.total, 0);
  EXPECT_EQ(d.realization, 0);
  EXPECT_EQ(d.programming, 0);
}

TEST(Decomposition, WorkedNumbers) {
  Session s = calculus();
  auto d = errorDecomposition(s, parse("#&"), parse("1.1*#&"), num(1), Expr::real(1.2));
  // Independent: sigma[T] = 1, sigma[T*] = 1.2, sigma*[T*] = 1.1 * 1.2 in doubles.
  double sT = 1.0, sTs = 1.2, ssTs = 1.1 * 1.2;
  EXPECT_NEAR(d.totalValue(), ssTs - sT, 1e-15);
  EXPECT_NEAR(d.realizationValue(), sTs - sT, 1e-15);
  EXPECT_NEAR(d.programmingValue(), ssTs - sTs, 1e-15);
  EXPECT_NEAR(d.totalValue(), 0.32, 1e-12);
  EXPECT_EQ(d.total, d.realization + d.programming);
}

TEST(SeriesFit, ConstantFluxLinearGauge) {
  std::vector<std::pair<double, double>> samples;
  for (double e : {0.0, 0.25, 0.5, 0.75, 1.0}) samples.emplace_back(e, 6 - 6 * e);
  auto fit = fitResponseSeries(samples, 2);
  ASSERT_EQ(fit.coefficients.size(), 3u);
  EXPECT_NEAR(fit.coefficients[0], 6, 1e-9);
  EXPECT_NEAR(fit.coefficients[1], -6, 1e-9);
  EXPECT_NEAR(fit.coefficients[2], 0, 1e-9);
  ASSERT_TRUE(fit.signalToNoise && fit.shielding);
  EXPECT_NEAR(*fit.signalToNoise, -1, 1e-9);
  EXPECT_NEAR(*fit.shielding, 0, 1e-9);
}

TEST(SeriesFit, QuadraticRecovery) {
  std::vector<std::pair<double, double>> samples;
  for (double e : {0.0, 0.2, 0.4, 0.6, 0.8}) samples.emplace_back(e, 1 + 2 * e + 3 * e * e);
  auto fit = fitResponseSeries(samples, 2);
  EXPECT_NEAR(fit.coefficients[0], 1, 1e-9);
  EXPECT_NEAR(fit.coefficients[1], 2, 1e-9);
  EXPECT_NEAR(fit.coefficients[2], 3, 1e-9);
}

TEST(SeriesFit, Underdetermined) {
  EXPECT_THROW(fitResponseSeries({{0.0, 1.0}, {0.5, 2.0}}, 2), DegenerateFit);
  EXPECT_THROW(fitResponseSeries({{0.5, 1.0}, {0.5, 2.0}, {0.5, 3.0}}, 2), DegenerateFit);
}

TEST(SeriesFit, RatioUndefinedOnZeroDenominator) {
  auto fit = fitResponseSeries({{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}}, 1);
  EXPECT_FALSE(fit.signalToNoise);
}

// Two-input system T2[e, z]: the eigeninput of T2[e, #]& as a series in e.
TEST(SeriesFit, EigeninputOfTwoInputSystem) {
  Session s = calculus();
  s.addRule(parse("T2[e_, z_] :> z - 1 - e/2 + e^2/4"));
  std::vector<std::pair<double, double>> samples;
  for (double e : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Servo servo;
    servo.b = 3;
    servo.tolerance = 1e-13;
    Expr Te = call("Function", {call(sym("T2"), {Expr::real(e), call("Slot", {num(1)})})});
    samples.emplace_back(e, eigeninput(s, Te, parse("#&"), servo));
  }
  auto fit = fitResponseSeries(samples, 2);
  EXPECT_NEAR(fit.coefficients[0], 1, 1e-9);
  EXPECT_NEAR(fit.coefficients[1], 0.5, 1e-9);
  EXPECT_NEAR(fit.coefficients[2], -0.25, 1e-9);
}

TEST(LinearGauge, SymbolicForms) {
  Session s;
  auto r = linearGaugeScenario(s);
  EXPECT_TRUE(r.sigmaForm);
  EXPECT_TRUE(r.responseForm);
  EXPECT_TRUE(r.derivativeForm);
  EXPECT_TRUE(r.interpretationHolds);
  EXPECT_EQ(r.interpreted, parse("sigma[T]"));
}

TEST(LinearGauge, ZeroAmplitude) {
  Session s;
  EXPECT_EQ(linearGaugeScenario(s, num(0)).sigmaStar, parse("sigma[T]"));
}

TEST(LinearGauge, UnitAmplitudeAnnihilates) {
  Session s;
  EXPECT_EQ(linearGaugeScenario(s, num(1)).sigmaStar, num(0));
}

TEST(Derivative, Rules) {
  Expr e = sym("e");
  EXPECT_EQ(canonicalize(derivative(parse("3*e^2 + e"), e)), canonicalize(parse("6*e + 1")));
  EXPECT_EQ(canonicalize(derivative(parse("f[2*e]"), e)), canonicalize(parse("d[f][2*e][2]")));
  EXPECT_EQ(derivative(parse("q"), e), num(0));
}

TEST(Noise, ZeroAmplitudeIsDegenerate) {
  auto n = noisyEvaluate([](double x) { return x * x; }, 3, 0, 100, 1);
  EXPECT_EQ(n.mean, 9.0);
  EXPECT_EQ(n.sd, 0.0);
  EXPECT_EQ(n.min, 9.0);
  EXPECT_EQ(n.max, 9.0);
  EXPECT_EQ(n.histogram[0], 100u);
}

TEST(Noise, UniformMoments) {
  auto n = noisyEvaluate([](double x) { return x; }, 0, 1, 100000, 2024);
  EXPECT_NEAR(n.mean, 0, 0.01);
  EXPECT_NEAR(n.sd, 1 / std::sqrt(3.0), 0.02);
  std::size_t total = 0;
  for (auto c : n.histogram) total += c;
  EXPECT_EQ(total, 100000u);
}

TEST(Noise, SeedIsReproducible) {
  auto a = noisyEvaluate([](double x) { return std::log(x); }, 3, 1e-3, 500, 77);
  auto b = noisyEvaluate([](double x) { return std::log(x); }, 3, 1e-3, 500, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.sd, b.sd);
  EXPECT_EQ(a.histogram, b.histogram);
}
