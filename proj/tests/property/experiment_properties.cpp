#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
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

std::string real(double v) { return print(Expr::real(v)); }

}  // namespace

// The compound of calculable maps stays observable; values checked in doubles.
TEST(ExperimentProperty, InterpretationOfObservableIsObservable) {
  gen::Rng rng(401);
  std::uniform_real_distribution<double> d(0.5, 3.0);
  Session s = calculus();
  for (int i = 0; i < 300; ++i) {
    double state = d(rng), a = d(rng), b = d(rng);
    Experiment ex{parse(real(a) + "*#+" + real(b) + "&"), MaterialSystem{sym("T"), 0, Expr::real(state)}, 1};
    double m = a * state + b;
    struct Case {
      std::string text;
      double expected;
    };
    const std::vector<Case> cases{{"Log[#]&", std::log(m)},
                                  {"Exp[-#]&", std::exp(-m)},
                                  {"Sqrt[#^2+1]&", std::sqrt(m * m + 1)},
                                  {real(b) + "*#-1&", b * m - 1},
                                  {"Sin[#]*Cos[#]&", std::sin(m) * std::cos(m)}};
    const Case& c = cases[gen::below(rng, cases.size())];
    Interpretation in = interpret(s, ex, parse(c.text));
    ASSERT_NEAR(in.output[0], c.expected, 1e-12 * std::max(1.0, std::fabs(c.expected))) << c.text;
    ASSERT_FALSE(in.isPrivate);
  }
}

TEST(ExperimentProperty, AttachedGaugesAreConsistent) {
  gen::Rng rng(402);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  Session s = calculus();
  const std::vector<std::string> gammas{"2*#&", "#+1&", "#^3&", "Exp[#]&"};
  const std::vector<std::string> phis{"#^2&", "3*#-1&", "Sin[#]&"};
  for (int i = 0; i < 300; ++i) {
    Expr gamma = parse(gammas[gen::below(rng, gammas.size())]);
    Expr phi = parse(phis[gen::below(rng, phis.size())]);
    Experiment ex{call("Circle", {gamma, phi}), MaterialSystem{sym("T"), 0, Expr::real(d(rng))}, 1};
    ASSERT_TRUE(gaugeConsistent(s, ex, Gauge{gamma, phi})) << print(ex.property);
  }
}

TEST(ExperimentProperty, ProgramReturnsLeastPassingIndex) {
  gen::Rng rng(403);
  for (int i = 0; i < 40; ++i) {
    double target = 0.01 + 0.04 * gen::below(rng, 5) / 4.0;
    auto p = monteCarloMean([](std::mt19937_64& r) { return uniform01(r); }, rng(), target, 10 + gen::below(rng, 40));
    ProgramResult res = runProgram(p);
    ASSERT_EQ(res.trace.size(), res.t + 1);
    ASSERT_TRUE(p.test(res.t, res.trace.back()));
    for (std::size_t k = 0; k < res.t; ++k) ASSERT_FALSE(p.test(k, res.trace[k]));
  }
}

TEST(ExperimentProperty, MonteCarloMeanOnFixedSeeds) {
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto res = runProgram(monteCarloMean([](std::mt19937_64& r) { return uniform01(r); }, seed));
    if (std::fabs(res.estimate.value - 0.5) <= 0.05) ++within;
  }
  EXPECT_GE(within, 99);
}

TEST(ExperimentProperty, DecompositionIsExact) {
  gen::Rng rng(404);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    ErrorDecomposition e = errorDecomposition(d(rng), d(rng), d(rng));
    ASSERT_EQ(e.total, e.realization + e.programming);
  }
}

TEST(ExperimentProperty, SeriesFitRecoversPolynomials) {
  gen::Rng rng(405);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    std::size_t order = 1 + gen::below(rng, 4);
    std::size_t degree = gen::below(rng, order + 1);
    std::vector<double> c(degree + 1);
    for (auto& v : c) v = coef(rng);
    std::size_t n = order + 1 + gen::below(rng, 4);
    std::vector<std::pair<double, double>> samples;
    for (std::size_t k = 0; k < n; ++k) {
      double e = static_cast<double>(k) / static_cast<double>(n - 1);
      double v = 0, p = 1;
      for (double ck : c) {
        v += ck * p;
        p *= e;
      }
      samples.emplace_back(e, v);
    }
    SeriesFit fit = fitResponseSeries(samples, order);
    ASSERT_EQ(fit.coefficients.size(), order + 1);
    for (std::size_t t = 0; t <= order; ++t) {
      double want = t <= degree ? c[t] : 0.0;
      ASSERT_NEAR(fit.coefficients[t], want, 1e-9) << "order " << order << " t " << t;
    }
  }
}
