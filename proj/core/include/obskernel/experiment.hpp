#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "obskernel/control.hpp"
#include "obskernel/errors.hpp"
#include "obskernel/expr.hpp"
#include "obskernel/session.hpp"

namespace obskernel {

/// T in the world of systems with p inputs. For p = 0 the realization is a state
/// expression (a number, a list, or anything the property can read); for p >= 1
/// it is a pure function from p reals to a state.
struct MaterialSystem {
  Expr tag = sym("T");
  std::size_t inputs = 0;
  Expr realization;
};

/// {M, T}: a property applied to a system, with n outputs.
struct Experiment {
  Expr property;
  MaterialSystem system;
  std::size_t outputs = 1;
};

/// M[T] = Gamma[Phi[T]].
struct Gauge {
  Expr gamma;
  Expr phi;
};

/// Output of a static experiment. Throws NotObservable naming the blocking
/// component and the reason (free symbol, budget, non-numeric normal form).
std::vector<double> runExperiment(Session& s, const Experiment& ex);

/// Output of an experiment with inputs, sampled at z (size must equal p).
std::vector<double> runExperimentAt(Session& s, const Experiment& ex, const std::vector<double>& z);

struct Interpretation {
  Experiment experiment;  // {P@M, T}
  std::vector<double> output;
  bool tautologic = false;
  bool isPrivate = false;
  Gauge gauge;  // Gamma = P, Phi = M
};

/// P interprets M[T] to P[M[T]]. Private when the composed property P@M mentions
/// the tag of T.
Interpretation interpret(Session& s, const Experiment& ex, const Expr& P);

/// |numeric M[T] - Gamma[Phi[T]]| <= tol on the static system of `ex`.
bool gaugeConsistent(Session& s, const Experiment& ex, const Gauge& g, double tol = 1e-9);

struct CurrentReport {
  double observed = 0;     // r i^2
  double interpreted = 0;  // (observed / r)^(1/2)
  bool signLost = false;
  std::string kFailure;  // why k^-1 # fails
  std::vector<Expr> kBlocking;
};

/// The experiment {r #^2 &, i}, interpreted by (r^-1 #)^(1/2) & and by k^-1 # &.
CurrentReport currentExample(Session& s, const Expr& r, const Expr& i);

/// Running mean with Welford's update.
struct Estimate {
  double value = 0;
  double m2 = 0;
  std::size_t samples = 0;

  void add(double x);
  double variance() const;
  double standardError() const;
};

using StepRule = std::function<Estimate(std::size_t t, const Estimate& previous, std::mt19937_64& rng)>;
using TestRule = std::function<bool(std::size_t t, const Estimate& current)>;

struct ExperimentalProgram {
  Estimate initial;
  StepRule step;
  TestRule test;
  std::size_t maxSteps = 100000;
  std::uint64_t seed = 0;
};

struct ProgramResult {
  std::size_t t = 0;
  Estimate estimate;
  std::vector<Estimate> trace;  // trace[k] is the estimate after step k; size t + 1
  std::uint64_t seed = 0;
};

class MaxSteps : public Error {
 public:
  MaxSteps(const std::string& what, std::vector<Estimate> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<Estimate>& trace() const { return trace_; }

 private:
  std::vector<Estimate> trace_;
};

/// Iterates until the test passes; returns the least passing t.
ProgramResult runProgram(const ExperimentalProgram& prog);

/// Uniform [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Monte-Carlo mean of `source`: each step draws one sample ("try again"); the
/// test asks for at least `minSamples` samples and a standard error below `target`.
ExperimentalProgram monteCarloMean(std::function<double(std::mt19937_64&)> source,
                                   std::uint64_t seed, double target = 0.01,
                                   std::size_t minSamples = 30, std::size_t maxSteps = 100000);

/// Exact decomposition of the observed error. The four values are taken as
/// doubles and the differences computed in exact rationals.
struct ErrorDecomposition {
  Exact total;
  Exact realization;
  Exact programming;

  double totalValue() const { return total.convert_to<double>(); }
  double realizationValue() const { return realization.convert_to<double>(); }
  double programmingValue() const { return programming.convert_to<double>(); }
};

ErrorDecomposition errorDecomposition(double sigmaT, double sigmaTstar, double sigmaStarTstar);
ErrorDecomposition errorDecomposition(Session& s, const Expr& sigma, const Expr& sigmaStar,
                                      const Expr& T, const Expr& Tstar);

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

struct SeriesFit {
  std::vector<double> coefficients;  // r_0 .. r_order
  std::optional<double> signalToNoise;
  std::optional<double> shielding;
};

/// Least-squares polynomial fit of R[T*_e] = sum r_t e^t. Ratios are undefined
/// when the denominator is below `tol` in magnitude.
SeriesFit fitResponseSeries(const std::vector<std::pair<double, double>>& samples, std::size_t order,
                            double tol = 1e-10);

struct LinearGaugeReport {
  Expr sigmaStar;        // sigma[T*_e] after evaluation
  bool sigmaForm = false;  // equals sigma[T] (1 - e)
  Expr response;          // R[T*_e] = sigma[T*_e] Phi[T*_e]
  bool responseForm = false;
  Expr derivative;        // (R o T*)'[0]
  bool derivativeForm = false;  // equals sigma[T] (d[Phi][T][delta[T]] - Phi[T])
  Expr interpreted;       // -Phi[T]^-1 # applied with d[Phi][T][delta[T]] = 0
  bool interpretationHolds = false;
};

/// Symbolic derivation of the linear gauge scenario with sigma linear over the
/// reals and constant, T unshielded and the user rule sigma[delta[T]] -> -sigma[T].
/// `eps` may be a symbol or a number.
LinearGaugeReport linearGaugeScenario(const Session& s, const Expr& eps = sym("eps"));

/// d/de of `e` (symbolic); unknown f[u] differentiate to d[f][u][u'].
Expr derivative(const Expr& e, const Expr& var);

struct NoiseSummary {
  double mean = 0;
  double sd = 0;
  double min = 0;
  double max = 0;
  std::vector<std::size_t> histogram;  // 20 equal bins over [min, max]
};

NoiseSummary noisyEvaluate(const RealFunction& f, double x, double amplitude, std::size_t samples,
                           std::uint64_t seed);

}  // namespace obskernel
