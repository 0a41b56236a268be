#include "obskernel/experiment.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "obskernel/canonical.hpp"
#include "obskernel/funalg.hpp"
#include "obskernel/match.hpp"
#include "obskernel/perturb.hpp"
#include "obskernel/syntax.hpp"

namespace obskernel {

namespace {

Expr evaluateObservable(Session& s, const Expr& e) {
  try {
    return s.evaluate(e);
  } catch (const BudgetExceeded&) {
    throw NotObservable(print(e) + " is not observable: budget exceeded", "budget");
  }
}

std::vector<double> components(const Expr& v, std::size_t n) {
  std::vector<Expr> items;
  if (v.hasHead("List")) {
    items.assign(v.args().begin(), v.args().end());
  } else {
    items.push_back(v);
  }
  if (items.size() != n)
    throw Error("experiment declared " + std::to_string(n) + " output(s) but produced " +
                std::to_string(items.size()));
  std::vector<double> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    try {
      out.push_back(numericValue(items[k]));
    } catch (const NotNumeric& e) {
      std::string reason = e.blocking().empty() ? "non-numeric normal form" : "free symbol";
      throw NotObservable("output component " + std::to_string(k + 1) + " (" + print(items[k]) +
                              ") is not observable: " + reason,
                          reason, e.blocking());
    }
  }
  return out;
}

bool isIdentityFunction(const Expr& p) {
  if (p.isSymbol("Identity")) return true;
  if (p.hasHead("Function", 1)) return p.arg(0) == call("Slot", {num(1)});
  if (p.hasHead("Function", 2)) return p.arg(0).isSymbol() && p.arg(1) == p.arg(0);
  return false;
}

bool sameCanonical(const Expr& a, const Expr& b) {
  return canonicalize(expand(plus({a, minus(b)}))) == Expr::integer(0);
}

}  // namespace

std::vector<double> runExperiment(Session& s, const Experiment& ex) {
  if (ex.system.inputs != 0)
    throw Error("system " + print(ex.system.tag) + " has inputs; sample it with runExperimentAt");
  return components(evaluateObservable(s, call(ex.property, {ex.system.realization})), ex.outputs);
}

std::vector<double> runExperimentAt(Session& s, const Experiment& ex, const std::vector<double>& z) {
  if (z.size() != ex.system.inputs)
    throw Error("system " + print(ex.system.tag) + " takes " + std::to_string(ex.system.inputs) +
                " input(s)");
  std::vector<Expr> args;
  for (double v : z) args.push_back(Expr::real(v));
  Expr state = call(ex.system.realization, std::move(args));
  return components(evaluateObservable(s, call(ex.property, {state})), ex.outputs);
}

Interpretation interpret(Session& s, const Experiment& ex, const Expr& P) {
  runExperiment(s, ex);
  Interpretation in;
  in.experiment = ex;
  in.experiment.property = canonicalize(call("Circle", {P, ex.property}));
  Expr value = evaluateObservable(s, call(P, {call(ex.property, {ex.system.realization})}));
  in.experiment.outputs = value.hasHead("List") ? value.size() : 1;
  in.output = components(value, in.experiment.outputs);
  in.tautologic = isIdentityFunction(P);
  // The composed property depends on T itself, not only through its argument.
  in.isPrivate = occurs(ex.system.tag, in.experiment.property);
  in.gauge = Gauge{P, ex.property};
  return in;
}

bool gaugeConsistent(Session& s, const Experiment& ex, const Gauge& g, double tol) {
  auto direct = runExperiment(s, ex);
  Expr viaGauge = evaluateObservable(s, call(g.gamma, {call(g.phi, {ex.system.realization})}));
  auto gauged = components(viaGauge, direct.size());
  for (std::size_t k = 0; k < direct.size(); ++k)
    if (std::fabs(direct[k] - gauged[k]) > tol) return false;
  return true;
}

CurrentReport currentExample(Session& s, const Expr& r, const Expr& i) {
  const Expr slot = call("Slot", {num(1)});
  Experiment ex{call("Function", {times({r, power(slot, num(2))})}), {sym("i"), 0, i}, 1};
  CurrentReport rep;
  rep.observed = runExperiment(s, ex).front();
  Expr root = call("Function", {power(times({power(r, num(-1)), slot}), Expr::rational(1, 2))});
  rep.interpreted = interpret(s, ex, root).output.front();
  rep.signLost = rep.interpreted != numericValue(s.evaluate(i));
  try {
    interpret(s, ex, call("Function", {times({power(sym("k"), num(-1)), slot})}));
  } catch (const NotObservable& e) {
    rep.kFailure = e.what();
    rep.kBlocking = e.blocking();
  }
  return rep;
}

void Estimate::add(double x) {
  ++samples;
  double delta = x - value;
  value += delta / static_cast<double>(samples);
  m2 += delta * (x - value);
}

double Estimate::variance() const {
  return samples < 2 ? 0.0 : m2 / static_cast<double>(samples - 1);
}

double Estimate::standardError() const {
  if (samples < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(variance() / static_cast<double>(samples));
}

ProgramResult runProgram(const ExperimentalProgram& prog) {
  std::mt19937_64 rng(prog.seed);
  ProgramResult res;
  res.seed = prog.seed;
  res.trace.push_back(prog.initial);
  std::size_t t = 0;
  while (!prog.test(t, res.trace.back())) {
    if (t >= prog.maxSteps)
      throw MaxSteps("no test passed within " + std::to_string(prog.maxSteps) + " steps",
                     std::move(res.trace));
    ++t;
    res.trace.push_back(prog.step(t, res.trace.back(), rng));
  }
  res.t = t;
  res.estimate = res.trace.back();
  return res;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ExperimentalProgram monteCarloMean(std::function<double(std::mt19937_64&)> source, std::uint64_t seed,
                                   double target, std::size_t minSamples, std::size_t maxSteps) {
  ExperimentalProgram p;
  p.seed = seed;
  p.maxSteps = maxSteps;
  p.step = [source = std::move(source)](std::size_t, const Estimate& prev, std::mt19937_64& rng) {
    Estimate next = prev;
    next.add(source(rng));
    return next;
  };
  p.test = [target, minSamples](std::size_t, const Estimate& e) {
    return e.samples >= std::max<std::size_t>(minSamples, 2) && e.standardError() < target;
  };
  return p;
}

ErrorDecomposition errorDecomposition(double sigmaT, double sigmaTstar, double sigmaStarTstar) {
  Exact a = arith::exactFromDouble(sigmaT);
  Exact b = arith::exactFromDouble(sigmaTstar);
  Exact c = arith::exactFromDouble(sigmaStarTstar);
  return ErrorDecomposition{c - a, b - a, c - b};
}

ErrorDecomposition errorDecomposition(Session& s, const Expr& sigma, const Expr& sigmaStar,
                                      const Expr& T, const Expr& Tstar) {
  auto value = [&](const Expr& f, const Expr& x) {
    return numericValue(evaluateObservable(s, call(f, {x})));
  };
  return errorDecomposition(value(sigma, T), value(sigma, Tstar), value(sigmaStar, Tstar));
}

SeriesFit fitResponseSeries(const std::vector<std::pair<double, double>>& samples, std::size_t order,
                            double tol) {
  std::vector<double> eps;
  for (const auto& [e, _] : samples) eps.push_back(e);
  std::sort(eps.begin(), eps.end());
  auto distinct = static_cast<std::size_t>(std::unique(eps.begin(), eps.end()) - eps.begin());
  if (distinct < order + 1)
    throw DegenerateFit(std::to_string(distinct) + " distinct sample(s) cannot determine " +
                        std::to_string(order + 1) + " coefficients");

  const auto rows = static_cast<Eigen::Index>(samples.size());
  const auto cols = static_cast<Eigen::Index>(order + 1);
  Eigen::MatrixXd V(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double e = samples[static_cast<std::size_t>(i)].first, p = 1;
    for (Eigen::Index j = 0; j < cols; ++j, p *= e) V(i, j) = p;
    y(i) = samples[static_cast<std::size_t>(i)].second;
  }
  Eigen::VectorXd scale = V.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (scale(j) == 0) throw DegenerateFit("zero column in the sample matrix");
    V.col(j) /= scale(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  if (qr.rank() < cols) throw DegenerateFit("rank-deficient sample matrix");
  Eigen::VectorXd r = qr.solve(y).cwiseQuotient(scale);

  SeriesFit fit;
  for (Eigen::Index j = 0; j < cols; ++j) fit.coefficients.push_back(r(j) == 0 ? 0.0 : r(j));
  auto ratio = [&](std::size_t num, std::size_t den) -> std::optional<double> {
    if (num > order || std::fabs(fit.coefficients[den]) < tol) return std::nullopt;
    double v = fit.coefficients[num] / fit.coefficients[den];
    return v == 0 ? 0.0 : v;
  };
  fit.signalToNoise = ratio(1, 0);
  fit.shielding = ratio(2, 1);
  return fit;
}

Expr derivative(const Expr& e, const Expr& var) {
  if (e == var) return num(1);
  if (!occurs(var, e)) return num(0);
  if (e.hasHead("Plus")) {
    std::vector<Expr> terms;
    for (const auto& a : e.args()) terms.push_back(derivative(a, var));
    return plus(std::move(terms));
  }
  if (e.hasHead("Times")) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < e.size(); ++i) {
      std::vector<Expr> factors(e.args().begin(), e.args().end());
      factors[i] = derivative(e.arg(i), var);
      terms.push_back(times(std::move(factors)));
    }
    return plus(std::move(terms));
  }
  if (e.hasHead("Power", 2) && !occurs(var, e.arg(1))) {
    const Expr& b = e.arg(0);
    const Expr& n = e.arg(1);
    return times({n, power(b, plus({n, num(-1)})), derivative(b, var)});
  }
  if (e.isCompound() && e.size() == 1 && !occurs(var, e.head())) {
    return call(call(call("d", {e.head()}), {e.arg(0)}), {derivative(e.arg(0), var)});
  }
  throw Error("no derivative rule for " + print(e));
}

LinearGaugeReport linearGaugeScenario(const Session& base, const Expr& eps) {
  Session s = base;
  s.install(funalgPack());
  s.install(perturbPack());
  s.install(linearPack("Reals"));
  const Expr e = sym("eps"), T = sym("T"), sigma = sym("sigma"), Phi = sym("Phi");
  s.assertFact(element(sigma, call("LFs", {sym("Reals")})));
  s.assertFact(element(sigma, sym("Cst")));
  s.assertFact(element(T, sym("Uns")));
  s.assertFact(element(e, sym("Reals")));
  s.addRule(parse("sigma[Delta[T]] -> -sigma[T]"));

  auto at = [&](const Expr& x) { return s.evaluate(replaceAll(x, e, eps)); };
  const Expr sigmaT = call(sigma, {T});
  const Expr Tstar = call("Star", {e, T});
  const Expr oneMinus = plus({num(1), minus(e)});

  LinearGaugeReport rep;
  Expr sigmaStar = s.evaluate(call(sigma, {Tstar}));
  rep.sigmaStar = at(sigmaStar);
  rep.sigmaForm = sameCanonical(rep.sigmaStar, at(times({sigmaT, oneMinus})));

  Expr response = s.evaluate(times({call(sigma, {Tstar}), call(Phi, {Tstar})}));
  rep.response = at(response);
  rep.responseForm =
      sameCanonical(rep.response, at(times({sigmaT, call(Phi, {Tstar}), oneMinus})));

  const Expr dPhi = call(call(call("d", {Phi}), {T}), {call("Delta", {T})});
  rep.derivative = s.evaluate(replaceAll(s.evaluate(derivative(response, e)), e, num(0)));
  rep.derivativeForm =
      sameCanonical(rep.derivative, s.evaluate(times({sigmaT, plus({dPhi, minus(call(Phi, {T}))})})));

  Expr withoutFlux = s.evaluate(replaceAll(rep.derivative, dPhi, num(0)));
  Expr P = call("Function", {times({num(-1), power(call(Phi, {T}), num(-1)), call("Slot", {num(1)})})});
  rep.interpreted = s.evaluate(call(P, {withoutFlux}));
  rep.interpretationHolds = sameCanonical(rep.interpreted, sigmaT);
  return rep;
}

NoiseSummary noisyEvaluate(const RealFunction& f, double x, double amplitude, std::size_t samples,
                           std::uint64_t seed) {
  if (samples == 0) throw Error("noisyEvaluate needs at least one sample");
  if (amplitude < 0) throw Error("noise amplitude must be non-negative");
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  values.reserve(samples);
  Estimate est;
  double base = f(x);
  for (std::size_t k = 0; k < samples; ++k) {
    double v = base + (2 * uniform01(rng) - 1) * amplitude;
    values.push_back(v);
    est.add(v);
  }
  NoiseSummary sum;
  sum.mean = est.value;
  sum.sd = std::sqrt(est.variance());
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  sum.min = *lo;
  sum.max = *hi;
  constexpr std::size_t kBins = 20;
  sum.histogram.assign(kBins, 0);
  double width = (sum.max - sum.min) / kBins;
  for (double v : values) {
    std::size_t bin = width > 0 ? static_cast<std::size_t>((v - sum.min) / width) : 0;
    ++sum.histogram[std::min(bin, kBins - 1)];
  }
  return sum;
}

}  // namespace obskernel
