#include "config.hpp"

#include <ostream>
#include <set>
#include <sstream>

#include "obskernel/control.hpp"
#include "obskernel/experiment.hpp"
#include "obskernel/syntax.hpp"
#include "script.hpp"

namespace obskernel::cli {

namespace {

const std::set<std::string>& knownKeys() {
  static const std::set<std::string> keys{
      "setup",           "tag",           "system",         "inputs",          "property",
      "outputs",         "at",            "interpretation", "gamma",           "phi",
      "program",         "program.source", "program.target", "program.min_samples",
      "program.max_steps", "series.response", "series.samples", "series.order", "noise.function",
      "noise.x",         "noise.amplitude", "noise.samples", "seed",            "budget",
      "tol"};
  return keys;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) { return print(Expr::real(v)); }

double toDouble(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError(key + " expects a number, got '" + v + "'");
}

std::uint64_t toCount(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    unsigned long long n = std::stoull(v, &used);
    if (used == v.size() && v.front() != '-') return n;
  } catch (const std::exception&) {
  }
  throw UsageError(key + " expects a non-negative integer, got '" + v + "'");
}

std::vector<double> toList(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(toDouble(key, trim(item)));
  return out;
}

std::string joined(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + num(xs[i]);
  return s;
}

std::string yesNo(bool b) { return b ? "yes" : "no"; }

struct Report {
  std::ostream& out;
  Format format;
  bool firstTable = true;

  void line(const std::string& s) {
    if (format == Format::Text) out << s << '\n';
  }
  void table(const std::string& header) {
    if (format != Format::Csv) return;
    if (!firstTable) out << '\n';
    firstTable = false;
    out << header << '\n';
  }
  void row(const std::string& s) {
    if (format == Format::Csv) out << s << '\n';
  }
};

void staticSection(Session& s, const ExperimentConfig& c, Report& r) {
  Experiment ex;
  ex.property = parse(c.get("property"));
  ex.system.tag = parse(c.get("tag", "T"));
  ex.system.inputs = toCount("inputs", c.get("inputs", "0"));
  ex.system.realization = parse(c.get("system"));
  ex.outputs = toCount("outputs", c.get("outputs", "1"));

  std::vector<double> output;
  if (ex.system.inputs == 0) {
    output = runExperiment(s, ex);
  } else {
    if (!c.has("at")) throw UsageError("a system with inputs needs `at`");
    output = runExperimentAt(s, ex, toList("at", c.get("at")));
  }
  r.line("experiment {" + print(ex.property) + ", " + print(ex.system.tag) + "}");
  r.line("output " + joined(output));
  r.table("component,value");
  for (std::size_t i = 0; i < output.size(); ++i) r.row(std::to_string(i + 1) + "," + num(output[i]));

  if (c.has("interpretation") && ex.system.inputs == 0) {
    Interpretation in = interpret(s, ex, parse(c.get("interpretation")));
    r.line("interpretation " + print(in.experiment.property) + " -> " + joined(in.output));
    r.line("  tautologic " + yesNo(in.tautologic) + ", private " + yesNo(in.isPrivate));
  }
  if (c.has("gamma") || c.has("phi")) {
    if (!c.has("gamma") || !c.has("phi")) throw UsageError("a gauge needs both gamma and phi");
    Gauge g{parse(c.get("gamma")), parse(c.get("phi"))};
    r.line("gauge consistent " + yesNo(gaugeConsistent(s, ex, g)));
  }
}

void programSection(Session& s, const ExperimentConfig& c, std::uint64_t seed, Report& r) {
  if (c.get("program") != "montecarlo")
    throw UsageError("unknown program '" + c.get("program") + "' (montecarlo)");
  RealFunction source = numericFunction(s, parse(c.get("program.source", "#&")));
  ExperimentalProgram p = monteCarloMean([&](std::mt19937_64& rng) { return source(uniform01(rng)); }, seed,
                                         toDouble("program.target", c.get("program.target", "0.01")),
                                         toCount("program.min_samples", c.get("program.min_samples", "30")),
                                         toCount("program.max_steps", c.get("program.max_steps", "100000")));
  ProgramResult res = runProgram(p);
  r.line("program montecarlo seed " + std::to_string(res.seed));
  r.line("  t " + std::to_string(res.t) + ", estimate " + num(res.estimate.value) + ", standard error " +
         num(res.estimate.standardError()) + ", trace length " + std::to_string(res.trace.size()));
  r.table("t,estimate,samples");
  for (std::size_t t = 0; t < res.trace.size(); ++t)
    r.row(std::to_string(t) + "," + num(res.trace[t].value) + "," + std::to_string(res.trace[t].samples));
}

void seriesSection(Session& s, const ExperimentConfig& c, Report& r) {
  RealFunction response = numericFunction(s, parse(c.get("series.response")));
  std::vector<std::pair<double, double>> samples;
  for (double e : toList("series.samples", c.get("series.samples", "0, 0.25, 0.5, 0.75, 1")))
    samples.emplace_back(e, response(e));
  std::size_t order = toCount("series.order", c.get("series.order", "2"));
  SeriesFit fit = fitResponseSeries(samples, order);
  std::string coeffs;
  for (std::size_t t = 0; t < fit.coefficients.size(); ++t)
    coeffs += (t ? ", " : "") + std::string("r") + std::to_string(t) + " " + num(fit.coefficients[t]);
  r.line("series " + coeffs);
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("undefined"); };
  r.line("  signal/noise " + opt(fit.signalToNoise) + ", shielding " + opt(fit.shielding));
  r.table("eps,response,fitted");
  for (const auto& [e, v] : samples) {
    double f = 0, p = 1;
    for (double k : fit.coefficients) {
      f += k * p;
      p *= e;
    }
    r.row(num(e) + "," + num(v) + "," + num(f));
  }
}

void noiseSection(Session& s, const ExperimentConfig& c, std::uint64_t seed, Report& r) {
  RealFunction f = numericFunction(s, parse(c.get("noise.function")));
  NoiseSummary n = noisyEvaluate(f, toDouble("noise.x", c.get("noise.x", "0")),
                                 toDouble("noise.amplitude", c.get("noise.amplitude", "0")),
                                 toCount("noise.samples", c.get("noise.samples", "1000")), seed);
  r.line("noise mean " + num(n.mean) + ", sd " + num(n.sd) + ", min " + num(n.min) + ", max " + num(n.max));
  std::string h;
  for (std::size_t b = 0; b < n.histogram.size(); ++b) h += (b ? " " : "") + std::to_string(n.histogram[b]);
  r.line("  histogram " + h);
  r.table("bin,count");
  for (std::size_t b = 0; b < n.histogram.size(); ++b)
    r.row(std::to_string(b) + "," + std::to_string(n.histogram[b]));
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("line " + std::to_string(number) + ": expected key = value");
    std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (!knownKeys().count(key))
      throw UsageError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    c.values[key] = value;
  }
  return c;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

void runExperimentConfig(const ExperimentConfig& c, const RunOptions& o, std::ostream& out) {
  Budgets b;
  if (c.has("budget")) b.steps = toCount("budget", c.get("budget"));
  if (c.has("tol")) b.tolerance = toDouble("tol", c.get("tol"));
  if (o.budget) b.steps = *o.budget;
  if (o.tolerance) b.tolerance = *o.tolerance;
  std::uint64_t seed = o.seed ? *o.seed : toCount("seed", c.get("seed", "0"));

  Session s = defaultSession(b);
  if (c.has("setup")) {
    for (const Expr& stmt : parseStatements(c.get("setup"))) {
      if (stmt.hasHead("Rule", 2) || stmt.hasHead("RuleDelayed", 2))
        s.addRule(stmt);
      else
        s.evaluate(stmt);
    }
  }

  Report r{out, o.format};
  bool any = false;
  if (c.has("property") || c.has("system")) {
    if (!c.has("property") || !c.has("system")) throw UsageError("an experiment needs property and system");
    staticSection(s, c, r);
    any = true;
  }
  if (c.has("program")) {
    programSection(s, c, seed, r);
    any = true;
  }
  if (c.has("series.response")) {
    seriesSection(s, c, r);
    any = true;
  }
  if (c.has("noise.function")) {
    noiseSection(s, c, seed, r);
    any = true;
  }
  if (!any) throw UsageError("the config names no experiment, program, series or noise section");
}

}  // namespace obskernel::cli
