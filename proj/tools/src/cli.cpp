#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <set>

#include "config.hpp"
#include "obskernel/control.hpp"
#include "obskernel/syntax.hpp"
#include "obskernel/theorems.hpp"
#include "script.hpp"

namespace obskernel::cli {

namespace {

struct Flags {
  std::size_t budget = 0;
  double tol = 0;
  std::uint64_t seed = 0;
  std::string format = "text";
  bool trace = false;

  CLI::Option* budgetOpt = nullptr;
  CLI::Option* tolOpt = nullptr;
  CLI::Option* seedOpt = nullptr;

  Budgets budgets() const {
    Budgets b;
    if (*budgetOpt) b.steps = budget;
    if (*tolOpt) b.tolerance = tol;
    return b;
  }
};

/// Symbols in argument position; heads are functions, not variables.
void variables(const Expr& e, std::set<Expr, ExprLess>& out) {
  if (e.isSymbol()) {
    if (!e.isSymbol("Pi") && !e.isSymbol("E") && !e.isSymbol("True") && !e.isSymbol("False")) out.insert(e);
    return;
  }
  if (e.isAtom()) return;
  for (const auto& a : e.args()) variables(a, out);
}

/// Fewest significant digits whose value still satisfies |f| <= tol.
std::string certified(const RealFunction& f, double root, double tol) {
  for (int digits = 1; digits <= 17; ++digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, root);
    double v = std::strtod(buf, nullptr);
    if (std::fabs(f(v)) <= tol) return print(Expr::real(v));
  }
  return print(Expr::real(root));
}

int solve(const std::string& text, const std::vector<double>& bracket, const Flags& flags, std::ostream& out) {
  Expr e = parse(text);
  std::set<Expr, ExprLess> vars;
  variables(e, vars);
  if (vars.size() > 1) {
    std::string names;
    for (const auto& v : vars) names += " " + print(v);
    throw UsageError("solve expects one variable, found" + names);
  }
  Expr fn = vars.empty() ? call("Function", {e}) : call("Function", {*vars.begin(), e});
  Session s = defaultSession(flags.budgets());
  RealFunction f = numericFunction(s, fn);
  double tol = s.budgets().tolerance;
  DichotomyResult r = dichotomy(f, bracket[0], bracket[1], tol);
  out << certified(f, r.root, tol) << '\n';
  return 0;
}

int runScript(const std::string& path, const Flags& flags, std::ostream& out) {
  ScriptRunner runner(out, flags.budgets(), flags.trace);
  runner.runFile(path, [&](const std::string& r) { out << r << '\n'; });
  return 0;
}

int repl(const Flags& flags, std::istream& in, std::ostream& out, std::ostream& err) {
  ScriptRunner runner(out, flags.budgets(), flags.trace);
  std::string line;
  while (!runner.quit()) {
    out << "In: " << std::flush;
    if (!std::getline(in, line)) {
      out << '\n';
      break;
    }
    try {
      for (const auto& r : runner.execute(line)) out << "Out: " << r << '\n';
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    }
  }
  return 0;
}

int theorems(std::size_t environments, const Flags& flags, std::ostream& out) {
  SuiteReport report = runTheoremSuite(environments, *flags.seedOpt ? flags.seed : 1);
  out << "theorem suite: " << report.environments << " environments, seed " << report.seed << '\n';
  for (const auto& t : report.theorems) {
    out << "  " << t.name << ": " << t.checked - t.failed << "/" << t.checked << " hold\n";
    if (t.firstFailure)
      out << "    first failure " << print(t.firstFailure->lhs) << " vs " << print(t.firstFailure->rhs)
          << ", difference " << print(t.firstFailure->difference) << '\n';
  }
  out << (report.ok() ? "all theorems hold" : "FAILURES") << '\n';
  return report.ok() ? 0 : 1;
}

int experiment(const std::string& path, const Flags& flags, std::ostream& out) {
  ExperimentConfig config = ExperimentConfig::parse(readFile(path));
  RunOptions o;
  if (*flags.budgetOpt) o.budget = flags.budget;
  if (*flags.tolOpt) o.tolerance = flags.tol;
  if (*flags.seedOpt) o.seed = flags.seed;
  o.format = flags.format == "csv" ? Format::Csv : Format::Text;
  runExperimentConfig(config, o, out);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic rewriting kernel with an error calculus and an experiment layer", "obskernel"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  flags.budgetOpt = app.add_option("--budget", flags.budget, "Rewrite step budget")->check(CLI::PositiveNumber);
  flags.tolOpt = app.add_option("--tol", flags.tol, "Numeric tolerance")->check(CLI::PositiveNumber);
  flags.seedOpt = app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_flag("--trace", flags.trace, "Print each rewrite step");

  auto* replCmd = app.add_subcommand("repl", "Interactive session with In:/Out: prompts");

  std::string script;
  auto* runCmd = app.add_subcommand("run", "Run a script");
  runCmd->add_option("script", script, "Script file")->required();

  std::string expr;
  std::vector<double> bracket;
  auto* solveCmd = app.add_subcommand("solve", "Root of an expression in one variable by dichotomy");
  solveCmd->add_option("expr", expr, "Expression")->required();
  solveCmd->add_option("--bracket", bracket, "Interval ends a b")->expected(2)->required();

  std::string config;
  auto* expCmd = app.add_subcommand("experiment", "Run an experiment config");
  expCmd->add_option("config", config, "key = value file")->required();

  std::size_t environments = 1000;
  auto* thCmd = app.add_subcommand("theorems", "Check the error-calculus theorems in random environments");
  thCmd->add_option("--environments", environments, "Number of environments")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*replCmd) return repl(flags, in, out, err);
    if (*runCmd) return runScript(script, flags, out);
    if (*solveCmd) return solve(expr, bracket, flags, out);
    if (*expCmd) return experiment(config, flags, out);
    if (*thCmd) return theorems(environments, flags, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const FileError& e) {
    err << "file error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    out.flush();
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace obskernel::cli
