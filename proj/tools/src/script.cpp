#include "script.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "obskernel/funalg.hpp"
#include "obskernel/perturb.hpp"
#include "obskernel/syntax.hpp"

namespace obskernel::cli {

Session defaultSession(const Budgets& budgets) {
  Session s(budgets);
  s.install(funalgPack());
  s.install(perturbPack());
  return s;
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view stripComment(std::string_view s) {
  auto c = s.find("//");
  return c == std::string_view::npos ? s : s.substr(0, c);
}

Pack packByName(const std::string& name, const std::string& field) {
  if (name == "funalg") return funalgPack(field.empty() ? "K" : field);
  if (name == "linear") return linearPack(field.empty() ? "K" : field);
  if (name == "perturb") return perturbPack();
  if (name == "expand") return expandPack();
  if (name == "definitions") return definitionsPack();
  throw UsageError("unknown pack '" + name + "' (funalg, linear, perturb, expand, definitions)");
}

}  // namespace

ScriptRunner::ScriptRunner(std::ostream& traceOut, Budgets budgets, bool trace)
    : traceOut_(traceOut), budgets_(budgets), trace_(trace), session_(defaultSession(budgets)) {
  installTrace();
}

void ScriptRunner::installTrace() {
  if (!trace_) return;
  session_.setTrace([this](const Expr& before, const Expr& after, const std::string& rule) {
    traceOut_ << "  [" << rule << "] " << print(before) << " -> " << print(after) << '\n';
  });
}

void ScriptRunner::reset() {
  session_ = defaultSession(budgets_);
  installTrace();
}

std::vector<std::string> ScriptRunner::execute(std::string_view line) {
  line = trim(stripComment(line));
  if (line.empty()) return {};
  if (line.front() == ':') return directive(line.substr(1));
  std::vector<std::string> out;
  for (const Expr& stmt : parseStatements(line)) {
    if (stmt.hasHead("Rule", 2) || stmt.hasHead("RuleDelayed", 2)) {
      session_.addRule(stmt);
      out.push_back(print(stmt));
    } else {
      out.push_back(print(session_.evaluate(stmt)));
    }
  }
  return out;
}

std::vector<std::string> ScriptRunner::directive(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string name, arg, extra;
  in >> name >> arg >> extra;
  auto need = [&] {
    if (arg.empty()) throw UsageError(":" + name + " needs an argument");
  };
  if (name == "quit" || name == "q") {
    quit_ = true;
    return {};
  }
  if (name == "reset") {
    reset();
    return {"session reset"};
  }
  if (name == "budget") {
    need();
    long long n = 0;
    try {
      n = std::stoll(arg);
    } catch (const std::exception&) {
      throw UsageError(":budget expects a positive integer");
    }
    if (n <= 0) throw UsageError(":budget expects a positive integer");
    budgets_.steps = static_cast<std::size_t>(n);
    session_.budgets().steps = budgets_.steps;
    return {"budget " + std::to_string(n)};
  }
  if (name == "tol") {
    need();
    double t = 0;
    try {
      t = std::stod(arg);
    } catch (const std::exception&) {
      throw UsageError(":tol expects a positive number");
    }
    if (!(t > 0)) throw UsageError(":tol expects a positive number");
    budgets_.tolerance = t;
    session_.budgets().tolerance = t;
    return {"tol " + print(Expr::real(t))};
  }
  if (name == "pack") {
    need();
    Pack p = packByName(arg, extra);
    session_.install(p);
    return {"pack " + p.name};
  }
  if (name == "load") {
    need();
    std::vector<std::string> out;
    runFile(arg, [&](const std::string& s) { out.push_back(s); });
    return out;
  }
  throw UsageError("unknown directive :" + name);
}

void ScriptRunner::runFile(const std::filesystem::path& path,
                           const std::function<void(const std::string&)>& emit) {
  std::istringstream in(readFile(path));
  std::string line;
  std::size_t number = 0;
  while (!quit_ && std::getline(in, line)) {
    ++number;
    try {
      for (const auto& r : execute(line)) emit(r);
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

}  // namespace obskernel::cli
