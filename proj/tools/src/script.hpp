#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "obskernel/errors.hpp"
#include "obskernel/session.hpp"

namespace obskernel::cli {

/// A script or config file that cannot be read.
class FileError : public Error {
 public:
  using Error::Error;
};

/// A directive or argument the runner does not understand.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The session every subcommand starts from: funalg then perturb.
Session defaultSession(const Budgets& budgets);

std::string readFile(const std::filesystem::path& path);

/// Line-oriented statement runner shared by `run` and `repl`.
///
/// A line holds statements separated by `;`; `//` starts a comment. A top-level
/// rule installs a user rule, a trailing `!` asserts, anything else is evaluated.
/// Lines starting with `:` are directives: `:budget N`, `:tol X`, `:load path`,
/// `:pack name [field]`, `:reset`, `:quit`.
class ScriptRunner {
 public:
  ScriptRunner(std::ostream& traceOut, Budgets budgets, bool trace);

  /// Results of the statements on one line, printed forms in order.
  std::vector<std::string> execute(std::string_view line);

  /// Runs every line of a file; `emit` receives each result.
  void runFile(const std::filesystem::path& path, const std::function<void(const std::string&)>& emit);

  bool quit() const { return quit_; }
  Session& session() { return session_; }
  void reset();

 private:
  std::vector<std::string> directive(std::string_view line);
  void installTrace();

  std::ostream& traceOut_;
  Budgets budgets_;
  bool trace_;
  Session session_;
  bool quit_ = false;
};

}  // namespace obskernel::cli
