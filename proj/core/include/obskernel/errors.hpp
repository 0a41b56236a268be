#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "obskernel/expr.hpp"

namespace obskernel {

/// Base of every error raised by the kernel.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Byte offsets into parsed text, [start, end).
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span)
      : Error(message + " at " + std::to_string(span.start)), span_(span) {}
  SourceSpan span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Raised when a pattern expression cannot be compiled (e.g. an unknown blank type).
class PatternError : public Error {
 public:
  using Error::Error;
};

/// Evaluation ran out of steps or recursion depth. Carries the expression as far
/// as it was rewritten when the budget ran out.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, Expr partial)
      : Error(what), partial_(std::move(partial)) {}
  const Expr& partial() const { return partial_; }
  void setPartial(Expr partial) { partial_ = std::move(partial); }

 private:
  Expr partial_;
};

class NotNumeric : public Error {
 public:
  NotNumeric(const std::string& what, std::vector<Expr> blocking)
      : Error(what), blocking_(std::move(blocking)) {}
  const std::vector<Expr>& blocking() const { return blocking_; }

 private:
  std::vector<Expr> blocking_;
};

/// A material property could not be calculated: which component and why.
class NotObservable : public Error {
 public:
  NotObservable(const std::string& what, std::string reason, std::vector<Expr> blocking = {})
      : Error(what), reason_(std::move(reason)), blocking_(std::move(blocking)) {}
  const std::string& reason() const { return reason_; }
  const std::vector<Expr>& blocking() const { return blocking_; }

 private:
  std::string reason_;
  std::vector<Expr> blocking_;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

}  // namespace obskernel
