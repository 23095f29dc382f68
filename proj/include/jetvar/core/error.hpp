#pragma once

#include <stdexcept>
#include <string>

namespace jetvar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A symbol was referenced that the ambient bundle does not declare.
class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(const std::string& name)
      : Error("unknown symbol '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Numeric evaluation hit an unbound symbol or left the domain of a function.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public EvaluationError {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : EvaluationError(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Jet order exceeded, vertical derivative applied twice, malformed bundle.
class JetError : public Error {
 public:
  using Error::Error;
};

/// A system could not be brought into explicit first-order form.
class CompileError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Model text could not be parsed; carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(format(message, line, column)), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }
  int line_;
  int column_;
};

}  // namespace jetvar
