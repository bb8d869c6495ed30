#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tierplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the source location of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed PDDL that uses a construct outside the supported subset.
class UnsupportedConstruct : public ParseError {
 public:
  UnsupportedConstruct(std::string file, std::size_t line, std::size_t column,
                       const std::string& construct)
      : ParseError(std::move(file), line, column, "unsupported construct '" + construct + "'"),
        construct_(construct) {}

  const std::string& construct() const noexcept { return construct_; }

 private:
  std::string construct_;
};

class UnknownOperator : public Error {
 public:
  explicit UnknownOperator(const std::string& name) : Error("unknown operator '" + name + "'") {}
};

class PreconditionViolated : public Error {
 public:
  PreconditionViolated(const std::string& op, const std::string& conjunct)
      : Error("precondition of '" + op + "' violated: " + conjunct), op_(op), conjunct_(conjunct) {}

  const std::string& op() const noexcept { return op_; }
  const std::string& conjunct() const noexcept { return conjunct_; }

 private:
  std::string op_;
  std::string conjunct_;
};

/// The explicit state space outgrew the configured node cap.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(std::size_t cap)
      : Error("state-space budget of " + std::to_string(cap) + " nodes exceeded"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// A transition that no tier of the problem admits.
class EscapesAllTiers : public Error {
 public:
  using Error::Error;
};

}  // namespace tierplan
