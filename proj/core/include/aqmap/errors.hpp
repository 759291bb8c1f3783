#pragma once

#include <stdexcept>
#include <string>

namespace aqmap {

enum class ErrorKind {
  input,            // bad files, malformed arguments
  infeasible,       // battery budget cannot cover the request
  numerical_guard,  // a convexity or conditioning guard refused the operation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

class GuardViolation : public Error {
 public:
  explicit GuardViolation(const std::string& what) : Error(ErrorKind::numerical_guard, what) {}
};

/// Process exit code used by the command-line tool for each error kind.
constexpr int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input: return 2;
    case ErrorKind::infeasible: return 3;
    case ErrorKind::numerical_guard: return 4;
  }
  return 1;
}

}  // namespace aqmap
