#pragma once

#include <stdexcept>
#include <string>

namespace oct {

/// Process exit codes used by the command-line tool. Every library error maps
/// onto one of these through Error::exit_code().
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  input = 3,
  infeasible = 4,
  numerical = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode exit_code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad arguments or command usage.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

// Malformed input files or parameters violating their invariants.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::input, what) {}
};

// No admissible depth path / design violates a physical constraint.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ExitCode::infeasible, what) {}
};

// Singular matrices, gimbal lock, non-finite results.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

}  // namespace oct
