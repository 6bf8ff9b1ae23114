#ifndef DASHAPP_ERRORS_HPP
#define DASHAPP_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dashapp {

// Invalid construction arguments or out-of-range inputs.
class InvalidArgumentError : public std::invalid_argument {
 public:
  explicit InvalidArgumentError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Vector/matrix dimension disagreement.
class DimensionError : public InvalidArgumentError {
 public:
  DimensionError(const std::string& where, long expected, long got)
      : InvalidArgumentError(where + ": expected dimension " +
                             std::to_string(expected) + ", got " +
                             std::to_string(got)) {}
};

// Text-input parse failure; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(long line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// A state vector became non-finite during optimization.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t round, const std::string& what)
      : std::runtime_error("diverged at round " + std::to_string(round) +
                           ": " + what),
        round_(round) {}
  std::int64_t round() const { return round_; }

 private:
  std::int64_t round_;
};

// Problem size exceeds an exact-enumeration guard.
class EnumerationLimitError : public InvalidArgumentError {
 public:
  explicit EnumerationLimitError(const std::string& what)
      : InvalidArgumentError(what) {}
};

}  // namespace dashapp

#endif
