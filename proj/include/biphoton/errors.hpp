#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace biphoton {

/// Invalid arguments, states, or input documents. The CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: no convergence, rank deficiency, no bracket. CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document; remembers the offending line (1-based).
class parse_error : public validation_error {
public:
  parse_error(const std::string& msg, std::size_t line)
      : validation_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace biphoton
