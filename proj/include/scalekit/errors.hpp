#pragma once

#include <stdexcept>
#include <string>

namespace scalekit {

struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// non-finite evaluation, failed numeric search, or an unsupported law shape
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InfeasibleError : ArgumentError {
  explicit InfeasibleError(const std::string& msg) : ArgumentError(msg) {}
};

}  // namespace scalekit
