#pragma once

#include <stdexcept>
#include <string>

namespace rprobe {

// Domain errors: bad arguments, malformed files, undecidable traces.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a quantum verdict disagrees with the classical oracle.
struct OracleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resource and numeric errors map to a different CLI exit code.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace rprobe
