// Error taxonomy shared across the library and the CLI exit-code mapping.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavecal {

/// Bad inputs: malformed model strings, invalid options, out-of-range flags.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model-string syntax error with the offending character position.
class ParseError : public UsageError {
  public:
    ParseError(const std::string& msg, std::size_t pos)
        : UsageError(msg + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t position() const { return pos_; }

  private:
    std::size_t pos_;
};

/// Problems with data files or signals (truncated files, short signals, NaNs).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failures: non-convergence, singular matrices, degenerate inputs.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace wavecal
