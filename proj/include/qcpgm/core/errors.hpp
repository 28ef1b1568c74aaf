#pragma once

#include <stdexcept>
#include <string>

namespace qcpgm::core {

/// Invalid configuration document or parameter set. CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File or stream failure. CLI maps this to exit 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate numeric situation (zero denominator, undefined metric).
/// CLI maps this to exit 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qcpgm::core
