#pragma once

#include <stdexcept>
#include <string>

namespace ssa {

enum class ErrorKind {
  invalid_config,
  invalid_argument,
  domain_error,
  insufficient_samples,
  degenerate_distribution,
  empty_distribution,
  capacity,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::insufficient_samples: return "insufficient-samples";
    case ErrorKind::degenerate_distribution: return "degenerate-distribution";
    case ErrorKind::empty_distribution: return "empty-distribution";
    case ErrorKind::capacity: return "capacity";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace detail
}  // namespace ssa
