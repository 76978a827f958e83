#pragma once

#include <stdexcept>
#include <string>

namespace tcpfluid {

// Invalid parameter or input outside the model's domain.  CLI maps this to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iteration failed to converge or a computation left the representable range.
// CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario/configuration input.  CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tcpfluid
