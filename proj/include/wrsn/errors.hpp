#pragma once

#include <stdexcept>
#include <string>

namespace wrsn {

/// Argument outside the domain of a closed-form model (negative distance, speed).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range request at the environment boundary.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not allowed in the current episode state (e.g. step after done).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wrsn
