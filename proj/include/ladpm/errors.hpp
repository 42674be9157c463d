#pragma once

#include <stdexcept>
#include <string>

namespace ladpm {

// Invalid configuration or precondition violated by the caller. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A time or logSNR value outside the schedule's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure or a violated mathematical invariant. Maps to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A multistep sampler was asked to step without the history it needs.
class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Filesystem failure. Maps to exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ladpm
