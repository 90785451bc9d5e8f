#pragma once

#include <stdexcept>
#include <string>

namespace oscar {

// Argument outside the mathematical domain of a model function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A route edge has no channel count in the allocation being evaluated.
class MissingAllocationError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Even the all-ones allocation violates a capacity or budget constraint.
class InfeasibleSelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oscar
