#pragma once

#include <stdexcept>
#include <string>

namespace mallows {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAPermutation : Error { using Error::Error; };
struct RangeViolation : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct OutOfHorizon : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace mallows
