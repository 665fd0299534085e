#pragma once

#include <stdexcept>
#include <string>

namespace biosec {

/// Argument outside the mathematical domain of a function (e.g. log1p(x) with x <= -1).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A model precondition does not hold; the message names the condition.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace biosec
