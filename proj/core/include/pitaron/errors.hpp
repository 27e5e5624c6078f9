#pragma once

#include <stdexcept>
#include <string>

namespace pitaron {

// Raised when a numerical precondition fails at runtime: ill-conditioned
// propagators, matrices that are not positive (semi)definite, non-finite
// samples, eigensolver breakdown. Bad arguments (wrong sizes, unsorted
// times) throw std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pitaron
