#pragma once

#include <stdexcept>
#include <string>

namespace qst {

// Raised when an iterative routine fails (no convergence, step underflow).
// Input validation problems use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qst
