#pragma once

#include <stdexcept>
#include <string>

namespace steinlab {

// Dimension/memory budget exceeded (CLI exit code 3).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical precondition violated: non-Hermitian input, negative spectrum
// where PSD is required, failed convergence (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steinlab
