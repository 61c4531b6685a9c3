#pragma once

#include <stdexcept>
#include <string>

namespace slschro {

/// A run could not proceed because the measurement left the torus validity window.
class ValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values appeared during integration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity only exists on the periodic box (e.g. L^r norms of a constant).
class TorusOnlyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace slschro
