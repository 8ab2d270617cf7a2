#pragma once

#include <stdexcept>
#include <string>

namespace nlspin {

// Input outside an operation's mathematical domain (|z| >= 1, E out of band, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative kernel failed to converge within its cap.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request is valid input but outside the regime an asymptotic formula covers.
class OutOfRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlspin
