#pragma once

/**
 * @file errors.hpp
 * @brief Exception types shared across the library.
 */

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lamvar {

/// A coefficient table lacks an entry for a prime the analysis needs.
class MissingCoefficient : public std::runtime_error {
 public:
  explicit MissingCoefficient(std::uint64_t ell)
      : std::runtime_error("missing Fourier coefficient for ell = " + std::to_string(ell) +
                           "; extend the coefficient table"),
        ell_(ell) {}

  std::uint64_t ell() const { return ell_; }

 private:
  std::uint64_t ell_;
};

/// The lambda-transfer identity produced a negative invariant: the inputs are inconsistent.
class NegativeLambda : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A theorem-level hypothesis required by the requested computation does not hold.
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact closed-form cross-check failed; the enumeration and the formula disagree.
class CheckFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

} // namespace lamvar
