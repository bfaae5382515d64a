#pragma once

// Shared test helpers: a tiny deterministic RNG (so property tests are
// reproducible) and an independent naive point counter used as the oracle
// against the character-sum path.

#include <cstdint>

#include "lamvar/curves.hpp"

namespace lamvar_test {

// xorshift64*; fixed seeds keep failures replayable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Oracle: projective point count done the slow, obviously-correct way:
// enumerate every affine (x, y) against the long Weierstrass equation and add
// the point at infinity. Deliberately independent of lamvar::count_ap.
inline long long ap_oracle(const lamvar::WeierstrassCurve& curve, long long ell) {
  long long points = 1; // [0 : 1 : 0]
  auto mod = [ell](long long v) { return ((v % ell) + ell) % ell; };
  for (long long x = 0; x < ell; ++x) {
    for (long long y = 0; y < ell; ++y) {
      long long lhs = y * y + curve.a1 * x % ell * y + curve.a3 * y;
      long long rhs = x * x * x % ell + curve.a2 * x % ell * x + curve.a4 * x + curve.a6;
      if (mod(lhs) == mod(rhs)) ++points;
    }
  }
  return ell + 1 - points;
}

} // namespace lamvar_test
