#pragma once

/**
 * @file primes.hpp
 * @brief Primality testing and bulk prime generation (segmented sieve).
 */

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lamvar {

inline constexpr std::uint32_t kMaxFieldModulus = (1u << 31) - 1;

/// Deterministic trial-division primality test; intended for desk-scale n.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// All primes ell < x, ascending. Segmented sieve of Eratosthenes.
inline std::vector<std::uint32_t> primes_below(std::uint64_t x) {
  std::vector<std::uint32_t> out;
  if (x <= 2) return out;
  if (x > (std::uint64_t(1) << 32)) throw std::invalid_argument("primes_below: bound exceeds 2^32");

  // Base primes up to sqrt(x).
  std::uint64_t root = 2;
  while (root * root < x) ++root; // smallest root with root^2 >= x
  std::vector<std::uint8_t> base(root + 1, 1);
  base[0] = base[1] = 0;
  for (std::uint64_t i = 2; i * i <= root; ++i) {
    if (!base[i]) continue;
    for (std::uint64_t j = i * i; j <= root; j += i) base[j] = 0;
  }
  std::vector<std::uint32_t> base_primes;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (base[i]) base_primes.push_back(static_cast<std::uint32_t>(i));
  }
  for (std::uint32_t p : base_primes) {
    if (p < x) out.push_back(p);
  }

  constexpr std::uint64_t kSegment = 1 << 16;
  std::vector<std::uint8_t> seg(kSegment);
  for (std::uint64_t low = root + 1; low < x; low += kSegment) {
    const std::uint64_t high = std::min(low + kSegment, x);
    std::fill(seg.begin(), seg.end(), 1);
    for (std::uint32_t p : base_primes) {
      std::uint64_t start = ((low + p - 1) / p) * p;
      if (start < std::uint64_t(p) * p) start = std::uint64_t(p) * p;
      for (std::uint64_t j = start; j < high; j += p) seg[j - low] = 0;
    }
    for (std::uint64_t n = low; n < high; ++n) {
      if (seg[n - low]) out.push_back(static_cast<std::uint32_t>(n));
    }
  }
  return out;
}

/// pi(x) in the strict sense used throughout: the number of primes ell < x.
inline std::uint64_t prime_count_below(std::uint64_t x) { return primes_below(x).size(); }

/// Working moduli are odd machine-word primes so residue products fit in 64 bits.
inline void require_odd_prime(std::uint64_t p) {
  if (p < 3 || p > kMaxFieldModulus || p % 2 == 0 || !is_prime(p)) {
    throw std::invalid_argument("modulus must be an odd prime in [3, 2^31): got " + std::to_string(p));
  }
}

} // namespace lamvar
