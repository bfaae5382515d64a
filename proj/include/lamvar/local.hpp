#pragma once

/**
 * @file local.hpp
 * @brief Local factors s_ell, d_ell, delta = s_ell * d_ell and the
 *        lambda-transfer identity
 *            lambda(g) + sum_{ell | M} delta(g, ell)
 *          = lambda(f) + sum_{ell | M} delta(f, ell).
 *
 * s_ell is p^{v_p((ell^{p-1} - 1)/p)}; equivalently it counts the primes
 * above ell in the cyclotomic Z_p-extension of Q (the valuation formula is
 * what is computed). d_ell is the multiplicity of 1 as a root mod p of the
 * local Frobenius characteristic polynomial: degree 2 away from the level,
 * degree 1 at primes dividing it.
 */

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lamvar/ap.hpp"
#include "lamvar/carayol.hpp"
#include "lamvar/errors.hpp"
#include "lamvar/primes.hpp"
#include "lamvar/rational.hpp"

namespace lamvar {

/// p^{v_p((ell^{p-1} - 1) / p)}, exact in arbitrary precision. Requires ell != p.
inline BigInt s_factor(std::uint32_t p, std::uint64_t ell) {
  require_odd_prime(p);
  if (!is_prime(ell)) throw std::invalid_argument("s_factor: ell must be prime");
  if (ell == p) throw std::invalid_argument("s_factor: ell = p is excluded");
  BigInt t = pow_bigint(BigInt(ell), p - 1) - 1;
  t /= p; // ell^(p-1) = 1 mod p, so this division is exact
  BigInt s = 1;
  while (t % p == 0) {
    t /= p;
    s *= p;
  }
  return s;
}

/// Multiplicity of X = 1 in ell - a_ell X + X^2 mod p (good primes: ell not
/// dividing the level, ell != p). Simple root needs ell !≡ 1 (mod p).
inline int d_factor_good(std::uint32_t p, std::uint64_t ell, std::int64_t ap) {
  require_odd_prime(p);
  if (ell == p) throw std::invalid_argument("d_factor_good: ell = p is excluded");
  const std::uint32_t rl = static_cast<std::uint32_t>(ell % p);
  const std::uint32_t ra = mod_p(ap, p);
  if ((rl + 1) % p != ra) return 0;
  return rl == 1 ? 2 : 1;
}

/// Multiplicity of X = 1 in ell - a_ell X mod p (primes dividing the level):
/// 1 exactly when a_ell ≡ ell (mod p), and then the root is necessarily simple.
inline int d_factor_bad(std::uint32_t p, std::uint64_t ell, std::int64_t ap) {
  require_odd_prime(p);
  if (ell == p) throw std::invalid_argument("d_factor_bad: ell = p is excluded");
  return mod_p(ap, p) == ell % p ? 1 : 0;
}

enum class LocalRole : std::uint8_t {
  OldPrime,  // ell divides the level: degree-1 polynomial
  NewPrime,  // ell prime to the level: degree-2 polynomial
};

inline const char* to_string(LocalRole role) {
  return role == LocalRole::OldPrime ? "old" : "new";
}

struct LocalFactor {
  std::uint64_t ell = 0;
  BigInt s = 1;
  int d = 0;
  BigInt delta = 0; // s * d
  LocalRole role = LocalRole::NewPrime;
};

/// Local factor of the given form at ell; picks the degree-1 or degree-2 path
/// by whether ell divides the form's level.
inline LocalFactor local_factor(std::uint32_t p, const FormSpec& form, std::uint64_t ell,
                                std::int64_t ap) {
  LocalFactor out;
  out.ell = ell;
  out.s = s_factor(p, ell);
  if (form.level % ell == 0) {
    out.role = LocalRole::OldPrime;
    out.d = d_factor_bad(p, ell, ap);
  } else {
    out.role = LocalRole::NewPrime;
    out.d = d_factor_good(p, ell, ap);
  }
  out.delta = out.s * out.d;
  return out;
}

/// For a hypothetical form at a raised level, delta at a new prime cannot be
/// computed without its coefficients; it is bounded by {0, s_ell}.
inline std::pair<BigInt, BigInt> delta_bounds_new_prime(std::uint32_t p, std::uint64_t ell) {
  return {BigInt(0), s_factor(p, ell)};
}

struct BadPrimeHypotheses {
  bool hyp_bad = true;        // d_ell = 0 at every prime dividing N
  bool hyp_bad_prime = true;  // d_ell = 1 at every prime dividing N
  std::vector<LocalFactor> factors;
};

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Evaluates d_ell at every prime dividing the level of ctx.form.
inline BadPrimeHypotheses check_bad_hypotheses(const AnalysisContext& ctx, ApCache& cache) {
  BadPrimeHypotheses out;
  for (std::uint64_t ell : prime_divisors(ctx.form.level)) {
    const LocalFactor lf = local_factor(ctx.p, ctx.form, ell, get_ap(ctx.form, ell, cache));
    out.hyp_bad = out.hyp_bad && lf.d == 0;
    out.hyp_bad_prime = out.hyp_bad_prime && lf.d == 1;
    out.factors.push_back(lf);
  }
  return out;
}

/// Which invariant a profile carries: the ordinary lambda, or one of the two
/// signed invariants attached to a non-ordinary form. Metadata only; the
/// transfer arithmetic is identical in all three cases.
enum class InvariantSign : std::uint8_t { Ordinary, Plus, Minus };

inline const char* to_string(InvariantSign sign) {
  switch (sign) {
    case InvariantSign::Plus: return "+";
    case InvariantSign::Minus: return "-";
    default: return "ordinary";
  }
}

/// Iwasawa invariants supplied by the user; mu = 0 is required before any
/// transfer computation. Signed invariants are a single lambda plus a tag.
struct LambdaProfile {
  std::int64_t lambda = 0;
  std::int64_t mu = 0;
  std::string form_label;
  InvariantSign sign = InvariantSign::Ordinary;

  static LambdaProfile make(std::int64_t lambda, std::int64_t mu, std::string form_label,
                            InvariantSign sign = InvariantSign::Ordinary) {
    if (lambda < 0) throw std::invalid_argument("lambda invariant must be nonnegative");
    if (mu < 0) throw std::invalid_argument("mu invariant must be nonnegative");
    return LambdaProfile{lambda, mu, std::move(form_label), sign};
  }

  void require_mu_zero() const {
    if (mu != 0) {
      throw HypothesisViolation("mu(" + (form_label.empty() ? "g" : form_label) +
                                ") = " + std::to_string(mu) +
                                " but the transfer identity requires mu = 0");
    }
  }
};

struct TransferResult {
  BigInt lambda_f = 0;
  BigInt sum_delta_g = 0;
  BigInt sum_delta_f = 0;
  bool growth = false; // lambda(f) > lambda(g), i.e. sum_g > sum_f
};

/// lambda(f) = lambda(g) + sum delta(g, ell) - sum delta(f, ell), with both
/// factor lists indexed by the same prime set. A negative result signals
/// inconsistent input data.
inline TransferResult lambda_transfer(const LambdaProfile& lambda_g,
                                      std::span<const LocalFactor> delta_g,
                                      std::span<const LocalFactor> delta_f) {
  lambda_g.require_mu_zero();
  if (delta_g.size() != delta_f.size()) {
    throw std::invalid_argument("lambda_transfer: factor lists must cover the same primes");
  }
  for (std::size_t i = 0; i < delta_g.size(); ++i) {
    if (delta_g[i].ell != delta_f[i].ell) {
      throw std::invalid_argument("lambda_transfer: factor lists must cover the same primes");
    }
  }
  TransferResult out;
  for (const LocalFactor& lf : delta_g) out.sum_delta_g += lf.delta;
  for (const LocalFactor& lf : delta_f) out.sum_delta_f += lf.delta;
  out.lambda_f = BigInt(lambda_g.lambda) + out.sum_delta_g - out.sum_delta_f;
  out.growth = out.sum_delta_g > out.sum_delta_f;
  if (out.lambda_f < 0) {
    throw NegativeLambda("lambda_transfer: result " + out.lambda_f.str() +
                         " is negative; the supplied invariants and local factors are inconsistent");
  }
  return out;
}

inline nlohmann::json local_factor_json(const LocalFactor& lf) {
  return nlohmann::json{
      {"ell", lf.ell}, {"s", lf.s.str()}, {"d", lf.d}, {"delta", lf.delta.str()},
      {"role", to_string(lf.role)},
  };
}

inline nlohmann::json local_factors_json(std::span<const LocalFactor> factors) {
  nlohmann::json arr = nlohmann::json::array();
  for (const LocalFactor& lf : factors) arr.push_back(local_factor_json(lf));
  return arr;
}

} // namespace lamvar
