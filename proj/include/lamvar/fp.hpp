#pragma once

/**
 * @file fp.hpp
 * @brief Arithmetic over F_p and 2x2 matrices, with conjugacy-class labeling.
 *
 * Moduli are machine-word primes: p must be an odd prime below 2^31 so that
 * products of residues fit in 64 bits. That is far beyond what the census
 * enumeration ever touches.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "lamvar/primes.hpp"

namespace lamvar {

inline constexpr std::uint32_t kMaxSqrtModulus = 10'000; // exhaustive-search bound

/// A residue in [0, p) for an odd prime p. Immutable value type.
class Fp {
 public:
  Fp(std::int64_t value, std::uint32_t modulus) : p_(modulus) {
    require_odd_prime(modulus);
    std::int64_t r = value % static_cast<std::int64_t>(modulus);
    if (r < 0) r += modulus;
    v_ = static_cast<std::uint32_t>(r);
  }

  std::uint32_t value() const { return v_; }
  std::uint32_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }

  friend bool operator==(Fp lhs, Fp rhs) {
    check_same(lhs, rhs);
    return lhs.v_ == rhs.v_;
  }

  Fp operator+(Fp rhs) const {
    check_same(*this, rhs);
    std::uint64_t s = std::uint64_t(v_) + rhs.v_;
    if (s >= p_) s -= p_;
    return Fp(v_checked{}, static_cast<std::uint32_t>(s), p_);
  }

  Fp operator-(Fp rhs) const {
    check_same(*this, rhs);
    std::uint64_t s = std::uint64_t(v_) + p_ - rhs.v_;
    if (s >= p_) s -= p_;
    return Fp(v_checked{}, static_cast<std::uint32_t>(s), p_);
  }

  Fp operator*(Fp rhs) const {
    check_same(*this, rhs);
    return Fp(v_checked{}, static_cast<std::uint32_t>((std::uint64_t(v_) * rhs.v_) % p_), p_);
  }

  Fp operator-() const { return Fp(v_checked{}, v_ == 0 ? 0 : p_ - v_, p_); }

  Fp pow(std::uint64_t e) const {
    std::uint64_t base = v_, acc = 1;
    while (e > 0) {
      if (e & 1) acc = acc * base % p_;
      base = base * base % p_;
      e >>= 1;
    }
    return Fp(v_checked{}, static_cast<std::uint32_t>(acc), p_);
  }

  /// Fermat inverse; the modulus is prime by construction.
  Fp inverse() const {
    if (v_ == 0) throw std::domain_error("Fp::inverse of zero");
    return pow(p_ - 2);
  }

  Fp operator/(Fp rhs) const { return *this * rhs.inverse(); }

 private:
  struct v_checked {};
  Fp(v_checked, std::uint32_t v, std::uint32_t p) : v_(v), p_(p) {}

  static void check_same(Fp lhs, Fp rhs) {
    if (lhs.p_ != rhs.p_) throw std::invalid_argument("Fp operands have different moduli");
  }

  std::uint32_t v_;
  std::uint32_t p_;
};

/// Smallest square root of a mod p, if one exists. Exhaustive search; requires p <= 10^4.
inline std::optional<Fp> sqrt_mod_p(Fp a) {
  const std::uint32_t p = a.modulus();
  if (p > kMaxSqrtModulus) {
    throw std::invalid_argument("sqrt_mod_p: exhaustive search is limited to p <= 10^4");
  }
  for (std::uint32_t r = 0; r < p; ++r) {
    if (std::uint64_t(r) * r % p == a.value()) return Fp(r, p);
  }
  return std::nullopt;
}

/// A 2x2 matrix over F_p; GL_2 membership is checked where the operation requires it.
struct Matrix2 {
  Fp a, b, c, d; // [[a, b], [c, d]]

  Matrix2(Fp a_, Fp b_, Fp c_, Fp d_) : a(a_), b(b_), c(c_), d(d_) {
    if (b.modulus() != a.modulus() || c.modulus() != a.modulus() || d.modulus() != a.modulus()) {
      throw std::invalid_argument("Matrix2 entries must share one modulus");
    }
  }

  static Matrix2 from_ints(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                           std::uint32_t p) {
    return Matrix2(Fp(a, p), Fp(b, p), Fp(c, p), Fp(d, p));
  }

  static Matrix2 identity(std::uint32_t p) { return from_ints(1, 0, 0, 1, p); }

  std::uint32_t modulus() const { return a.modulus(); }
  Fp det() const { return a * d - b * c; }
  Fp trace() const { return a + d; }
  bool is_invertible() const { return !det().is_zero(); }

  Matrix2 operator*(const Matrix2& m) const {
    return Matrix2(a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d);
  }

  Matrix2 inverse() const {
    Fp di = det().inverse(); // throws on singular input
    return Matrix2(d * di, -b * di, -c * di, a * di);
  }

  friend bool operator==(const Matrix2& x, const Matrix2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
};

/// (det, trace) reduced mod p. Caller guarantees invertibility.
inline std::pair<Fp, Fp> det_trace(const Matrix2& m) { return {m.det(), m.trace()}; }

/**
 * Conjugacy-class label of an element of GL_2(F_p). Exactly one variant applies:
 *  - SplitSemisimple: two distinct eigenvalues a != b in F_p (stored with a < b);
 *  - Central: scalar matrix a*I;
 *  - NonDiagonalRepeated: repeated eigenvalue a, not scalar;
 *  - IrreducibleQuadratic: characteristic polynomial X^2 - trace*X + det irreducible over F_p.
 */
struct ClassLabel {
  struct SplitSemisimple {
    std::uint32_t a, b;
    friend bool operator==(SplitSemisimple, SplitSemisimple) = default;
  };
  struct NonDiagonalRepeated {
    std::uint32_t a;
    friend bool operator==(NonDiagonalRepeated, NonDiagonalRepeated) = default;
  };
  struct Central {
    std::uint32_t a;
    friend bool operator==(Central, Central) = default;
  };
  struct IrreducibleQuadratic {
    std::uint32_t trace, det;
    friend bool operator==(IrreducibleQuadratic, IrreducibleQuadratic) = default;
  };

  std::uint32_t p;
  std::variant<SplitSemisimple, NonDiagonalRepeated, Central, IrreducibleQuadratic> kind;

  friend bool operator==(const ClassLabel& x, const ClassLabel& y) {
    return x.p == y.p && x.kind == y.kind;
  }

  std::string to_string() const {
    struct V {
      std::uint32_t p;
      std::string operator()(const SplitSemisimple& s) const {
        return "SplitSemisimple(" + std::to_string(s.a) + "," + std::to_string(s.b) + ")";
      }
      std::string operator()(const NonDiagonalRepeated& s) const {
        return "NonDiagonalRepeated(" + std::to_string(s.a) + ")";
      }
      std::string operator()(const Central& s) const {
        return "Central(" + std::to_string(s.a) + ")";
      }
      std::string operator()(const IrreducibleQuadratic& s) const {
        // Render X^2 + c1*X + c0 with c1 = -trace, c0 = det.
        std::uint32_t c1 = (p - s.trace) % p;
        std::string out = "IrreducibleQuadratic(X^2";
        if (c1 != 0) out += " + " + std::to_string(c1) + "X";
        if (s.det != 0) out += " + " + std::to_string(s.det);
        return out + ")";
      }
    };
    return std::visit(V{p}, kind);
  }
};

/// Conjugacy-class label of m. Rejects singular matrices.
inline ClassLabel classify(const Matrix2& m) {
  const std::uint32_t p = m.modulus();
  const Fp d = m.det();
  if (d.is_zero()) throw std::invalid_argument("classify: matrix is singular");
  const Fp t = m.trace();
  const Fp four(4, p);
  const Fp disc = t * t - four * d;

  if (disc.is_zero()) {
    // Repeated eigenvalue t/2; scalar exactly when the off-diagonal vanishes.
    const Fp eig = t / Fp(2, p);
    if (m.b.is_zero() && m.c.is_zero()) return {p, ClassLabel::Central{eig.value()}};
    return {p, ClassLabel::NonDiagonalRepeated{eig.value()}};
  }
  if (auto root = sqrt_mod_p(disc)) {
    const Fp half = Fp(2, p).inverse();
    const Fp r1 = (t + *root) * half;
    const Fp r2 = (t - *root) * half;
    const std::uint32_t lo = std::min(r1.value(), r2.value());
    const std::uint32_t hi = std::max(r1.value(), r2.value());
    return {p, ClassLabel::SplitSemisimple{lo, hi}};
  }
  return {p, ClassLabel::IrreducibleQuadratic{t.value(), d.value()}};
}

} // namespace lamvar
