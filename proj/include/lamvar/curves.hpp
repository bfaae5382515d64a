#pragma once

/**
 * @file curves.hpp
 * @brief Modular-form sources: rational Weierstrass curves and coefficient tables.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "lamvar/rational.hpp"

namespace lamvar {

/// Long Weierstrass model y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q.
struct WeierstrassCurve {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

  BigInt discriminant() const {
    const BigInt b2 = BigInt(a1) * a1 + 4 * BigInt(a2);
    const BigInt b4 = 2 * BigInt(a4) + BigInt(a1) * a3;
    const BigInt b6 = BigInt(a3) * a3 + 4 * BigInt(a6);
    const BigInt b8 = BigInt(a1) * a1 * a6 + 4 * BigInt(a2) * a6 - BigInt(a1) * a3 * a4 +
                      BigInt(a2) * a3 * a3 - BigInt(a4) * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
  }

  friend bool operator==(const WeierstrassCurve&, const WeierstrassCurve&) = default;
};

/// External table of integer Fourier coefficients (CSV, header `ell,ap`).
struct CoefficientTable {
  std::string path;
};

/// A weight-2 form given either by a curve or by a coefficient table, plus its level N.
struct FormSpec {
  std::variant<WeierstrassCurve, CoefficientTable> source;
  std::uint64_t level = 0;
  std::string label;

  bool is_curve() const { return std::holds_alternative<WeierstrassCurve>(source); }
  const WeierstrassCurve& curve() const { return std::get<WeierstrassCurve>(source); }
  const CoefficientTable& table() const { return std::get<CoefficientTable>(source); }

  static FormSpec from_curve(const WeierstrassCurve& curve, std::uint64_t level, std::string label) {
    if (level == 0) throw std::invalid_argument("FormSpec: level must be positive");
    if (curve.discriminant() == 0) throw std::invalid_argument("FormSpec: curve is singular (discriminant 0)");
    return FormSpec{curve, level, std::move(label)};
  }

  static FormSpec from_table(std::string path, std::uint64_t level, std::string label) {
    if (level == 0) throw std::invalid_argument("FormSpec: level must be positive");
    return FormSpec{CoefficientTable{std::move(path)}, level, std::move(label)};
  }
};

/// Built-in curve shorthands so the worked examples run with a single flag.
inline std::optional<FormSpec> registry_lookup(const std::string& label) {
  if (label == "11a1") return FormSpec::from_curve({0, -1, 1, -10, -20}, 11, "11a1");
  if (label == "43a1") return FormSpec::from_curve({0, 1, 1, 0, 0}, 43, "43a1");
  if (label == "53a1") return FormSpec::from_curve({1, -1, 1, 0, 0}, 53, "53a1");
  return std::nullopt;
}

} // namespace lamvar
