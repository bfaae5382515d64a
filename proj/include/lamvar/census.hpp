#pragma once

/**
 * @file census.hpp
 * @brief Exhaustive enumeration of GL_2(F_p) and exact density formulas.
 *
 * The census brute-forces all p^4 matrices with a determinant filter and
 * tallies them two ways: by (det, trace) cell and by conjugacy class. The
 * enumeration is the independent oracle against which every closed form is
 * checked, so nothing here is derived from the formulas being verified.
 */

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamvar/errors.hpp"
#include "lamvar/fp.hpp"
#include "lamvar/rational.hpp"

namespace lamvar {

inline constexpr std::uint32_t kDefaultCensusBound = 101;

inline std::uint64_t gl2_order(std::uint32_t p) {
  return std::uint64_t(p) * (p - 1) * (p - 1) * (p + 1);
}

/// Counts of invertible matrices per (det, trace) cell for one prime p.
struct ClassCount {
  std::uint32_t p = 0;
  std::uint64_t group_order = 0;
  std::vector<std::uint64_t> cells; // index (det - 1) * p + trace

  std::uint64_t cell(std::uint32_t det, std::uint32_t trace) const {
    if (det == 0 || det >= p || trace >= p) throw std::invalid_argument("ClassCount::cell out of range");
    return cells[std::size_t(det - 1) * p + trace];
  }

  /// Sum over all determinants of the cell at the given trace.
  std::uint64_t trace_total(std::uint32_t trace) const {
    std::uint64_t sum = 0;
    for (std::uint32_t det = 1; det < p; ++det) sum += cell(det, trace);
    return sum;
  }
};

/// Full census: (det, trace) cells plus per-conjugacy-class element tallies.
///
/// Conjugacy classes are keyed by (trace, det) within each of the four kinds;
/// for a fixed kind that key determines the class uniquely.
struct Census {
  ClassCount counts;
  std::vector<std::uint64_t> central_tally;      // scalar classes
  std::vector<std::uint64_t> nondiag_tally;      // non-diagonalizable, repeated eigenvalue
  std::vector<std::uint64_t> split_tally;        // two distinct eigenvalues in F_p
  std::vector<std::uint64_t> irreducible_tally;  // irreducible characteristic polynomial

  std::uint32_t p() const { return counts.p; }
};

/// Brute-force census of GL_2(F_p) over all p^4 candidate matrices.
inline Census enumerate_census(std::uint32_t p, std::uint32_t bound = kDefaultCensusBound) {
  require_odd_prime(p);
  if (p > bound) {
    throw std::invalid_argument("enumerate_census: p = " + std::to_string(p) +
                                " exceeds the configured bound " + std::to_string(bound));
  }

  Census census;
  census.counts.p = p;
  census.counts.group_order = gl2_order(p);
  census.counts.cells.assign(std::size_t(p - 1) * p, 0);
  census.central_tally.assign(std::size_t(p) * p, 0);
  census.nondiag_tally.assign(std::size_t(p) * p, 0);
  census.split_tally.assign(std::size_t(p) * p, 0);
  census.irreducible_tally.assign(std::size_t(p) * p, 0);

  // Quadratic-residue character table: 0 -> 0, residue -> 1, non-residue -> 2.
  std::vector<std::uint8_t> chi(p, 2);
  chi[0] = 0;
  for (std::uint32_t r = 1; r < p; ++r) chi[std::uint64_t(r) * r % p] = 1;

  std::vector<std::uint32_t> mul(std::size_t(p) * p);
  for (std::uint32_t i = 0; i < p; ++i)
    for (std::uint32_t j = 0; j < p; ++j) mul[std::size_t(i) * p + j] = std::uint64_t(i) * j % p;

  // 4 * (p - det) mod p, indexed by det.
  std::vector<std::uint32_t> four_neg(p);
  for (std::uint32_t d = 0; d < p; ++d) four_neg[d] = (4ull * (p - d)) % p;

  for (std::uint32_t a = 0; a < p; ++a) {
    for (std::uint32_t d = 0; d < p; ++d) {
      const std::uint32_t tr = (a + d) % p;
      const std::uint32_t ad = mul[std::size_t(a) * p + d];
      const std::uint32_t tt = mul[std::size_t(tr) * p + tr];
      const std::size_t tr_row = std::size_t(tr) * p;
      for (std::uint32_t b = 0; b < p; ++b) {
        const std::uint32_t* mb = &mul[std::size_t(b) * p];
        for (std::uint32_t c = 0; c < p; ++c) {
          std::uint32_t det = ad + p - mb[c];
          if (det >= p) det -= p;
          if (det == 0) continue;
          ++census.counts.cells[std::size_t(det - 1) * p + tr];

          std::uint32_t disc = tt + four_neg[det];
          if (disc >= p) disc -= p;
          switch (chi[disc]) {
            case 0:
              if (b == 0 && c == 0) ++census.central_tally[tr_row + det];
              else ++census.nondiag_tally[tr_row + det];
              break;
            case 1:
              ++census.split_tally[tr_row + det];
              break;
            default:
              ++census.irreducible_tally[tr_row + det];
          }
        }
      }
    }
  }
  return census;
}

/// Per-formula verification of the four conjugacy-class sizes and multiplicities.
struct ClassSizeReport {
  std::uint32_t p = 0;
  // Observed uniform class sizes (0 when the tally is not uniform).
  std::uint64_t split_size = 0, nondiag_size = 0, central_size = 0, irreducible_size = 0;
  std::uint64_t split_classes = 0, nondiag_classes = 0, central_classes = 0, irreducible_classes = 0;
  bool split_ok = false, nondiag_ok = false, central_ok = false, irreducible_ok = false;
  bool total_ok = false;

  bool all_ok() const { return split_ok && nondiag_ok && central_ok && irreducible_ok && total_ok; }
};

inline ClassSizeReport class_size_check(const Census& census) {
  const std::uint32_t p = census.p();
  ClassSizeReport report;
  report.p = p;

  auto survey = [](const std::vector<std::uint64_t>& tally, std::uint64_t& uniform_size,
                   std::uint64_t& classes) {
    uniform_size = 0;
    classes = 0;
    bool uniform = true;
    for (std::uint64_t n : tally) {
      if (n == 0) continue;
      ++classes;
      if (uniform_size == 0) uniform_size = n;
      else if (n != uniform_size) uniform = false;
    }
    if (!uniform) uniform_size = 0;
    return uniform;
  };

  const std::uint64_t split_expect = std::uint64_t(p) * (p + 1);
  const std::uint64_t nondiag_expect = std::uint64_t(p) * p - 1;
  const std::uint64_t irred_expect = std::uint64_t(p) * p - p;

  bool u;
  u = survey(census.split_tally, report.split_size, report.split_classes);
  report.split_ok = u && report.split_size == split_expect &&
                    report.split_classes == std::uint64_t(p - 1) * (p - 2) / 2;
  u = survey(census.nondiag_tally, report.nondiag_size, report.nondiag_classes);
  report.nondiag_ok = u && report.nondiag_size == nondiag_expect &&
                      report.nondiag_classes == std::uint64_t(p - 1);
  u = survey(census.central_tally, report.central_size, report.central_classes);
  report.central_ok = u && report.central_size == 1 && report.central_classes == std::uint64_t(p - 1);
  u = survey(census.irreducible_tally, report.irreducible_size, report.irreducible_classes);
  report.irreducible_ok = u && report.irreducible_size == irred_expect &&
                          report.irreducible_classes == std::uint64_t(p) * (p - 1) / 2;

  std::uint64_t total = 0;
  for (std::uint64_t n : census.counts.cells) total += n;
  report.total_ok = total == census.counts.group_order;
  return report;
}

namespace detail {
inline Rational cell_density(const Census& census, std::uint64_t numerator_count) {
  return make_rational(BigInt(numerator_count), BigInt(census.counts.group_order));
}

inline void require_equal(const Rational& got, const Rational& expected, const std::string& what) {
  if (got != expected) {
    throw CheckFailure(what + ": enumeration gives " + fraction_string(got) +
                       " but the closed form gives " + fraction_string(expected));
  }
}
} // namespace detail

/// Density of trace = 0 over all nonzero determinants; must equal p / (p^2 - 1).
inline Rational density_trace_zero(const Census& census) {
  const std::uint32_t p = census.p();
  const Rational got = detail::cell_density(census, census.counts.trace_total(0));
  detail::require_equal(got, make_rational(p, std::uint64_t(p) * p - 1), "density_trace_zero");
  return got;
}

/// Density of trace = a (a != 0); must equal (p^2 - p - 1) / ((p-1)^2 (p+1)), independent of a.
inline Rational density_trace_nonzero(const Census& census, std::uint32_t a) {
  const std::uint32_t p = census.p();
  a %= p;
  if (a == 0) throw std::invalid_argument("density_trace_nonzero: a must be nonzero mod p (use density_trace_zero)");
  const Rational got = detail::cell_density(census, census.counts.trace_total(a));
  const Rational expected = make_rational(std::uint64_t(p) * p - p - 1,
                                          std::uint64_t(p - 1) * (p - 1) * (p + 1));
  detail::require_equal(got, expected, "density_trace_nonzero");
  return got;
}

/// Density of the cells with trace = sign * (det + 1); must equal (p^2 - 2) / ((p-1)^2 (p+1)).
inline Rational density_trace_det_linked(const Census& census, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("density_trace_det_linked: sign must be +1 or -1");
  const std::uint32_t p = census.p();
  std::uint64_t sum = 0;
  for (std::uint32_t i = 1; i < p; ++i) {
    const std::uint32_t t = sign == 1 ? (i + 1) % p : (2 * p - i - 1) % p;
    sum += census.counts.cell(i, t);
  }
  const Rational got = detail::cell_density(census, sum);
  const Rational expected = make_rational(std::uint64_t(p) * p - 2,
                                          std::uint64_t(p - 1) * (p - 1) * (p + 1));
  detail::require_equal(got, expected, sign == 1 ? "density_trace_det_linked(+1)"
                                                 : "density_trace_det_linked(-1)");
  return got;
}

/// CSV rows `p,det,trace,count`, det ascending then trace ascending.
inline void write_census_csv(const Census& census, std::ostream& os) {
  const std::uint32_t p = census.p();
  os << "p,det,trace,count\n";
  for (std::uint32_t det = 1; det < p; ++det) {
    for (std::uint32_t trace = 0; trace < p; ++trace) {
      os << p << ',' << det << ',' << trace << ',' << census.counts.cell(det, trace) << '\n';
    }
  }
}

} // namespace lamvar
