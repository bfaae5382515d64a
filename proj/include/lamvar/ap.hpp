#pragma once

/**
 * @file ap.hpp
 * @brief Fourier coefficients a_ell: projective point counts for curve sources,
 *        table ingestion otherwise, with a CSV-backed cache.
 *
 * Point counting returns ell + 1 - N_ell where N_ell is the number of
 * projective points on the reduced (possibly singular) Weierstrass model over
 * F_ell. For good primes this is the Frobenius trace; at bad primes the same
 * count yields +1 / -1 / 0 for split multiplicative / non-split multiplicative
 * / additive reduction, so no separate reduction-type analysis is needed.
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lamvar/curves.hpp"
#include "lamvar/errors.hpp"
#include "lamvar/primes.hpp"

namespace lamvar {

enum class ApProvenance : std::uint8_t { counted, ingested };

/// In-memory map ell -> a_ell with per-entry provenance. CSV round-trips bit-exactly.
class ApCache {
 public:
  struct Entry {
    std::int64_t ap;
    ApProvenance provenance;
  };

  std::optional<std::int64_t> find(std::uint64_t ell) const {
    auto it = entries_.find(ell);
    if (it == entries_.end()) return std::nullopt;
    return it->second.ap;
  }

  void insert(std::uint64_t ell, std::int64_t ap, ApProvenance provenance) {
    entries_[ell] = Entry{ap, provenance};
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// UTF-8 CSV, header `ell,ap`, rows sorted by ell ascending.
  void write_csv(std::ostream& os) const {
    os << "ell,ap\n";
    for (const auto& [ell, entry] : entries_) os << ell << ',' << entry.ap << '\n';
  }

  void write_csv_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(os);
  }

  static ApCache read_csv(std::istream& is, ApProvenance provenance = ApProvenance::ingested) {
    ApCache cache;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("coefficient CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ell,ap") throw std::runtime_error("coefficient CSV: expected header 'ell,ap'");
    std::uint64_t prev = 0;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw std::runtime_error("coefficient CSV line " + std::to_string(lineno) + ": missing comma");
      }
      std::uint64_t ell = 0;
      std::int64_t ap = 0;
      try {
        const std::string ell_text = line.substr(0, comma);
        if (ell_text.empty() || ell_text.find_first_not_of("0123456789") != std::string::npos) {
          throw std::invalid_argument("ell must be an unsigned integer");
        }
        ell = std::stoull(ell_text);
        ap = std::stoll(line.substr(comma + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("coefficient CSV line " + std::to_string(lineno) + ": bad integer");
      }
      if (!is_prime(ell)) {
        throw std::runtime_error("coefficient CSV line " + std::to_string(lineno) + ": " +
                                 std::to_string(ell) + " is not prime");
      }
      if (ell <= prev) {
        throw std::runtime_error("coefficient CSV line " + std::to_string(lineno) +
                                 ": rows must be strictly ascending in ell");
      }
      prev = ell;
      cache.insert(ell, ap, provenance);
    }
    return cache;
  }

  static ApCache read_csv_file(const std::string& path,
                               ApProvenance provenance = ApProvenance::ingested) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open coefficient CSV: " + path);
    return read_csv(is, provenance);
  }

 private:
  std::map<std::uint64_t, Entry> entries_;
};

namespace detail {

/// Naive count over the long model; used for ell in {2, 3} and as the test oracle.
inline std::int64_t ap_naive(const WeierstrassCurve& curve, std::uint64_t ell) {
  const std::int64_t l = static_cast<std::int64_t>(ell);
  auto red = [l](std::int64_t v) { return ((v % l) + l) % l; };
  const std::int64_t a1 = red(curve.a1), a2 = red(curve.a2), a3 = red(curve.a3),
                     a4 = red(curve.a4), a6 = red(curve.a6);
  std::int64_t affine = 0;
  for (std::int64_t x = 0; x < l; ++x) {
    const std::int64_t rhs = (((x * x % l) * x + a2 * x % l * x + a4 * x + a6) % l + l) % l;
    for (std::int64_t y = 0; y < l; ++y) {
      if ((y * y + a1 * x % l * y + a3 * y) % l == rhs) ++affine;
    }
  }
  return l + 1 - (affine + 1);
}

} // namespace detail

/// a_ell by projective point count over F_ell; valid for every prime ell,
/// including primes of bad reduction. Requires ell < 2^31.
inline std::int64_t count_ap(const WeierstrassCurve& curve, std::uint64_t ell) {
  if (!is_prime(ell)) throw std::invalid_argument("count_ap: ell must be prime");
  if (ell >= (std::uint64_t(1) << 31)) throw std::invalid_argument("count_ap: ell must be below 2^31");
  if (ell <= 3) return detail::ap_naive(curve, ell);

  // Complete the square in y (ell is odd): counting solutions of
  // u^2 = g(x) := 4x^3 + b2 x^2 + 2 b4 x + b6 is equivalent to counting the
  // affine points of the long model, so a_ell = -sum_x chi(g(x)).
  const std::int64_t l = static_cast<std::int64_t>(ell);
  auto red = [l](std::int64_t v) { return static_cast<std::uint64_t>(((v % l) + l) % l); };
  const std::uint64_t b2 = red(curve.a1 * curve.a1 + 4 * curve.a2);
  const std::uint64_t b4 = red(2 * curve.a4 + curve.a1 * curve.a3);
  const std::uint64_t b6 = red(curve.a3 * curve.a3 + 4 * curve.a6);

  auto addmod = [ell](std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= ell ? s - ell : s;
  };

  // chi table via incremental squares r^2 = (r-1)^2 + (2r - 1).
  std::vector<std::int8_t> chi(ell, -1);
  chi[0] = 0;
  std::uint64_t sq = 0, odd = 1;
  for (std::uint64_t r = 1; r <= (ell - 1) / 2; ++r) {
    sq = addmod(sq, odd);
    odd = addmod(odd, 2 % ell);
    chi[sq] = 1;
  }

  // g by cubic finite differences: only modular additions in the hot loop.
  std::uint64_t g = b6;
  std::uint64_t d1 = (4 + b2 + 2 * b4) % ell;          // g(1) - g(0)
  std::uint64_t d2 = (24 + 2 * b2) % ell;              // second difference at 0
  const std::uint64_t d3 = 24 % ell;
  std::int64_t sum = 0;
  for (std::uint64_t x = 0; x < ell; ++x) {
    sum += chi[g];
    g = addmod(g, d1);
    d1 = addmod(d1, d2);
    d2 = addmod(d2, d3);
  }
  return -sum;
}

/// Cached lookup: curve sources memoize point counts; table sources must already contain ell.
inline std::int64_t get_ap(const FormSpec& form, std::uint64_t ell, ApCache& cache) {
  if (auto hit = cache.find(ell)) return *hit;
  if (!form.is_curve()) throw MissingCoefficient(ell);
  const std::int64_t ap = count_ap(form.curve(), ell);
  cache.insert(ell, ap, ApProvenance::counted);
  return ap;
}

/// Ensures the cache covers every prime ell < x. Deterministic and idempotent;
/// point counting is distributed over `threads` workers and merged in order.
inline void bulk_ap(const FormSpec& form, std::uint64_t x, ApCache& cache, unsigned threads = 1) {
  const std::vector<std::uint32_t> primes = primes_below(x);
  std::vector<std::uint32_t> missing;
  for (std::uint32_t ell : primes) {
    if (!cache.find(ell)) missing.push_back(ell);
  }
  if (missing.empty()) return;
  if (!form.is_curve()) throw MissingCoefficient(missing.front());

  const WeierstrassCurve curve = form.curve();
  if (threads <= 1 || missing.size() < 64) {
    for (std::uint32_t ell : missing) cache.insert(ell, count_ap(curve, ell), ApProvenance::counted);
    return;
  }

  std::vector<std::int64_t> results(missing.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= missing.size()) return;
      results[i] = count_ap(curve, missing[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < missing.size(); ++i) {
    cache.insert(missing[i], results[i], ApProvenance::counted);
  }
}

} // namespace lamvar
