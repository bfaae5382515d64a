#pragma once

/**
 * @file carayol.hpp
 * @brief Level-raising bookkeeping: the five-way prime classification by
 *        (ell mod p, a_ell mod p), its counters, and admissible raised levels.
 *
 * A prime ell with ell != p and ell not dividing N falls into exactly one of:
 *   Set1   : ell !≡ ±1 (p), a_ell ≡ ±(1 + ell) (p)    -> exponent menu {1}
 *   Set1'  : ell !≡ ±1 (p), a_ell !≡ ±(1 + ell) (p)   -> never raised
 *   Set2   : ell ≡ -1 (p),  a_ell ≡ 0 (p)             -> exponent menu {1, 2}
 *   Set2'  : ell ≡ -1 (p),  a_ell !≡ 0 (p)            -> never raised
 *   Set3   : ell ≡ 1 (p)                              -> exponent menu {1, 2}
 * Primes dividing N are recorded but never raised; ell = p is excluded
 * outright (levels stay prime to p).
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lamvar/ap.hpp"
#include "lamvar/curves.hpp"
#include "lamvar/primes.hpp"
#include "lamvar/rational.hpp"

namespace lamvar {

/// Fixed prime p, the form of optimal level N, and the prime window bound x.
struct AnalysisContext {
  std::uint32_t p;
  FormSpec form;
  std::uint64_t x;
};

inline AnalysisContext make_context(std::uint32_t p, FormSpec form, std::uint64_t x) {
  require_odd_prime(p);
  if (form.level % p == 0) {
    throw std::invalid_argument("analysis context requires p not dividing the level N");
  }
  return AnalysisContext{p, std::move(form), x};
}

enum class SetLabel : std::uint8_t { Set1, Set1Prime, Set2, Set2Prime, Set3, DividesN, IsP };

inline const char* to_string(SetLabel label) {
  switch (label) {
    case SetLabel::Set1: return "Set1";
    case SetLabel::Set1Prime: return "Set1Prime";
    case SetLabel::Set2: return "Set2";
    case SetLabel::Set2Prime: return "Set2Prime";
    case SetLabel::Set3: return "Set3";
    case SetLabel::DividesN: return "DividesN";
    case SetLabel::IsP: return "IsP";
  }
  return "?";
}

struct PrimeRecord {
  std::uint64_t ell;
  std::int64_t ap;
  std::uint32_t ell_mod_p;
  std::uint32_t ap_mod_p;
  SetLabel label;
};

inline std::uint32_t mod_p(std::int64_t v, std::uint32_t p) {
  std::int64_t r = v % static_cast<std::int64_t>(p);
  if (r < 0) r += p;
  return static_cast<std::uint32_t>(r);
}

inline PrimeRecord classify_prime(const AnalysisContext& ctx, std::uint64_t ell, std::int64_t ap) {
  const std::uint32_t p = ctx.p;
  const std::uint32_t rl = static_cast<std::uint32_t>(ell % p);
  const std::uint32_t ra = mod_p(ap, p);
  PrimeRecord rec{ell, ap, rl, ra, SetLabel::Set1Prime};
  if (ell == p) {
    rec.label = SetLabel::IsP;
  } else if (ctx.form.level % ell == 0) {
    rec.label = SetLabel::DividesN;
  } else if (rl == 1) {
    rec.label = SetLabel::Set3;
  } else if (rl == p - 1) {
    rec.label = ra == 0 ? SetLabel::Set2 : SetLabel::Set2Prime;
  } else {
    const std::uint32_t target = static_cast<std::uint32_t>((ell + 1) % p);
    const bool hit = ra == target || ra == (p - target) % p;
    rec.label = hit ? SetLabel::Set1 : SetLabel::Set1Prime;
  }
  return rec;
}

struct ClassificationSummary {
  std::uint32_t p = 0;
  std::uint64_t x = 0;
  std::uint64_t s1 = 0, s1_prime = 0, s2 = 0, s2_prime = 0, s3 = 0;
  std::uint64_t divides_n = 0, is_p = 0;
  std::uint64_t pi_x = 0;

  std::uint64_t count(SetLabel label) const {
    switch (label) {
      case SetLabel::Set1: return s1;
      case SetLabel::Set1Prime: return s1_prime;
      case SetLabel::Set2: return s2;
      case SetLabel::Set2Prime: return s2_prime;
      case SetLabel::Set3: return s3;
      case SetLabel::DividesN: return divides_n;
      case SetLabel::IsP: return is_p;
    }
    return 0;
  }

  Rational empirical_density(SetLabel label) const {
    if (pi_x == 0) return Rational(0);
    return make_rational(count(label), pi_x);
  }
};

struct Classification {
  std::vector<PrimeRecord> records;
  ClassificationSummary summary;
};

/// Classifies every prime ell < ctx.x, filling a_ell from the cache (curve
/// sources are counted on demand; table gaps raise MissingCoefficient).
inline Classification classify_all(const AnalysisContext& ctx, ApCache& cache) {
  Classification out;
  out.summary.p = ctx.p;
  out.summary.x = ctx.x;
  bulk_ap(ctx.form, ctx.x, cache);
  for (std::uint32_t ell : primes_below(ctx.x)) {
    const PrimeRecord rec = classify_prime(ctx, ell, get_ap(ctx.form, ell, cache));
    out.records.push_back(rec);
    ++out.summary.pi_x;
    switch (rec.label) {
      case SetLabel::Set1: ++out.summary.s1; break;
      case SetLabel::Set1Prime: ++out.summary.s1_prime; break;
      case SetLabel::Set2: ++out.summary.s2; break;
      case SetLabel::Set2Prime: ++out.summary.s2_prime; break;
      case SetLabel::Set3: ++out.summary.s3; break;
      case SetLabel::DividesN: ++out.summary.divides_n; break;
      case SetLabel::IsP: ++out.summary.is_p; break;
    }
  }
  return out;
}

/// Number of admissible raised levels on the window: 2^s1 * 3^(s2+s3) - 1
/// (the all-exponents-zero choice gives back M = N and is excluded).
inline BigInt count_levels(const ClassificationSummary& summary) {
  return pow_bigint(2, summary.s1) * pow_bigint(3, summary.s2 + summary.s3) - 1;
}

/// One admissible raised level M = N * prod ell^alpha(ell).
struct LevelCandidate {
  BigInt M;
  std::vector<std::pair<std::uint64_t, int>> exponents; // (ell, alpha), ell ascending
};

/// A prime eligible for level raising together with its exponent cap.
struct LevelPrime {
  std::uint64_t ell;
  int max_exp; // menu is {1} or {1, 2}; alpha = 0 means "not picked"
};

inline std::optional<int> level_exponent_cap(SetLabel label) {
  switch (label) {
    case SetLabel::Set1: return 1;
    case SetLabel::Set2:
    case SetLabel::Set3: return 2;
    default: return std::nullopt;
  }
}

/**
 * Ascending stream of raised levels built from an exponent menu per prime.
 *
 * States live in a min-heap keyed by M; each state extends by (a) bumping the
 * exponent of its last prime, (b) appending the next prime at exponent 1, or
 * (c) sliding its last prime (while at exponent 1) to the next prime. Every
 * admissible exponent vector is reached exactly once and children never
 * shrink M, so pops come out sorted.
 */
class LevelStream {
 public:
  LevelStream(BigInt base, std::vector<LevelPrime> primes, std::optional<BigInt> max_m)
      : base_(std::move(base)), primes_(std::move(primes)), max_m_(std::move(max_m)) {
    std::sort(primes_.begin(), primes_.end(),
              [](const LevelPrime& a, const LevelPrime& b) { return a.ell < b.ell; });
    for (std::size_t i = 1; i < primes_.size(); ++i) {
      if (primes_[i].ell == primes_[i - 1].ell) {
        throw std::invalid_argument("LevelStream: duplicate prime in menu");
      }
    }
    if (!primes_.empty()) {
      State seed;
      seed.m = base_ * primes_[0].ell;
      seed.exps = {{0, 1}};
      push(std::move(seed));
    }
  }

  std::optional<LevelCandidate> next() {
    if (heap_.empty()) return std::nullopt;
    State top = heap_.top();
    heap_.pop();
    expand(top);
    LevelCandidate out;
    out.M = top.m;
    out.exponents.reserve(top.exps.size());
    for (auto [idx, e] : top.exps) out.exponents.emplace_back(primes_[idx].ell, e);
    return out;
  }

 private:
  struct State {
    BigInt m;
    std::vector<std::pair<std::uint32_t, int>> exps; // (prime index, exponent), index ascending

    bool operator>(const State& rhs) const { return m > rhs.m; }
  };

  void push(State s) {
    if (max_m_ && s.m > *max_m_) return;
    heap_.push(std::move(s));
  }

  void expand(const State& s) {
    const auto [last_idx, last_exp] = s.exps.back();
    // (a) raise the exponent of the last prime.
    if (last_exp < primes_[last_idx].max_exp) {
      State child = s;
      child.m *= primes_[last_idx].ell;
      ++child.exps.back().second;
      push(std::move(child));
    }
    // (b) append the next prime at exponent 1.
    if (last_idx + 1 < primes_.size()) {
      State child = s;
      child.m *= primes_[last_idx + 1].ell;
      child.exps.emplace_back(last_idx + 1, 1);
      push(std::move(child));
    }
    // (c) slide the last prime one slot right; only from exponent 1 so that
    // children are never smaller than their parent.
    if (last_exp == 1 && last_idx + 1 < primes_.size()) {
      State child = s;
      child.m = child.m / primes_[last_idx].ell * primes_[last_idx + 1].ell;
      child.exps.back().first = last_idx + 1;
      push(std::move(child));
    }
  }

  BigInt base_;
  std::vector<LevelPrime> primes_;
  std::optional<BigInt> max_m_;
  std::priority_queue<State, std::vector<State>, std::greater<State>> heap_;
};

/// Menu of raisable primes extracted from classification records.
inline std::vector<LevelPrime> level_menu(std::span<const PrimeRecord> records) {
  std::vector<LevelPrime> menu;
  for (const PrimeRecord& rec : records) {
    if (auto cap = level_exponent_cap(rec.label)) menu.push_back({rec.ell, *cap});
  }
  return menu;
}

/// All admissible levels N < M <= max_M, ascending; exhaustive against the
/// bound. Pass max_count to truncate an intentionally unbounded stream.
inline std::vector<LevelCandidate> enumerate_levels(const AnalysisContext& ctx,
                                                    std::span<const PrimeRecord> records,
                                                    std::optional<BigInt> max_m,
                                                    std::size_t max_count = SIZE_MAX) {
  LevelStream stream(BigInt(ctx.form.level), level_menu(records), std::move(max_m));
  std::vector<LevelCandidate> out;
  while (out.size() < max_count) {
    auto next = stream.next();
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

/// CSV export `ell,ap,ell_mod_p,ap_mod_p,label`, one row per classified prime.
inline void write_classification_csv(const Classification& cls, std::ostream& os) {
  os << "ell,ap,ell_mod_p,ap_mod_p,label\n";
  for (const PrimeRecord& rec : cls.records) {
    os << rec.ell << ',' << rec.ap << ',' << rec.ell_mod_p << ',' << rec.ap_mod_p << ','
       << to_string(rec.label) << '\n';
  }
}

inline nlohmann::json density_json(const Rational& value) {
  return nlohmann::json{{"fraction", fraction_string(value)}, {"decimal", to_double(value)}};
}

inline nlohmann::json summary_json(const ClassificationSummary& s) {
  nlohmann::json counts = {
      {"set1", s.s1},           {"set1_prime", s.s1_prime}, {"set2", s.s2},
      {"set2_prime", s.s2_prime}, {"set3", s.s3},           {"divides_n", s.divides_n},
      {"is_p", s.is_p},
  };
  nlohmann::json densities;
  for (SetLabel label : {SetLabel::Set1, SetLabel::Set1Prime, SetLabel::Set2, SetLabel::Set2Prime,
                         SetLabel::Set3}) {
    densities[to_string(label)] = density_json(s.empirical_density(label));
  }
  return nlohmann::json{
      {"p", s.p},
      {"x", s.x},
      {"pi_x", s.pi_x},
      {"counts", counts},
      {"empirical_densities", densities},
      {"raised_level_count", count_levels(s).str()},
  };
}

} // namespace lamvar
