#pragma once

/**
 * @file stability.hpp
 * @brief Theorem-level prime sets R1, R2 (lambda stays equal) and R (lambda
 *        grows), density comparisons, and the stable / growth level streams.
 *
 * R1 collects Set1 primes with a_ell ≡ -(ell + 1) (mod p): their degree-2
 * local polynomial has no root at 1, so delta(g, ell) = 0. R2 collects Set3
 * primes with a_ell !≡ 2 (mod p), again delta = 0. R collects Set3 primes
 * with a_ell ≡ 2 (mod p): a double root at 1, the maximal local contribution.
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "lamvar/ap.hpp"
#include "lamvar/carayol.hpp"
#include "lamvar/errors.hpp"
#include "lamvar/local.hpp"
#include "lamvar/rational.hpp"

namespace lamvar {

// ---- closed-form densities (relative to all primes) ----

/// Set1 density as established by the census identities: 2(p-3)/(p-1)^2.
inline Rational set1_density(std::uint32_t p) {
  return make_rational(2 * (BigInt(p) - 3), (BigInt(p) - 1) * (BigInt(p) - 1));
}

/// The alternative Set1 exponent with (p-1)^3 in the denominator; kept so
/// reports can show which value the empirical counts support.
inline Rational set1_density_cubic_variant(std::uint32_t p) {
  return make_rational(2 * (BigInt(p) - 3), pow_bigint(BigInt(p) - 1, 3));
}

inline Rational set2_density(std::uint32_t p) {
  return make_rational(1, (BigInt(p) - 1) * (BigInt(p) - 1));
}

inline Rational set3_density(std::uint32_t p) { return make_rational(1, BigInt(p) - 1); }

/// Density of R1: (p-3)/(p-1)^2.
inline Rational r1_density(std::uint32_t p) {
  return make_rational(BigInt(p) - 3, (BigInt(p) - 1) * (BigInt(p) - 1));
}

/// Density of R2: (p^2-p-1)/((p-1)(p^2-1)).
inline Rational r2_density(std::uint32_t p) {
  return make_rational(BigInt(p) * p - p - 1, (BigInt(p) - 1) * (BigInt(p) * p - 1));
}

/// Density of the growth set R: p/((p-1)(p^2-1)).
inline Rational growth_density(std::uint32_t p) {
  return make_rational(BigInt(p), (BigInt(p) - 1) * (BigInt(p) * p - 1));
}

/// Combined density of delta = 0 primes, R1 + R2 = (2p^2-3p-4)/((p-1)^2(p+1)).
inline Rational stable_density(std::uint32_t p) { return r1_density(p) + r2_density(p); }

/// Exact split of Set3: 1/(p-1) = R2 density + growth density. Throws on
/// mismatch; returns the common value of both sides.
inline Rational verify_set3_split(std::uint32_t p) {
  const Rational lhs = set3_density(p);
  const Rational rhs = r2_density(p) + growth_density(p);
  if (lhs != rhs) {
    throw CheckFailure("Set3 density split failed at p = " + std::to_string(p) + ": " +
                       fraction_string(lhs) + " != " + fraction_string(rhs));
  }
  return lhs;
}

// ---- empirical density reports ----

struct DensityReport {
  std::string set_name;
  Rational theoretical;
  std::uint64_t count = 0; // primes observed in the set
  std::uint64_t pi_x = 0;  // primes observed in the window
  std::uint64_t x = 0;

  Rational empirical() const { return pi_x == 0 ? Rational(0) : make_rational(count, pi_x); }
  double deviation() const { return std::abs(to_double(empirical()) - to_double(theoretical)); }
};

struct PrimeSetReport {
  std::vector<std::uint64_t> primes;
  DensityReport density;
  /// For R1: the exact ratio of its density to the full Set1 density (1/2 for p > 3).
  std::optional<Rational> ratio_to_parent_set;
};

namespace detail {
inline PrimeSetReport build_prime_set(std::string name, Rational theoretical,
                                      std::span<const PrimeRecord> records,
                                      const ClassificationSummary& summary, auto&& pred) {
  PrimeSetReport out;
  out.density.set_name = std::move(name);
  out.density.theoretical = std::move(theoretical);
  out.density.pi_x = summary.pi_x;
  out.density.x = summary.x;
  for (const PrimeRecord& rec : records) {
    if (pred(rec)) out.primes.push_back(rec.ell);
  }
  out.density.count = out.primes.size();
  return out;
}
} // namespace detail

/// Set1 primes with a_ell ≡ -(ell+1) (mod p), i.e. the delta = 0 branch of Set1.
/// For p > 3 the exact ratio d(R1) / d(Set1) = 1/2 is also checked.
inline PrimeSetReport build_R1(const AnalysisContext& ctx, const Classification& cls) {
  const std::uint32_t p = ctx.p;
  PrimeSetReport out = detail::build_prime_set(
      "R1", r1_density(p), cls.records, cls.summary, [p](const PrimeRecord& rec) {
        return rec.label == SetLabel::Set1 && (rec.ap_mod_p + (rec.ell + 1)) % p == 0;
      });
  if (p > 3) {
    const Rational ratio = r1_density(p) / set1_density(p);
    if (ratio != Rational(1, 2)) {
      throw CheckFailure("R1/Set1 density ratio is " + fraction_string(ratio) + ", expected 1/2");
    }
    out.ratio_to_parent_set = ratio;
  }
  return out;
}

/// Set3 primes with a_ell !≡ 2 (mod p): delta = 0 at these primes.
inline PrimeSetReport build_R2(const AnalysisContext& ctx, const Classification& cls) {
  return detail::build_prime_set("R2", r2_density(ctx.p), cls.records, cls.summary,
                                 [](const PrimeRecord& rec) {
                                   return rec.label == SetLabel::Set3 && rec.ap_mod_p != 2;
                                 });
}

/// Set3 primes with a_ell ≡ 2 (mod p): the double-root (d = 2) primes.
inline PrimeSetReport build_R_growth(const AnalysisContext& ctx, const Classification& cls) {
  return detail::build_prime_set("R", growth_density(ctx.p), cls.records, cls.summary,
                                 [](const PrimeRecord& rec) {
                                   return rec.label == SetLabel::Set3 && rec.ap_mod_p == 2;
                                 });
}

// ---- level streams under the theorems' exponent caps ----

namespace detail {
inline std::vector<LevelPrime> menu_with_cap(std::span<const std::uint64_t> primes, int cap) {
  std::vector<LevelPrime> menu;
  menu.reserve(primes.size());
  for (std::uint64_t ell : primes) menu.push_back({ell, cap});
  return menu;
}
} // namespace detail

/// Levels M = N * prod r1^a * prod r2^b with a <= 1, b <= 2, M != N, ascending.
/// Requires the bad-prime hypothesis d_ell = 0 and the asserted minimality of
/// lambda(g); every emitted level carries a form with lambda(f) = lambda(g).
inline std::vector<LevelCandidate> stable_levels(const AnalysisContext& ctx, ApCache& cache,
                                                 std::span<const std::uint64_t> r1,
                                                 std::span<const std::uint64_t> r2,
                                                 std::optional<BigInt> max_m,
                                                 bool min_lambda_asserted = true,
                                                 std::size_t max_count = SIZE_MAX) {
  const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, cache);
  if (!hyps.hyp_bad) {
    throw HypothesisViolation("stable_levels: d_ell != 0 at some prime dividing N = " +
                              std::to_string(ctx.form.level));
  }
  if (!min_lambda_asserted) {
    throw HypothesisViolation("stable_levels: minimality of lambda(g) has not been asserted");
  }
  std::vector<LevelPrime> menu = detail::menu_with_cap(r1, 1);
  for (const LevelPrime& lp : detail::menu_with_cap(r2, 2)) menu.push_back(lp);
  LevelStream stream(BigInt(ctx.form.level), std::move(menu), std::move(max_m));
  std::vector<LevelCandidate> out;
  while (out.size() < max_count) {
    auto next = stream.next();
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

/// Levels M = N * prod r^a with a <= 2, M != N, ascending. Requires d_ell = 1
/// at every prime dividing N and mu(g) = 0; every emitted level carries only
/// forms with lambda(f) > lambda(g).
inline std::vector<LevelCandidate> growth_levels(const AnalysisContext& ctx, ApCache& cache,
                                                 std::span<const std::uint64_t> r,
                                                 std::optional<BigInt> max_m,
                                                 std::int64_t mu_g = 0,
                                                 std::size_t max_count = SIZE_MAX) {
  LambdaProfile::make(0, mu_g, ctx.form.label).require_mu_zero();
  const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, cache);
  if (!hyps.hyp_bad_prime) {
    throw HypothesisViolation("growth_levels: d_ell != 1 at some prime dividing N = " +
                              std::to_string(ctx.form.level));
  }
  LevelStream stream(BigInt(ctx.form.level), detail::menu_with_cap(r, 2), std::move(max_m));
  std::vector<LevelCandidate> out;
  while (out.size() < max_count) {
    auto next = stream.next();
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

// ---- verdicts ----

enum class VerdictMode : std::uint8_t { Stable, Growth };

inline const char* to_string(VerdictMode mode) {
  return mode == VerdictMode::Stable ? "stable" : "growth";
}

struct HypothesisFlags {
  bool optimal_assumed = true; // standing assumption on the input form
  bool mu_zero = false;
  bool min_lambda = false;
  bool bad = false;       // d_ell = 0 at all ell | N
  bool bad_prime = false; // d_ell = 1 at all ell | N
};

struct StabilityVerdict {
  VerdictMode mode = VerdictMode::Stable;
  HypothesisFlags hypotheses;
  std::vector<std::uint64_t> primes; // qualifying primes in the window
  DensityReport density;             // combined R1+R2 (stable) or R (growth)
  std::vector<PrimeSetReport> components; // per-set detail (R1, R2) or (R)
  std::vector<LocalFactor> bad_primes;
  std::vector<LevelCandidate> sample_levels;
  std::int64_t lambda_g = 0;
  InvariantSign lambda_sign = InvariantSign::Ordinary;
  double tolerance = 0.02;

  bool within_tolerance() const { return density.deviation() <= tolerance; }
};

struct AnalyzeOptions {
  VerdictMode mode = VerdictMode::Stable;
  std::int64_t lambda_g = 0;
  std::int64_t mu_g = 0;
  InvariantSign sign = InvariantSign::Ordinary;
  /// Minimality of lambda(g) cannot be machine-verified; it defaults to
  /// asserted when lambda_g = 0 and can be forced with assume_min_lambda.
  bool assume_min_lambda = false;
  std::optional<BigInt> max_m;
  std::size_t sample_limit = 10;
  double tolerance = 0.02;
};

/// Full pipeline: classify the window, build the theorem's prime sets, check
/// the hypotheses, and stream sample levels. Throws HypothesisViolation when
/// the requested mode's hypotheses fail.
inline StabilityVerdict analyze(const AnalysisContext& ctx, ApCache& cache,
                                const AnalyzeOptions& options) {
  LambdaProfile profile =
      LambdaProfile::make(options.lambda_g, options.mu_g, ctx.form.label, options.sign);
  profile.require_mu_zero();

  const Classification cls = classify_all(ctx, cache);
  const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, cache);

  StabilityVerdict verdict;
  verdict.mode = options.mode;
  verdict.lambda_g = options.lambda_g;
  verdict.lambda_sign = options.sign;
  verdict.tolerance = options.tolerance;
  verdict.bad_primes = hyps.factors;
  verdict.hypotheses.mu_zero = options.mu_g == 0;
  verdict.hypotheses.min_lambda = options.assume_min_lambda || options.lambda_g == 0;
  verdict.hypotheses.bad = hyps.hyp_bad;
  verdict.hypotheses.bad_prime = hyps.hyp_bad_prime;

  if (options.mode == VerdictMode::Stable) {
    PrimeSetReport r1 = build_R1(ctx, cls);
    PrimeSetReport r2 = build_R2(ctx, cls);
    verdict.density = DensityReport{"R1+R2", stable_density(ctx.p), r1.density.count + r2.density.count,
                                    cls.summary.pi_x, ctx.x};
    verdict.primes = r1.primes;
    verdict.primes.insert(verdict.primes.end(), r2.primes.begin(), r2.primes.end());
    std::sort(verdict.primes.begin(), verdict.primes.end());
    verdict.sample_levels = stable_levels(ctx, cache, r1.primes, r2.primes, options.max_m,
                                          verdict.hypotheses.min_lambda, options.sample_limit);
    verdict.components = {std::move(r1), std::move(r2)};
  } else {
    PrimeSetReport r = build_R_growth(ctx, cls);
    verdict.density = r.density;
    verdict.primes = r.primes;
    verdict.sample_levels =
        growth_levels(ctx, cache, r.primes, options.max_m, options.mu_g, options.sample_limit);
    verdict.components = {std::move(r)};
  }
  return verdict;
}

inline nlohmann::json level_json(const LevelCandidate& level) {
  nlohmann::json exps = nlohmann::json::object();
  for (auto [ell, e] : level.exponents) exps[std::to_string(ell)] = e;
  return nlohmann::json{{"M", level.M.str()}, {"exponents", exps}};
}

inline nlohmann::json density_report_json(const DensityReport& report) {
  return nlohmann::json{
      {"set", report.set_name},
      {"theoretical", fraction_string(report.theoretical)},
      {"theoretical_decimal", to_double(report.theoretical)},
      {"empirical", std::to_string(report.count) + "/" + std::to_string(report.pi_x)},
      {"empirical_decimal", to_double(report.empirical())},
      {"deviation", report.deviation()},
      {"x", report.x},
  };
}

inline nlohmann::json verdict_json(const StabilityVerdict& verdict) {
  nlohmann::json components = nlohmann::json::array();
  for (const PrimeSetReport& c : verdict.components) {
    nlohmann::json entry = density_report_json(c.density);
    if (c.ratio_to_parent_set) {
      entry["ratio_to_parent_set"] = fraction_string(*c.ratio_to_parent_set);
    }
    components.push_back(entry);
  }
  nlohmann::json levels = nlohmann::json::array();
  for (const LevelCandidate& level : verdict.sample_levels) levels.push_back(level_json(level));
  return nlohmann::json{
      {"mode", to_string(verdict.mode)},
      {"hypotheses",
       {{"optimal_assumed", verdict.hypotheses.optimal_assumed},
        {"mu_zero", verdict.hypotheses.mu_zero},
        {"min_lambda", verdict.hypotheses.min_lambda},
        {"bad", verdict.hypotheses.bad},
        {"bad_prime", verdict.hypotheses.bad_prime}}},
      {"lambda_g", verdict.lambda_g},
      {"lambda_sign", to_string(verdict.lambda_sign)},
      {"primes", verdict.primes},
      {"density", density_report_json(verdict.density)},
      {"components", components},
      {"bad_primes", local_factors_json(verdict.bad_primes)},
      {"sample_levels", levels},
      {"tolerance", verdict.tolerance},
      {"within_tolerance", verdict.within_tolerance()},
      {"certificate", verdict.mode == VerdictMode::Stable
                          ? "some form at each listed level has lambda(f) = lambda(g)"
                          : "every form at each listed level has lambda(f) > lambda(g)"},
  };
}

} // namespace lamvar
