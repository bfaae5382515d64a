#include "doctest.h"

#include <vector>

#include "lamvar/local.hpp"

#include "test_util.hpp"

using namespace lamvar;

namespace {

// Oracle for the root multiplicity of P(X) = ell - a X + X^2 at X = 1:
// evaluate P(1) and P'(1) mod p directly.
int multiplicity_oracle(std::uint32_t p, std::uint64_t ell, std::int64_t ap) {
  const std::uint32_t p1 = static_cast<std::uint32_t>((ell % p + p - mod_p(ap, p) + 1) % p);
  if (p1 != 0) return 0;
  const std::uint32_t dp1 = (2 + p - mod_p(ap, p) % p) % p; // P'(1) = 2 - a
  return dp1 == 0 ? 2 : 1;
}

} // namespace

TEST_CASE("s_factor worked values") {
  CHECK(s_factor(5, 11) == 1);  // (11^4 - 1)/5 = 2928, v_5 = 0
  CHECK(s_factor(3, 17) == 3);  // (17^2 - 1)/3 = 96, v_3 = 1
  CHECK(s_factor(3, 2) == 1);   // (4 - 1)/3 = 1
  CHECK(s_factor(11, 3) == 11); // 3^10 = 1 mod 11^2
  CHECK_THROWS_AS(s_factor(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(s_factor(5, 6), std::invalid_argument);
}

TEST_CASE("s_factor is 1 exactly when ell^(p-1) != 1 mod p^2") {
  for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u}) {
    for (std::uint32_t ell : primes_below(200)) {
      if (ell == p) continue;
      // Direct modular exponentiation mod p^2.
      const std::uint64_t p2 = std::uint64_t(p) * p;
      std::uint64_t acc = 1, base = ell % p2;
      for (std::uint32_t e = 0; e < p - 1; ++e) acc = acc * base % p2;
      CAPTURE(p);
      CAPTURE(ell);
      CHECK((s_factor(p, ell) == 1) == (acc != 1));
    }
  }
}

TEST_CASE("d_factor_good worked values") {
  CHECK(d_factor_good(7, 5, 1) == 0);  // 1 + 5 = 6 != 1 mod 7
  CHECK(d_factor_good(11, 23, 2) == 2); // 23 = 1 and 24 = 2 mod 11
  CHECK(d_factor_good(7, 29, 2) == 2);  // 29 = 1 mod 7, 30 = 2 mod 7
  CHECK(d_factor_good(7, 29, 3) == 0);
  CHECK(d_factor_good(7, 5, -1) == 1);  // a = 6 = 1 + 5, 5 != 1 mod 7: simple root
  CHECK_THROWS_AS(d_factor_good(7, 7, 0), std::invalid_argument);
}

TEST_CASE("d_factor_good agrees with the derivative oracle everywhere") {
  for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u}) {
    for (std::uint32_t ell : primes_below(101)) {
      if (ell == p) continue;
      for (std::uint32_t a = 0; a < p; ++a) {
        CAPTURE(p);
        CAPTURE(ell);
        CAPTURE(a);
        CHECK(d_factor_good(p, ell, a) == multiplicity_oracle(p, ell, a));
      }
    }
  }
}

TEST_CASE("d_factor_bad worked values") {
  CHECK(d_factor_bad(11, 43, -1) == 1); // -1 = 43 mod 11
  CHECK(d_factor_bad(13, 11, 1) == 0);  // 1 != 11 mod 13
  CHECK(d_factor_bad(5, 11, 1) == 1);   // 11 = 1 mod 5
}

TEST_CASE("delta vanishes exactly when d vanishes") {
  FormSpec form = *registry_lookup("11a1");
  ApCache cache;
  for (std::uint32_t ell : primes_below(100)) {
    for (std::uint32_t p : {3u, 5u, 7u, 13u}) {
      if (ell == p || form.level % p == 0) continue;
      const LocalFactor lf = local_factor(p, form, ell, get_ap(form, ell, cache));
      CHECK((lf.delta == 0) == (lf.d == 0));
      CHECK(lf.delta == lf.s * lf.d);
      CHECK(lf.role == (ell == 11 ? LocalRole::OldPrime : LocalRole::NewPrime));
    }
  }
}

TEST_CASE("check_bad_hypotheses on the worked curves") {
  ApCache cache;
  {
    const AnalysisContext ctx = make_context(7, *registry_lookup("11a1"), 100);
    const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, cache);
    CHECK(hyps.hyp_bad);
    CHECK_FALSE(hyps.hyp_bad_prime);
    REQUIRE(hyps.factors.size() == 1);
    CHECK(hyps.factors[0].ell == 11);
    CHECK(hyps.factors[0].d == 0);
  }
  {
    ApCache c43;
    const AnalysisContext ctx = make_context(11, *registry_lookup("43a1"), 100);
    const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, c43);
    CHECK(hyps.hyp_bad_prime);
    CHECK_FALSE(hyps.hyp_bad);
    CHECK(hyps.factors[0].d == 1);
  }
  {
    ApCache c53;
    const AnalysisContext ctx = make_context(3, *registry_lookup("53a1"), 100);
    const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, c53);
    CHECK(hyps.hyp_bad_prime);
  }
  {
    ApCache c11;
    const AnalysisContext ctx = make_context(13, *registry_lookup("11a1"), 100);
    const BadPrimeHypotheses hyps = check_bad_hypotheses(ctx, c11);
    CHECK(hyps.hyp_bad);
    CHECK(hyps.factors[0].d == 0);
  }
}

namespace {

LocalFactor factor_with_delta(std::uint64_t ell, int delta) {
  LocalFactor lf;
  lf.ell = ell;
  lf.s = delta == 0 ? 1 : delta;
  lf.d = delta == 0 ? 0 : 1;
  lf.delta = delta;
  return lf;
}

} // namespace

TEST_CASE("lambda_transfer worked values") {
  const LambdaProfile g0 = LambdaProfile::make(0, 0, "g");
  std::vector<LocalFactor> none_g = {factor_with_delta(5, 0)};
  std::vector<LocalFactor> none_f = {factor_with_delta(5, 0)};
  const TransferResult r0 = lambda_transfer(g0, none_g, none_f);
  CHECK(r0.lambda_f == 0);
  CHECK_FALSE(r0.growth);

  std::vector<LocalFactor> two_g = {factor_with_delta(5, 2)};
  const TransferResult r2 = lambda_transfer(g0, two_g, none_f);
  CHECK(r2.lambda_f == 2);
  CHECK(r2.growth);

  const LambdaProfile g1 = LambdaProfile::make(1, 0, "g");
  std::vector<LocalFactor> one_g = {factor_with_delta(5, 1)};
  std::vector<LocalFactor> three_f = {factor_with_delta(5, 3)};
  CHECK_THROWS_AS(lambda_transfer(g1, one_g, three_f), NegativeLambda);
}

TEST_CASE("lambda_transfer rejects mu != 0 and mismatched prime sets") {
  CHECK_THROWS_AS(LambdaProfile::make(-1, 0, "g"), std::invalid_argument);
  const LambdaProfile bad_mu = LambdaProfile::make(0, 1, "g");
  std::vector<LocalFactor> fs = {factor_with_delta(5, 0)};
  CHECK_THROWS_AS(lambda_transfer(bad_mu, fs, fs), HypothesisViolation);

  const LambdaProfile g = LambdaProfile::make(0, 0, "g");
  std::vector<LocalFactor> other = {factor_with_delta(7, 0)};
  CHECK_THROWS_AS(lambda_transfer(g, fs, other), std::invalid_argument);
}

TEST_CASE("lambda_transfer round-trips under list swap") {
  lamvar_test::Rng rng(7115);
  for (int iter = 0; iter < 200; ++iter) {
    const std::int64_t lambda_g = static_cast<std::int64_t>(rng.below(10));
    std::vector<LocalFactor> dg, df;
    BigInt sum_g = 0, sum_f = 0;
    const std::size_t n = 1 + rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t ell = 100 * i + 3;
      const int delta_g = static_cast<int>(rng.below(4));
      dg.push_back(factor_with_delta(ell, delta_g));
      sum_g += delta_g;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t ell = 100 * i + 3;
      // keep lambda_f nonnegative: bound each delta_f by what is left
      const BigInt budget = BigInt(lambda_g) + sum_g - sum_f;
      const int cap = budget > 3 ? 3 : budget.convert_to<int>();
      const int delta_f = cap > 0 ? static_cast<int>(rng.below(cap + 1)) : 0;
      df.push_back(factor_with_delta(ell, delta_f));
      sum_f += delta_f;
    }
    const TransferResult fwd = lambda_transfer(LambdaProfile::make(lambda_g, 0, "g"), dg, df);
    REQUIRE(fwd.lambda_f >= 0);
    const TransferResult back = lambda_transfer(
        LambdaProfile::make(fwd.lambda_f.convert_to<std::int64_t>(), 0, "f"), df, dg);
    CHECK(back.lambda_f == lambda_g);
    CHECK(fwd.growth == (fwd.sum_delta_g > fwd.sum_delta_f));
  }
}

TEST_CASE("delta bounds at a hypothetical new prime") {
  const auto [lo, hi] = delta_bounds_new_prime(3, 17);
  CHECK(lo == 0);
  CHECK(hi == 3);
  const auto [lo2, hi2] = delta_bounds_new_prime(5, 11);
  CHECK(lo2 == 0);
  CHECK(hi2 == 1);
}

TEST_CASE("local factor JSON shape") {
  FormSpec form = *registry_lookup("43a1");
  ApCache cache;
  const LocalFactor lf = local_factor(11, form, 43, get_ap(form, 43, cache));
  const nlohmann::json j = local_factor_json(lf);
  CHECK(j["ell"] == 43);
  CHECK(j["s"] == "1");
  CHECK(j["d"] == 1);
  CHECK(j["delta"] == "1");
  CHECK(j["role"] == "old");
}
