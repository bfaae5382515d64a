#include "doctest.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "lamvar/carayol.hpp"

#include "test_util.hpp"

using namespace lamvar;

namespace {

AnalysisContext ctx_11a1_p7(std::uint64_t x) {
  return make_context(7, *registry_lookup("11a1"), x);
}

// Oracle: enumerate every admissible exponent tuple with an odometer and
// collect the resulting levels. Independent of LevelStream.
std::set<BigInt> level_oracle(BigInt base, const std::vector<LevelPrime>& menu,
                              std::optional<BigInt> max_m) {
  std::vector<int> exps(menu.size(), 0);
  std::set<BigInt> out;
  for (;;) {
    BigInt m = base;
    for (std::size_t i = 0; i < menu.size(); ++i) {
      for (int e = 0; e < exps[i]; ++e) m *= menu[i].ell;
    }
    if (m != base && (!max_m || m <= *max_m)) out.insert(m);
    std::size_t i = 0;
    while (i < menu.size()) {
      if (exps[i] < menu[i].max_exp) {
        ++exps[i];
        break;
      }
      exps[i] = 0;
      ++i;
    }
    if (i == menu.size()) break;
  }
  return out;
}

} // namespace

TEST_CASE("context validation") {
  CHECK_THROWS_AS(make_context(11, *registry_lookup("11a1"), 100), std::invalid_argument); // p | N
  CHECK_THROWS_AS(make_context(9, *registry_lookup("11a1"), 100), std::invalid_argument);
  CHECK_NOTHROW(make_context(3, *registry_lookup("11a1"), 100));
}

TEST_CASE("classify_prime worked examples for 11a1, p = 7") {
  const AnalysisContext ctx = ctx_11a1_p7(100);
  // a_5 = 1 and -(1+5) = -6 = 1 mod 7.
  CHECK(classify_prime(ctx, 5, 1).label == SetLabel::Set1);
  // 13 = -1 mod 7 and a_13 = 4 != 0 mod 7.
  CHECK(classify_prime(ctx, 13, 4).label == SetLabel::Set2Prime);
  // 29 = 1 mod 7.
  CHECK(classify_prime(ctx, 29, 0).label == SetLabel::Set3);
  CHECK(classify_prime(ctx, 7, -2).label == SetLabel::IsP);
  CHECK(classify_prime(ctx, 11, 1).label == SetLabel::DividesN);

  const PrimeRecord rec = classify_prime(ctx, 5, 1);
  CHECK(rec.ell_mod_p == 5);
  CHECK(rec.ap_mod_p == 1);
}

TEST_CASE("classify_all on the window x = 20") {
  const AnalysisContext ctx = ctx_11a1_p7(20);
  ApCache cache;
  const Classification cls = classify_all(ctx, cache);
  CHECK(cls.summary.pi_x == 8);
  CHECK(cls.summary.s1 == 1); // ell = 5
  CHECK(cls.summary.s2 == 0);
  CHECK(cls.summary.s3 == 0);
  CHECK(cls.summary.s1_prime == 4); // 2, 3, 17, 19
  CHECK(cls.summary.s2_prime == 1); // 13
  CHECK(cls.summary.divides_n == 1);
  CHECK(cls.summary.is_p == 1);

  for (const PrimeRecord& rec : cls.records) {
    if (rec.ell == 5) CHECK(rec.label == SetLabel::Set1);
  }
}

TEST_CASE("classify_all on the window x = 3") {
  const AnalysisContext ctx = ctx_11a1_p7(3);
  ApCache cache;
  const Classification cls = classify_all(ctx, cache);
  REQUIRE(cls.records.size() == 1);
  CHECK(cls.records[0].ell == 2);
  CHECK(cls.records[0].ap == -2);
  CHECK(cls.records[0].label == SetLabel::Set1Prime); // a_2 = 5, targets {3, 4} mod 7
}

TEST_CASE("label counts always partition pi(x)") {
  for (std::uint64_t x : {2ull, 3ull, 20ull, 500ull, 2000ull}) {
    const AnalysisContext ctx = ctx_11a1_p7(x);
    ApCache cache;
    const ClassificationSummary s = classify_all(ctx, cache).summary;
    CHECK(s.s1 + s.s1_prime + s.s2 + s.s2_prime + s.s3 + s.divides_n + s.is_p == s.pi_x);
    CHECK(s.pi_x == prime_count_below(x));
  }
}

TEST_CASE("count_levels closed form") {
  ClassificationSummary s;
  s.s1 = 1;
  CHECK(count_levels(s) == 1);
  s.s1 = 0;
  CHECK(count_levels(s) == 0);
  s.s1 = 2;
  s.s2 = 1;
  s.s3 = 1;
  CHECK(count_levels(s) == 35); // 2^2 * 3^2 - 1

  // Large windows exceed any machine word.
  s.s1 = 200;
  s.s2 = 100;
  s.s3 = 0;
  CHECK(count_levels(s) == pow_bigint(2, 200) * pow_bigint(3, 100) - 1);
}

TEST_CASE("enumerate_levels on the x = 20 window matches the exponent-tuple oracle") {
  const AnalysisContext ctx = ctx_11a1_p7(20);
  ApCache cache;
  const Classification cls = classify_all(ctx, cache);

  const auto levels = enumerate_levels(ctx, cls.records, BigInt(600));
  // ell = 5 is Set1, so only alpha = 1 is admissible: the unique level is 55.
  REQUIRE(levels.size() == 1);
  CHECK(levels[0].M == 55);
  REQUIRE(levels[0].exponents.size() == 1);
  CHECK(levels[0].exponents[0] == std::pair<std::uint64_t, int>{5, 1});

  const auto oracle = level_oracle(BigInt(11), level_menu(cls.records), BigInt(600));
  CHECK(oracle == std::set<BigInt>{BigInt(55)});
}

TEST_CASE("enumerate_levels with max_M = N is empty") {
  const AnalysisContext ctx = ctx_11a1_p7(20);
  ApCache cache;
  const Classification cls = classify_all(ctx, cache);
  CHECK(enumerate_levels(ctx, cls.records, BigInt(11)).empty());
}

TEST_CASE("Set2 primes admit both exponents") {
  // Synthetic records: a Set2 prime (ell = 13, a = 0 mod 7) and a Set1 prime.
  const AnalysisContext ctx = ctx_11a1_p7(20);
  std::vector<PrimeRecord> records = {
      classify_prime(ctx, 13, 7), // 13 = -1 mod 7, a = 0 mod 7 -> Set2
      classify_prime(ctx, 5, 1),  // Set1
  };
  REQUIRE(records[0].label == SetLabel::Set2);

  const auto levels = enumerate_levels(ctx, records, std::nullopt);
  std::set<BigInt> got;
  for (const auto& lc : levels) got.insert(lc.M);
  // 11 * {5, 13, 13^2, 5*13, 5*13^2}
  CHECK(got == std::set<BigInt>{BigInt(55), BigInt(143), BigInt(715), BigInt(1859), BigInt(9295)});
  CHECK(levels.size() == 5); // 2^1 * 3^1 - 1
}

TEST_CASE("streamed level count equals the closed form on real windows") {
  for (std::uint64_t x : {20ull, 40ull, 60ull}) {
    const AnalysisContext ctx = ctx_11a1_p7(x);
    ApCache cache;
    const Classification cls = classify_all(ctx, cache);
    const auto levels = enumerate_levels(ctx, cls.records, std::nullopt);
    CHECK(BigInt(levels.size()) == count_levels(cls.summary));

    const auto oracle = level_oracle(BigInt(11), level_menu(cls.records), std::nullopt);
    CHECK(oracle.size() == levels.size());

    // Ascending, duplicate-free, divisible by N, coprime to p.
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (i > 0) CHECK(levels[i - 1].M < levels[i].M);
      CHECK(levels[i].M % 11 == 0);
      CHECK(levels[i].M % 7 != 0);
      CHECK(oracle.count(levels[i].M) == 1);
    }
  }
}

TEST_CASE("classification CSV export") {
  const AnalysisContext ctx = ctx_11a1_p7(8);
  ApCache cache;
  const Classification cls = classify_all(ctx, cache);
  std::ostringstream os;
  write_classification_csv(cls, os);
  CHECK(os.str() ==
        "ell,ap,ell_mod_p,ap_mod_p,label\n"
        "2,-2,2,5,Set1Prime\n"
        "3,-1,3,6,Set1Prime\n"
        "5,1,5,1,Set1\n"
        "7,-2,0,5,IsP\n");
}

TEST_CASE("summary JSON carries exact fractions and decimals") {
  const AnalysisContext ctx = ctx_11a1_p7(20);
  ApCache cache;
  const Classification cls = classify_all(ctx, cache);
  const nlohmann::json j = summary_json(cls.summary);
  CHECK(j["pi_x"] == 8);
  CHECK(j["counts"]["set1"] == 1);
  CHECK(j["empirical_densities"]["Set1"]["fraction"] == "1/8");
  CHECK(j["empirical_densities"]["Set1"]["decimal"] == doctest::Approx(0.125));
  CHECK(j["raised_level_count"] == "1");
}
