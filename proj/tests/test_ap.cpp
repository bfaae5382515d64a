#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lamvar/ap.hpp"
#include "lamvar/curves.hpp"
#include "lamvar/primes.hpp"

#include "test_util.hpp"

using namespace lamvar;

namespace {

FormSpec curve_form(const std::string& label) {
  auto form = registry_lookup(label);
  REQUIRE(form.has_value());
  return *form;
}

} // namespace

TEST_CASE("registry curves are nonsingular with the right levels") {
  CHECK(curve_form("11a1").level == 11);
  CHECK(curve_form("43a1").level == 43);
  CHECK(curve_form("53a1").level == 53);
  CHECK_FALSE(registry_lookup("37a1").has_value());
  CHECK(curve_form("11a1").curve().discriminant() == -161051); // -11^5
  CHECK_THROWS_AS(FormSpec::from_curve({0, 0, 0, 0, 0}, 1, "cusp"), std::invalid_argument);
}

TEST_CASE("count_ap at the bad primes of the worked curves") {
  CHECK(count_ap(curve_form("11a1").curve(), 11) == 1);  // split multiplicative
  CHECK(count_ap(curve_form("43a1").curve(), 43) == -1); // non-split multiplicative
  const std::int64_t a53 = count_ap(curve_form("53a1").curve(), 53);
  CHECK(a53 >= -1);
  CHECK(a53 <= 1);
  CHECK(a53 == -1);
}

TEST_CASE("count_ap at small good primes of 11a1") {
  const WeierstrassCurve curve = curve_form("11a1").curve();
  CHECK(count_ap(curve, 2) == -2);
  CHECK(count_ap(curve, 3) == -1);
  CHECK(count_ap(curve, 5) == 1);
  CHECK(count_ap(curve, 7) == -2);
  CHECK(count_ap(curve, 13) == 4);
  CHECK(count_ap(curve, 19) == 0);
  CHECK_THROWS_AS(count_ap(curve, 4), std::invalid_argument);
}

TEST_CASE("character-sum count agrees with the naive oracle for ell <= 50") {
  for (const char* label : {"11a1", "43a1", "53a1"}) {
    const WeierstrassCurve curve = curve_form(label).curve();
    for (std::uint32_t ell : primes_below(51)) {
      CAPTURE(label);
      CAPTURE(ell);
      CHECK(count_ap(curve, ell) == lamvar_test::ap_oracle(curve, ell));
    }
  }
}

TEST_CASE("get_ap memoizes and errors on table gaps") {
  FormSpec form = curve_form("11a1");
  ApCache cache;
  CHECK(get_ap(form, 2, cache) == -2);
  CHECK(get_ap(form, 19, cache) == 0);
  CHECK(cache.size() == 2);
  CHECK(get_ap(form, 2, cache) == -2);
  CHECK(cache.size() == 2);

  // Table-backed form: a missing prime is an error, not a recount.
  FormSpec table = FormSpec::from_table("unused.csv", 11, "table");
  ApCache partial;
  partial.insert(2, -2, ApProvenance::ingested);
  CHECK(get_ap(table, 2, partial) == -2);
  CHECK_THROWS_AS(get_ap(table, 97, partial), MissingCoefficient);
  try {
    get_ap(table, 97, partial);
  } catch (const MissingCoefficient& e) {
    CHECK(e.ell() == 97);
  }
}

TEST_CASE("bulk_ap fills every prime below x and is idempotent") {
  FormSpec form = curve_form("11a1");
  ApCache cache;
  bulk_ap(form, 100, cache);
  CHECK(cache.size() == 25);
  for (const auto& [ell, entry] : cache) {
    if (ell == 11) continue;
    CHECK(double(entry.ap) * entry.ap <= 4.0 * ell); // Hasse bound off the level
  }
  bulk_ap(form, 100, cache);
  CHECK(cache.size() == 25);

  ApCache empty;
  bulk_ap(form, 2, empty);
  CHECK(empty.empty());

  ApCache c43;
  bulk_ap(curve_form("43a1"), 50, c43);
  CHECK(c43.find(43) == -1);
}

TEST_CASE("cache CSV round-trips byte for byte") {
  FormSpec form = curve_form("43a1");
  ApCache cache;
  bulk_ap(form, 200, cache);

  std::ostringstream first;
  cache.write_csv(first);
  std::istringstream in(first.str());
  const ApCache reread = ApCache::read_csv(in);
  std::ostringstream second;
  reread.write_csv(second);
  CHECK(first.str() == second.str());
  CHECK(first.str().substr(0, 7) == "ell,ap\n");
}

TEST_CASE("cache CSV rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return ApCache::read_csv(in);
  };
  CHECK_THROWS(parse(""));
  CHECK_THROWS(parse("l,ap\n2,-2\n"));
  CHECK_THROWS(parse("ell,ap\n4,1\n"));        // not prime
  CHECK_THROWS(parse("ell,ap\n5,1\n3,0\n"));   // not ascending
  CHECK_THROWS(parse("ell,ap\n5,1\n5,1\n"));   // duplicate
  CHECK_THROWS(parse("ell,ap\n5\n"));          // missing column
  CHECK_THROWS(parse("ell,ap\n-5,1\n"));       // ell must be unsigned
  CHECK_NOTHROW(parse("ell,ap\n2,-2\n3,-1\n"));
}

TEST_CASE("bulk_ap is deterministic across thread counts") {
  FormSpec form = curve_form("53a1");
  ApCache serial, parallel;
  bulk_ap(form, 3000, serial, 1);
  bulk_ap(form, 3000, parallel, 4);
  std::ostringstream a, b;
  serial.write_csv(a);
  parallel.write_csv(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("table-backed bulk_ap propagates MissingCoefficient") {
  FormSpec table = FormSpec::from_table("unused.csv", 11, "table");
  ApCache cache;
  cache.insert(2, -2, ApProvenance::ingested);
  CHECK_THROWS_AS(bulk_ap(table, 10, cache), MissingCoefficient);
}
