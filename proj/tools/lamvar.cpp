/**
 * @file lamvar.cpp
 * @brief CLI: GL2 conjugacy census, Carayol prime classification, and
 *        lambda-stability / growth analysis for congruent weight-2 forms.
 *
 * Exit codes: 0 success, 1 hypothesis or validation failure, 2 I/O or
 * configuration error.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lamvar/ap.hpp"
#include "lamvar/carayol.hpp"
#include "lamvar/census.hpp"
#include "lamvar/curves.hpp"
#include "lamvar/errors.hpp"
#include "lamvar/local.hpp"
#include "lamvar/stability.hpp"
#include "lamvar/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

nlohmann::json tool_json() {
  return nlohmann::json{{"name", lamvar::kToolName}, {"version", lamvar::kToolVersion}};
}

void emit(const nlohmann::json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + out_path);
  os << doc.dump(2) << "\n";
}

struct FormOptions {
  std::string curve;       // registry label or "a1,a2,a3,a4,a6"
  std::string table;       // coefficient CSV path
  std::uint64_t level = 0; // N; required for explicit coefficients and tables

  void attach(CLI::App& cmd) {
    cmd.add_option("--curve", curve,
                   "curve: registry label (11a1, 43a1, 53a1) or a1,a2,a3,a4,a6");
    cmd.add_option("--table", table, "coefficient table CSV (header ell,ap)");
    cmd.add_option("--N", level, "level N of the form");
  }

  lamvar::FormSpec resolve() const {
    if (!table.empty()) {
      if (level == 0) throw std::invalid_argument("--table requires --N");
      return lamvar::FormSpec::from_table(table, level, "table:" + table);
    }
    if (curve.empty()) throw std::invalid_argument("one of --curve or --table is required");

    std::string label = curve;
    if (label.size() > 7 && label.ends_with("-coeffs")) label.resize(label.size() - 7);
    if (auto hit = lamvar::registry_lookup(label)) {
      if (level != 0 && level != hit->level) {
        throw std::invalid_argument("--N disagrees with the registry level of " + label);
      }
      return *hit;
    }

    std::vector<std::int64_t> a;
    std::stringstream ss(curve);
    std::string piece;
    while (std::getline(ss, piece, ',')) a.push_back(std::stoll(piece));
    if (a.size() != 5) {
      throw std::invalid_argument("--curve expects a registry label or five integers a1,a2,a3,a4,a6");
    }
    if (level == 0) throw std::invalid_argument("explicit coefficients require --N");
    return lamvar::FormSpec::from_curve({a[0], a[1], a[2], a[3], a[4]}, level, "custom");
  }
};

std::string default_cache_path(const lamvar::FormSpec& form) {
  const char* dir = std::getenv("LAMVAR_CACHE_DIR");
  if (!dir || !*dir || form.label.empty() || form.label == "custom" ||
      form.label.starts_with("table:")) {
    return {};
  }
  return (std::filesystem::path(dir) / (form.label + ".csv")).string();
}

lamvar::ApCache load_cache(const lamvar::FormSpec& form, const std::string& explicit_path,
                           std::string& effective_path) {
  effective_path = explicit_path.empty() ? default_cache_path(form) : explicit_path;
  if (!form.is_curve()) {
    // Table sources: the table itself is the coefficient store.
    return lamvar::ApCache::read_csv_file(form.table().path);
  }
  if (!effective_path.empty() && std::filesystem::exists(effective_path)) {
    return lamvar::ApCache::read_csv_file(effective_path);
  }
  return {};
}

void store_cache(const lamvar::ApCache& cache, const lamvar::FormSpec& form,
                 const std::string& effective_path) {
  if (form.is_curve() && !effective_path.empty()) cache.write_csv_file(effective_path);
}

// ---- census ----

struct CensusArgs {
  std::uint32_t p = 0;
  std::uint32_t bound = lamvar::kDefaultCensusBound;
  std::string export_path;
  std::string out_path;
  std::string format = "text";
};

int run_census(const CensusArgs& args) {
  const lamvar::Census census = lamvar::enumerate_census(args.p, args.bound);
  const lamvar::ClassSizeReport sizes = lamvar::class_size_check(census);

  bool all_pass = sizes.all_ok();
  nlohmann::json checks = nlohmann::json::array();
  auto record = [&](const std::string& name, const lamvar::Rational& value, bool pass) {
    checks.push_back({{"name", name},
                      {"value", lamvar::fraction_string(value)},
                      {"decimal", lamvar::to_double(value)},
                      {"pass", pass}});
    all_pass = all_pass && pass;
  };

  // The density accessors throw CheckFailure on any closed-form mismatch, so
  // reaching the record() call means the check passed.
  record("trace_zero", lamvar::density_trace_zero(census), true);
  lamvar::Rational nonzero(0);
  bool nonzero_uniform = true;
  for (std::uint32_t a = 1; a < args.p; ++a) {
    const lamvar::Rational v = lamvar::density_trace_nonzero(census, a);
    if (a == 1) nonzero = v;
    else nonzero_uniform = nonzero_uniform && v == nonzero;
  }
  record("trace_nonzero", nonzero, nonzero_uniform);
  record("trace_linked_plus", lamvar::density_trace_det_linked(census, +1), true);
  record("trace_linked_minus", lamvar::density_trace_det_linked(census, -1), true);

  const lamvar::Rational unit =
      lamvar::density_trace_zero(census) +
      lamvar::Rational(args.p - 1) * lamvar::density_trace_nonzero(census, 1);
  record("unit_sum", unit, unit == lamvar::Rational(1));

  if (!args.export_path.empty()) {
    std::ofstream os(args.export_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + args.export_path);
    lamvar::write_census_csv(census, os);
  }

  nlohmann::json doc = {
      {"tool", tool_json()},
      {"config",
       {{"command", "census"},
        {"p", args.p},
        {"bound", args.bound},
        {"export", args.export_path},
        {"format", args.format}}},
      {"group_order", census.counts.group_order},
      {"checks", checks},
      {"class_sizes",
       {{"split", {{"size", sizes.split_size}, {"classes", sizes.split_classes}, {"pass", sizes.split_ok}}},
        {"nondiagonal_repeated",
         {{"size", sizes.nondiag_size}, {"classes", sizes.nondiag_classes}, {"pass", sizes.nondiag_ok}}},
        {"central", {{"size", sizes.central_size}, {"classes", sizes.central_classes}, {"pass", sizes.central_ok}}},
        {"irreducible",
         {{"size", sizes.irreducible_size}, {"classes", sizes.irreducible_classes}, {"pass", sizes.irreducible_ok}}},
        {"total", {{"pass", sizes.total_ok}}}}},
      {"all_pass", all_pass},
  };

  if (args.format == "json") {
    emit(doc, args.out_path);
  } else {
    std::cout << "GL2(F_" << args.p << ") census: group order " << census.counts.group_order << "\n";
    for (const auto& check : doc["checks"]) {
      std::cout << "  " << check["name"].get<std::string>() << " = "
                << check["value"].get<std::string>() << "  "
                << (check["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
    }
    std::cout << "  class sizes: split " << sizes.split_size << ", repeated " << sizes.nondiag_size
              << ", central " << sizes.central_size << ", irreducible " << sizes.irreducible_size
              << "  " << (sizes.all_ok() ? "PASS" : "FAIL") << "\n";
    std::cout << (all_pass ? "all checks PASS" : "some checks FAIL") << "\n";
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ---- classify ----

struct ClassifyArgs {
  std::uint32_t p = 0;
  FormOptions form;
  std::uint64_t x = 100000;
  std::string export_path;
  std::string cache_path;
  std::string out_path;
  std::string format = "json";
  unsigned threads = std::thread::hardware_concurrency();
};

int run_classify(const ClassifyArgs& args) {
  const lamvar::FormSpec form = args.form.resolve();
  const lamvar::AnalysisContext ctx = lamvar::make_context(args.p, form, args.x);
  std::string cache_path;
  lamvar::ApCache cache = load_cache(form, args.cache_path, cache_path);
  lamvar::bulk_ap(form, args.x, cache, args.threads == 0 ? 1 : args.threads);
  const lamvar::Classification cls = lamvar::classify_all(ctx, cache);
  store_cache(cache, form, cache_path);

  if (!args.export_path.empty()) {
    std::ofstream os(args.export_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + args.export_path);
    lamvar::write_classification_csv(cls, os);
  }

  nlohmann::json summary = lamvar::summary_json(cls.summary);
  // Theoretical targets, including both candidate Set1 exponents: the
  // empirical density is the arbiter between them.
  summary["theoretical_densities"] = {
      {"Set1", lamvar::density_json(lamvar::set1_density(args.p))},
      {"Set1_cubic_variant", lamvar::density_json(lamvar::set1_density_cubic_variant(args.p))},
      {"Set2", lamvar::density_json(lamvar::set2_density(args.p))},
      {"Set3", lamvar::density_json(lamvar::set3_density(args.p))},
  };

  nlohmann::json doc = {
      {"tool", tool_json()},
      {"config",
       {{"command", "classify"},
        {"p", args.p},
        {"form", form.label},
        {"N", form.level},
        {"x", args.x},
        {"threads", args.threads},
        {"cache", cache_path},
        {"export", args.export_path},
        {"format", args.format}}},
      {"classification", summary},
  };

  if (args.format == "csv") {
    lamvar::write_classification_csv(cls, std::cout);
  } else if (args.format == "text") {
    const auto& s = cls.summary;
    std::cout << "classified " << s.pi_x << " primes below " << s.x << " for p = " << s.p << "\n"
              << "  s1 = " << s.s1 << "  s1' = " << s.s1_prime << "  s2 = " << s.s2
              << "  s2' = " << s.s2_prime << "  s3 = " << s.s3 << "  (ell | N: " << s.divides_n
              << ", ell = p: " << s.is_p << ")\n"
              << "  raised levels on the window: " << lamvar::count_levels(s).str() << "\n";
  } else {
    emit(doc, args.out_path);
  }
  return kExitOk;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::uint32_t p = 0;
  FormOptions form;
  std::uint64_t x = 100000;
  std::string mode = "stable";
  std::int64_t lambda_g = 0;
  std::int64_t mu_g = 0;
  std::string sign = "ordinary";
  bool assume_min = false;
  std::string max_m;
  std::size_t samples = 10;
  double tolerance = 0.02;
  std::string cache_path;
  std::string out_path;
  std::string format = "json";
  unsigned threads = std::thread::hardware_concurrency();
};

int run_analyze(const AnalyzeArgs& args) {
  const lamvar::FormSpec form = args.form.resolve();
  const lamvar::AnalysisContext ctx = lamvar::make_context(args.p, form, args.x);

  lamvar::AnalyzeOptions options;
  if (args.mode == "stable") options.mode = lamvar::VerdictMode::Stable;
  else if (args.mode == "growth") options.mode = lamvar::VerdictMode::Growth;
  else throw std::invalid_argument("--mode must be stable or growth");
  options.lambda_g = args.lambda_g;
  options.mu_g = args.mu_g;
  if (args.sign == "+") options.sign = lamvar::InvariantSign::Plus;
  else if (args.sign == "-") options.sign = lamvar::InvariantSign::Minus;
  options.assume_min_lambda = args.assume_min;
  options.sample_limit = args.samples;
  options.tolerance = args.tolerance;
  if (!args.max_m.empty()) options.max_m = lamvar::BigInt(args.max_m);

  std::string cache_path;
  lamvar::ApCache cache = load_cache(form, args.cache_path, cache_path);
  lamvar::bulk_ap(form, args.x, cache, args.threads == 0 ? 1 : args.threads);
  const lamvar::StabilityVerdict verdict = lamvar::analyze(ctx, cache, options);
  store_cache(cache, form, cache_path);

  nlohmann::json doc = {
      {"tool", tool_json()},
      {"config",
       {{"command", "analyze"},
        {"mode", args.mode},
        {"p", args.p},
        {"form", form.label},
        {"N", form.level},
        {"x", args.x},
        {"lambda_g", args.lambda_g},
        {"mu_g", args.mu_g},
        {"sign", args.sign},
        {"assume_min", args.assume_min},
        {"max_M", args.max_m},
        {"samples", args.samples},
        {"tolerance", args.tolerance},
        {"threads", args.threads},
        {"cache", cache_path},
        {"format", args.format}}},
      {"verdict", lamvar::verdict_json(verdict)},
  };

  if (args.format == "text") {
    std::cout << "mode " << args.mode << ": density " << lamvar::fraction_string(verdict.density.theoretical)
              << " (empirical " << verdict.density.count << "/" << verdict.density.pi_x
              << ", deviation " << verdict.density.deviation() << ")\n"
              << "  qualifying primes below " << args.x << ": " << verdict.primes.size() << "\n";
    for (const auto& level : verdict.sample_levels) std::cout << "  level " << level.M.str() << "\n";
  } else {
    emit(doc, args.out_path);
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact and empirical densities for lambda-invariant variation in congruence "
               "families of weight-2 forms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lamvar::kToolName) + " " + lamvar::kToolVersion);
  app.set_config("--config");

  CensusArgs census_args;
  CLI::App* census = app.add_subcommand("census", "enumerate GL2(F_p) and verify the density formulas");
  census->add_option("--p", census_args.p, "odd prime p")->required();
  census->add_option("--bound", census_args.bound, "largest p the enumerator accepts");
  census->add_option("--export", census_args.export_path, "write the (det,trace) cell counts as CSV");
  census->add_option("--out", census_args.out_path, "write the JSON report to a file");
  census->add_option("--format", census_args.format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  ClassifyArgs classify_args;
  CLI::App* classify = app.add_subcommand("classify", "classify primes below x into the level-raising sets");
  classify->add_option("--p", classify_args.p, "odd prime p")->required();
  classify_args.form.attach(*classify);
  classify->add_option("--x", classify_args.x, "prime window bound (primes ell < x)");
  classify->add_option("--export", classify_args.export_path, "write per-prime records as CSV");
  classify->add_option("--cache", classify_args.cache_path, "coefficient cache CSV path");
  classify->add_option("--out", classify_args.out_path, "write the JSON report to a file");
  classify->add_option("--format", classify_args.format, "json | csv | text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  classify->add_option("--threads", classify_args.threads, "worker threads for point counting");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand("analyze", "stable / growth verdict with densities and sample levels");
  analyze->add_option("--mode", analyze_args.mode, "stable | growth")->required();
  analyze->add_option("--p", analyze_args.p, "odd prime p")->required();
  analyze_args.form.attach(*analyze);
  analyze->add_option("--x", analyze_args.x, "prime window bound");
  analyze->add_option("--lambda-g", analyze_args.lambda_g, "lambda invariant of the optimal form");
  analyze->add_option("--mu-g", analyze_args.mu_g, "mu invariant of the optimal form (must be 0)");
  analyze->add_option("--sign", analyze_args.sign,
                      "which invariant lambda-g is: ordinary | + | - (non-ordinary forms)")
      ->check(CLI::IsMember({"ordinary", "+", "-"}));
  analyze->add_flag("--assume-min", analyze_args.assume_min,
                    "assert that lambda(g) is minimal in its family");
  analyze->add_option("--max-M", analyze_args.max_m, "upper bound for emitted levels");
  analyze->add_option("--samples", analyze_args.samples, "number of sample levels to emit");
  analyze->add_option("--tolerance", analyze_args.tolerance, "density deviation tolerance");
  analyze->add_option("--cache", analyze_args.cache_path, "coefficient cache CSV path");
  analyze->add_option("--out", analyze_args.out_path, "write the JSON report to a file");
  analyze->add_option("--format", analyze_args.format, "json | text")
      ->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--threads", analyze_args.threads, "worker threads for point counting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (census->parsed()) return run_census(census_args);
    if (classify->parsed()) return run_classify(classify_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    return kExitConfigError;
  } catch (const lamvar::HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const lamvar::NegativeLambda& e) {
    std::cerr << "inconsistent invariants: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const lamvar::MissingCoefficient& e) {
    std::cerr << "MissingCoefficient: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const lamvar::CheckFailure& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
