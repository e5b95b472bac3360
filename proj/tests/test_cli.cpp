#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using gtl::test::fixture_path;
using gtl::test::run_cli;

namespace {

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("run exit codes") {
  const auto sort_median = fixture_path("sort_median.gtl");
  CHECK(run_cli("run " + sort_median + " --config 011 --mode deep") == 3);
  CHECK(run_cli("run " + sort_median + " --config 011 --mode shallow") == 3);
  CHECK(run_cli("run " + fixture_path("for_skip.gtl") + " --mode shallow") == 0);
  CHECK(run_cli("run " + fixture_path("for_skip.gtl") + " --mode shallow --check-desugared") == 3);
  CHECK(run_cli("run " + fixture_path("bench/sieve.gtl") + " --config typed --mode sb") == 0);
}

TEST_CASE("usage errors exit 64") {
  const auto sort_median = fixture_path("sort_median.gtl");
  CHECK(run_cli("") == 64);
  CHECK(run_cli("run " + sort_median + " --bogus") == 64);
  CHECK(run_cli("run " + sort_median + " --config 01") == 64);
  CHECK(run_cli("run " + sort_median + " --config 0a1") == 64);
  CHECK(run_cli("run " + sort_median + " --mode fast") == 64);
  CHECK(run_cli("run " + sort_median + " --mode all") == 64);
  CHECK(run_cli("frobnicate") == 64);
}

TEST_CASE("rejected programs") {
  CHECK(run_cli("run " + fixture_path("poly_bad.gtl") + " --config typed --mode shallow") == 3);
  CHECK(run_cli("run " + fixture_path("poly_bad.gtl") + " --config typed --mode deep") == 3);
  CHECK(run_cli("check " + fixture_path("no_such_file.gtl")) != 0);
}

TEST_CASE("check prints module typedness and check sites") {
  std::string out;
  REQUIRE(run_cli("check " + fixture_path("for_sum.gtl") + " --dump-checks", &out) == 0);
  CHECK(out.find("fn-entry[0] squares:83 list?") != std::string::npos);
  REQUIRE(run_cli("check " + fixture_path("sort_median.gtl") + " --config 011", &out) == 0);
  CHECK(out.find("sort untyped") != std::string::npos);
  CHECK(out.find("median typed") != std::string::npos);
}

TEST_CASE("run prints output and counters") {
  std::string out;
  REQUIRE(run_cli("run " + fixture_path("bench/sieve.gtl") + " --config typed --mode sb --counters", &out) == 0);
  CHECK(out.find("shape_checks=") != std::string::npos);
  CHECK(out.find("blame_ops=") != std::string::npos);
}

TEST_CASE("lattice prints one row per configuration") {
  std::string out;
  auto mods = gtl::test::load("bench/sieve.gtl");
  const std::size_t n = gtl::count_configurable(mods);
  REQUIRE(run_cli("lattice " + fixture_path("bench/sieve.gtl") + " --mode shallow", &out) == 0);
  CHECK(lines(out) == (std::size_t{1} << n) + 1);
  std::string serial;
  REQUIRE(run_cli("lattice " + fixture_path("bench/sieve.gtl") + " --mode shallow --serial", &serial) == 0);
  CHECK(serial == out);
  REQUIRE(run_cli("lattice " + fixture_path("bench/sieve.gtl") + " --mode all", &out) == 0);
  CHECK(lines(out) == 4 * (std::size_t{1} << n) + 1);
  REQUIRE(run_cli("lattice " + fixture_path("bench/sieve.gtl") + " --mode deep --cdf", &out) == 0);
  CHECK(out.rfind("mode,x,percent\ndeep,1.00,", 0) == 0);
}

TEST_CASE("report prints the blame cost row") {
  std::string out;
  REQUIRE(run_cli("report " + fixture_path("bench/sieve.gtl"), &out) == 0);
  CHECK(out.rfind("program,shallow_worst,deep_worst,sb_typed\nsieve,", 0) == 0);
}
