#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "support.hpp"

using namespace gtl;
using gtl::test::load;

namespace {

std::size_t count_nodes(const ModuleDecl& m, const std::function<bool(const Term&)>& pred) {
  std::size_t n = 0;
  for (const auto& d : m.defs)
    for_each_node(*d.expr, [&](const Term& t) { n += pred(t) ? 1 : 0; });
  return n;
}

// Every desugared node lies inside the span of its nearest user-written ancestor.
bool spans_nested(const Term& t, const Span* user) {
  if (t.loc.origin == Origin::Desugared) {
    if (!user || t.loc.span.start < user->start || t.loc.span.end > user->end) return false;
  } else {
    user = &t.loc.span;
  }
  bool ok = true;
  visit_children(t, [&](const Term& c) { ok = ok && spans_nested(c, user); });
  return ok;
}

}  // namespace

TEST_CASE("module headers and imports") {
  auto mods = parse(
      "(module a typed (define x : Int 1))\n"
      "(module b configurable (require a [x : Int]) (define y : Int x))\n"
      "(module c untyped (require b y) y)");
  REQUIRE(mods.size() == 3);
  CHECK(mods[0].lang == Lang::Typed);
  CHECK(mods[1].lang == Lang::Configurable);
  CHECK(mods[2].lang == Lang::Untyped);
  REQUIRE(mods[1].imports.size() == 1);
  CHECK(mods[1].imports[0].source_module == Symbol("a"));
  CHECK(to_string(mods[1].imports[0].declared_type) == "Int");
  CHECK(mods[2].imports[0].declared_type == nullptr);
  CHECK(mods[2].defs.back().is_expression());
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse("(module a untyped\n  (define x (+ 1 2))\n  (foo");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position().line == 3);
  }
  CHECK_THROWS_AS(parse("(module a sometimes 1)"), ParseError);
  CHECK_THROWS_AS(parse("(module a untyped (lambda))"), ParseError);
  CHECK_THROWS_AS(parse_type("(Listof)"), ParseError);
}

TEST_CASE("types parse and print back") {
  for (const char* text : {"Int", "(-> Int Str Bool)", "(Listof (U Int Str))", "(Vector Int Real)",
                           "(Vectorof Nat)", "(HashTable Str Int)", "(Record P [x Int] [y Real])",
                           "(case-> (-> Int Int) (-> Int Int Int))", "(All (a) (-> a a))"}) {
    CAPTURE(text);
    CHECK(to_string(parse_type(text)) == text);
  }
}

TEST_CASE("round trip: print then parse gives the same program") {
  for (const auto& f : gtl::test::scenario_fixtures()) {
    CAPTURE(f);
    auto mods = load(f);
    auto again = parse(print_program(mods));
    REQUIRE(again.size() == mods.size());
    for (std::size_t i = 0; i < mods.size(); ++i) CHECK(structurally_equal(mods[i], again[i]));
  }
  for (const auto& f : gtl::test::bench_fixtures()) {
    CAPTURE(f);
    auto mods = load(f);
    auto again = parse(print_program(mods));
    for (std::size_t i = 0; i < mods.size(); ++i) CHECK(structurally_equal(mods[i], again[i]));
  }
}

TEST_CASE("desugaring removes loops, stays within user spans, and is idempotent") {
  for (const char* f : {"for_sum.gtl", "for_skip.gtl", "bench/deepdata.gtl"}) {
    CAPTURE(f);
    for (const auto& m : load(f)) {
      auto d = desugar(m);
      CHECK(is_kernel(d));
      CHECK(count_nodes(d, [](const Term& t) { return t.is<Term::ForLoop>(); }) == 0);
      for (const auto& def : d.defs) CHECK(spans_nested(*def.expr, nullptr));
      CHECK(structurally_equal(desugar(d), d));
    }
  }
  auto for_sum = load("for_sum.gtl");
  CHECK_FALSE(is_kernel(for_sum[0]));
  auto d = desugar(for_sum[0]);
  CHECK(count_nodes(d, [](const Term& t) { return t.loc.origin == Origin::Desugared; }) > 0);
}

TEST_CASE("node ids are unique") {
  auto mods = load("sort_median.gtl");
  std::set<NodeId> ids;
  std::size_t n = 0;
  for (const auto& m : mods)
    for (const auto& d : m.defs)
      for_each_node(*d.expr, [&](const Term& t) {
        ids.insert(t.id);
        ++n;
      });
  CHECK(ids.size() == n);
}

TEST_CASE("configurations") {
  CHECK(Configuration::parse("101", 3).value() == 5u);
  CHECK(Configuration::parse("101", 3).typed(0));
  CHECK_FALSE(Configuration::parse("101", 3).typed(1));
  CHECK(Configuration::parse("typed", 4).bits() == "1111");
  CHECK(Configuration::parse("untyped", 2).bits() == "00");
  CHECK_THROWS_AS(Configuration::parse("10", 3), ConfigError);
  CHECK_THROWS_AS(Configuration::parse("1x1", 3), ConfigError);
  CHECK_THROWS_AS(enumerate_lattice(17), LatticeTooLarge);
  // Lattice enumeration: every bit pattern once, ascending.
  for (std::size_t w = 0; w <= 6; ++w) {
    auto all = enumerate_lattice(w);
    REQUIRE(all.size() == (std::size_t{1} << w));
    std::set<std::string> seen;
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(all[i].value() == i);
      CHECK(all[i].bits().size() == w);
      seen.insert(all[i].bits());
      std::size_t ones = 0;
      for (char c : all[i].bits()) ones += c == '1';
      CHECK(all[i].typed_count() == ones);
    }
    CHECK(seen.size() == all.size());
  }
}
