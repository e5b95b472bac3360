#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "support.hpp"

using namespace gtl;
using gtl::test::load;

namespace {

TypedProgram check_text(const std::string& text, const std::string& config = "typed") {
  auto mods = parse(text);
  return typecheck(mods, Configuration::parse(config, count_configurable(mods)));
}

std::map<NodeId, std::string> printed_types(const TypedProgram& p) {
  std::map<NodeId, std::string> out;
  for (const auto& [id, t] : p.node_types) out[id] = to_string(t);
  return out;
}

}  // namespace

TEST_CASE("well-typed programs") {
  auto p = check_text("(module a typed (define (f [x : Int]) : Int (+ x 1)) (f 2))");
  REQUIRE(p.main_type);
  CHECK(to_string(p.main_type) == "Int");
  CHECK(p.typed(0));
  auto q = check_text("(module a typed (define (g [xs : (Listof Str)]) : Nat (length xs)) (g (list \"a\")))");
  CHECK(to_string(q.main_type) == "Nat");
}

TEST_CASE("type errors are reported") {
  CHECK_THROWS_AS(check_text("(module a typed (define x : Int \"s\"))"), StaticTypeError);
  CHECK_THROWS_AS(check_text("(module a typed (define (f [x : Int]) : Int x) (f 1 2))"), StaticTypeError);
  CHECK_THROWS_AS(check_text("(module a typed (define (f [x : Str]) : Int (+ x 1)))"), StaticTypeError);
  CHECK_THROWS_AS(check_text("(module a untyped (+ y 1))"), UnboundVariable);
  // A typed module must annotate what it takes from untyped code.
  CHECK_THROWS_AS(check_text("(module a untyped (define x 1)) (module b typed (require a x) x)"),
                  StaticTypeError);
  CHECK_NOTHROW(check_text("(module a untyped (define x 1)) (module b typed (require a [x : Int]) x)"));
}

TEST_CASE("configurable modules follow the configuration") {
  auto mods = load("sort_median.gtl");
  auto n = count_configurable(mods);
  CHECK(n == 3);
  auto p = typecheck(mods, Configuration::parse("101", n));
  auto langs = resolve_langs(mods, Configuration::parse("101", n));
  for (std::size_t i = 0; i < mods.size(); ++i) CHECK(p.typed(i) == langs[i]);
}

TEST_CASE("all-untyped configurations never raise static type errors") {
  for (const auto& f : gtl::test::scenario_fixtures()) {
    auto mods = load(f);
    CAPTURE(f);
    CHECK_NOTHROW(typecheck(mods, Configuration::all_untyped(count_configurable(mods))));
  }
  for (const auto& f : gtl::test::bench_fixtures()) {
    auto mods = load(f);
    CAPTURE(f);
    CHECK_NOTHROW(typecheck(mods, Configuration::all_untyped(count_configurable(mods))));
  }
}

TEST_CASE("every bench configuration typechecks") {
  for (const auto& f : gtl::test::bench_fixtures()) {
    auto mods = load(f);
    for (const auto& c : enumerate_lattice(mods)) {
      CAPTURE(f);
      CAPTURE(c.bits());
      CHECK_NOTHROW(typecheck(mods, c));
    }
  }
}

TEST_CASE("typechecking does not depend on module declaration order") {
  for (const char* f : {"sort_median.gtl", "bench/dungeon.gtl", "double_cross.gtl", "bench/sieve.gtl"}) {
    CAPTURE(f);
    auto mods = load(f);
    auto n = count_configurable(mods);
    for (const auto& c : enumerate_lattice(n)) {
      auto base = typecheck(mods, c);
      auto shuffled = mods;
      // Keep the main module last so the result module is unchanged; the
      // configuration refers to configurable modules in declaration order,
      // so only swap modules with the same language.
      std::vector<std::size_t> idx(mods.size() - 1);
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::reverse(idx.begin(), idx.end());
      std::vector<ModuleDecl> fixed, conf;
      for (auto i : idx) (mods[i].lang == Lang::Configurable ? conf : fixed).push_back(mods[i]);
      std::reverse(conf.begin(), conf.end());
      shuffled.clear();
      std::size_t fi = 0, ci = 0;
      // Interleave: fixed modules first, then configurable ones in their
      // original relative order.
      for (; fi < fixed.size(); ++fi) shuffled.push_back(fixed[fi]);
      for (; ci < conf.size(); ++ci) shuffled.push_back(conf[ci]);
      shuffled.push_back(mods.back());
      auto other = typecheck(shuffled, c);
      CHECK(printed_types(base) == printed_types(other));
      CHECK(base.modules[base.main].name == other.modules[other.main].name);
    }
  }
}

TEST_CASE("main module is the last module nothing imports") {
  auto mods = load("sort_median.gtl");
  CHECK(mods[main_module(mods)].name == Symbol("client"));
  auto dc = load("double_cross.gtl");
  CHECK(dc[main_module(dc)].name == Symbol("c"));
}

TEST_CASE("boundary links") {
  auto mods = load("fg.gtl");
  auto p = typecheck(mods, Configuration::all_typed(count_configurable(mods)));
  for (std::size_t i = 0; i < p.modules.size(); ++i) {
    if (p.typed(i)) continue;
    for (const auto& link : p.info[i].imports) {
      CHECK(link.boundary);
      CHECK_FALSE(link.into_typed);
      CHECK(link.type);
    }
  }
}
