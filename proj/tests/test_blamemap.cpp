#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "blame_oracle.hpp"
#include "support.hpp"

using namespace gtl;

namespace {

BoundaryEntry entry(const char* type, const char* client, std::size_t at,
                    Direction d = Direction::IntoTyped) {
  BoundaryEntry e;
  e.type = parse_type(type);
  e.direction = d;
  e.client = SourceLoc{Symbol(client), Span{at, at + 1}, Origin::User};
  e.spec = SourceLoc{Symbol("spec"), Span{at, at + 1}, Origin::User};
  return e;
}


}  // namespace

TEST_CASE("one hop to two parents") {
  BlameMap m;
  m.add_boundary(10, entry("(-> Int Int)", "a", 1));
  m.add_boundary(20, entry("(-> Str Int)", "b", 2));
  m.add_link(1, 10, Action::dom(0));
  m.add_link(1, 20, Action::dom(0));
  auto g = m.gather(1);
  REQUIRE(g.size() == 2);
  CHECK(g[0].path == std::vector<Action>{Action::dom(0)});
  CHECK(m.size() == 4);
  CHECK(m.key_count() == 3);
}

TEST_CASE("transitive chain reaches only the boundary at its end") {
  BlameMap m;
  m.add_link(1, 2, Action::list_elem());
  m.add_link(2, 3, Action::cod(0));
  m.add_boundary(3, entry("(-> (Listof Int))", "g", 5));
  auto g = m.gather(1);
  REQUIRE(g.size() == 1);
  CHECK(g[0].entry.client.module == Symbol("g"));
  CHECK(g[0].path == std::vector<Action>{Action::cod(0), Action::list_elem()});
  // Cycles terminate.
  m.add_link(3, 1, Action::noop());
  CHECK(m.gather(1).size() == 1);
}

TEST_CASE("filtering keeps only the disagreeing expectation") {
  Heap heap;
  BlameMap m;
  m.add_boundary(100, entry("(-> (Listof Str) Nat)", "f", 1, Direction::OutOfTyped));
  m.add_boundary(200, entry("(-> (Listof Int) Int)", "g", 2, Direction::OutOfTyped));
  m.add_link(7, 100, Action::dom(0));
  m.add_link(7, 200, Action::dom(0));
  auto all = m.gather(7, Action::list_elem());
  REQUIRE(all.size() == 2);
  auto kept = filter_blame(Value::string("a"), all, heap);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].entry.client.module == Symbol("g"));
  CHECK(filter_blame(Value::string("a"), {}, heap).empty());
}

TEST_CASE("a path that does not fit the type is kept") {
  Heap heap;
  Gathered g{entry("(-> Int Int)", "h", 3), {Action::hash_key()}};
  CHECK_FALSE(traverse(g.entry, g.path).ok);
  CHECK(filter_blame(Value::integer(1), {g}, heap).size() == 1);
}

TEST_CASE("labels and polarity") {
  auto in = entry("(-> Int (Listof Str))", "u", 4, Direction::IntoTyped);
  CHECK(labeled_type(in) == "(-> Int@- (Listof Str@u:4))");
  auto out = entry("(-> Int Str)", "c", 9, Direction::OutOfTyped);
  CHECK(labeled_type(out) == "(-> Int@c:9 Str@-)");
  CHECK(traverse(out, {Action::dom(0)}).blamable);
  CHECK_FALSE(traverse(out, {Action::cod(0)}).blamable);
  CHECK(traverse(in, {Action::cod(0), Action::list_elem()}).blamable);
}

TEST_CASE("gather and filter match brute-force oracles on random link graphs") {
  auto r = gtl::blame_oracle::run(200, 2024);
  MESSAGE(r.gathered << " gathered, " << r.kept << " kept");
  CHECK(r.rounds == 200);
  CHECK(r.gather_mismatches == 0);
  CHECK(r.filter_mismatches == 0);
  CHECK(r.gathered > 0);
  CHECK(r.kept < r.gathered);
}

TEST_CASE("blame keys exist only for heap values") {
  Heap heap;
  CHECK_FALSE(blame_key(Value::integer(1)).has_value());
  CHECK_FALSE(blame_key(Value::string("x")).has_value());
  CHECK(blame_key(heap.cons(Value::integer(1), Value::empty())).has_value());
}
