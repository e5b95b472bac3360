#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace gtl;
using K = Contract::Kind;

namespace {

// Enough of an evaluator for primitive functions and wrappers.
struct Host : ContractHost {
  Heap h;
  CostCounters c;
  Heap& heap() override { return h; }
  CostCounters& counters() override { return c; }
  Value call(const Value& fn, std::vector<Value> args) override {
    const Object* o = fn.object_or_null();
    REQUIRE(o);
    if (o->as<Wrapped>()) return call_wrapped(fn, std::move(args), *this);
    switch (o->as<PrimitiveFn>()->prim) {
      case Prim::Add: return Value::integer(args[0].as_int() + args[1].as_int());
      case Prim::StringLength: return Value::integer(static_cast<std::int64_t>(args[0].as_str().size()));
      case Prim::NumberToString: return Value::string(std::to_string(args[0].as_int()));
      default: FAIL("unexpected primitive"); return Value::empty();
    }
  }
};

BoundaryPtr boundary(const char* type) {
  auto b = std::make_shared<Boundary>();
  b->id = 1;
  b->importer_loc = SourceLoc{Symbol("user"), {10, 11}, Origin::User};
  b->exporter_loc = SourceLoc{Symbol("lib"), {20, 21}, Origin::User};
  b->type = parse_type(type);
  b->positive = Symbol("lib");
  b->negative = Symbol("user");
  return b;
}

Symbol blamed_by(const std::function<void()>& f) {
  try {
    f();
  } catch (const ContractFailure& e) {
    return e.violation().blamed;
  }
  return Symbol();
}

}  // namespace

TEST_CASE("contract kinds") {
  CHECK(compile_contract(parse_type("(Listof (Record R [x Int]))"))->kind == K::Flat);
  CHECK(compile_contract(parse_type("(-> Int Int)"))->kind == K::FunGuard);
  CHECK(compile_contract(parse_type("(case-> (-> Int Int) (-> Int Int Int))"))->branches.size() == 2);
  CHECK(compile_contract(parse_type("(Vectorof Int)"))->kind == K::VecGuard);
  CHECK(compile_contract(parse_type("(HashTable Str Int)"))->kind == K::HashGuard);
  CHECK(compile_contract(parse_type("(Record R [f (-> Int Int)])"))->kind == K::RecordGuard);
  CHECK(compile_contract(parse_type("(Listof (-> Int Int))"))->kind == K::ListGuard);
  CHECK(compile_contract(parse_type("(U Int (-> Int Int))"))->kind == K::UnionPick);
  CHECK(compile_contract(parse_type("(U (-> Int Int) (-> Str Str))"))->kind == K::Reject);
  CHECK(compile_contract(parse_type("(All (a) (-> a a))"))->kind == K::Reject);
  // A reject nested anywhere rejects the whole type.
  CHECK(compile_contract(parse_type("(-> (All (a) a) Int)"))->kind == K::Reject);
}

TEST_CASE("deep checks count every inspected node") {
  Heap heap;
  CostCounters c;
  Value l = heap.list({Value::integer(1), Value::integer(2), Value::integer(3)});
  CHECK(deep_check(*parse_type("(Listof Int)"), l, heap, c));
  CHECK(c.flat_checks == 4);
  CostCounters c2;
  CHECK_FALSE(deep_check(*parse_type("(Listof Str)"), l, heap, c2));
  CHECK(c2.flat_checks == 2);
  CostCounters c3;
  Value nested = heap.list({heap.list({Value::integer(1)}), heap.list({Value::string("x")})});
  CHECK_FALSE(deep_check(*parse_type("(Listof (Listof Int))"), nested, heap, c3));
}

TEST_CASE("flat contracts blame the producer") {
  Host host;
  auto b = boundary("Int");
  CHECK(blamed_by([&] { apply_contract(compile_contract(b->type), Value::string("x"), b, false, host); }) ==
        Symbol("lib"));
  CHECK(blamed_by([&] { apply_contract(compile_contract(b->type), Value::string("x"), b, true, host); }) ==
        Symbol("user"));
  CHECK(apply_contract(compile_contract(b->type), Value::integer(4), b, false, host).as_int() == 4);
}

TEST_CASE("function wrappers check arguments against the consumer and results against the producer") {
  Host host;
  auto b = boundary("(-> Int Int)");
  Value add1 = host.h.primitive(Prim::NumberToString);  // returns a string: a lying producer
  Value w = apply_contract(compile_contract(b->type), add1, b, false, host);
  CHECK(host.c.wrappers_allocated == 1);
  CHECK(blamed_by([&] { call_wrapped(w, {Value::string("no")}, host); }) == Symbol("user"));
  CHECK(blamed_by([&] { call_wrapped(w, {Value::integer(3)}, host); }) == Symbol("lib"));
  CHECK(blamed_by([&] { call_wrapped(w, {Value::integer(3), Value::integer(4)}, host); }) == Symbol("user"));
  CHECK(host.c.wrapped_calls == 3);

  auto b2 = boundary("(-> Str Int)");
  Value len = host.h.primitive(Prim::StringLength);
  Value w2 = apply_contract(compile_contract(b2->type), len, b2, false, host);
  CHECK(call_wrapped(w2, {Value::string("abc")}, host).as_int() == 3);
  CHECK(blamed_by([&] { apply_contract(compile_contract(b2->type), Value::integer(1), b2, false, host); }) ==
        Symbol("lib"));
}

TEST_CASE("higher-order argument wrappers swap parties") {
  Host host;
  // lib exports a function that takes a callback; the callback comes from user.
  auto b = boundary("(-> (-> Int Int) Int)");
  auto c = compile_contract(b->type);
  Value cb = host.h.primitive(Prim::NumberToString);
  Value wrapped_cb = apply_contract(c->branches[0].params[0], cb, b, true, host);
  // The callback lies about its result: user produced it.
  CHECK(blamed_by([&] { call_wrapped(wrapped_cb, {Value::integer(1)}, host); }) == Symbol("user"));
  // lib calls the callback with a bad argument: lib is the consumer.
  CHECK(blamed_by([&] { call_wrapped(wrapped_cb, {Value::string("x")}, host); }) == Symbol("lib"));
}

TEST_CASE("lists of functions are copied with wrapped elements") {
  Host host;
  auto b = boundary("(Listof (-> Str Int))");
  Value l = host.h.list({host.h.primitive(Prim::StringLength), host.h.primitive(Prim::StringLength)});
  Value out = apply_contract(compile_contract(b->type), l, b, false, host);
  std::vector<Value> elems;
  REQUIRE(list_elements(out, elems));
  CHECK(elems.size() == 2);
  for (const auto& e : elems) CHECK(e.as_object()->as<Wrapped>());
  CHECK(host.c.wrappers_allocated == 2);
  CHECK(blamed_by([&] {
          apply_contract(compile_contract(b->type), host.h.list({Value::integer(1)}), b, false, host);
        }) == Symbol("lib"));
}

TEST_CASE("mutable containers are guarded lazily") {
  Host host;
  auto b = boundary("(Vectorof (-> Int Int))");
  auto c = compile_contract(b->type);
  Value v = host.h.alloc(Vector{{Value::integer(5)}, false});
  Value w = apply_contract(c, v, b, false, host);
  const auto& wr = *w.as_object()->as<Wrapped>();
  CHECK(blamed_by([&] { guarded_read(wr, Value::integer(5), *c->elem, host); }) == Symbol("lib"));
  CHECK(blamed_by([&] { guarded_write(wr, Value::integer(5), *c->elem, host); }) == Symbol("user"));
}

TEST_CASE("unions pick by shape; rejected types blame the importer") {
  Host host;
  auto b = boundary("(U Int (-> Int Int))");
  auto c = compile_contract(b->type);
  CHECK(apply_contract(c, Value::integer(1), b, false, host).as_int() == 1);
  Value f = apply_contract(c, host.h.primitive(Prim::NumberToString), b, false, host);
  CHECK(f.as_object()->as<Wrapped>());
  CHECK(blamed_by([&] { apply_contract(c, Value::string("s"), b, false, host); }) == Symbol("lib"));
  auto poly = boundary("(All (a) (-> a a))");
  CHECK(blamed_by([&] { apply_contract(compile_contract(poly->type), Value::integer(1), poly, false, host); }) ==
        Symbol("user"));
}

TEST_CASE("violation message names one boundary") {
  Host host;
  auto b = boundary("Int");
  try {
    apply_contract(compile_contract(b->type), Value::string("x"), b, false, host);
    FAIL("expected a violation");
  } catch (const ContractFailure& e) {
    CHECK(std::string(e.what()) == "deep: boundary user:10 / lib:20: blamed lib: expected Int, got \"x\"");
  }
}
