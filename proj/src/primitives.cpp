#include "gtl/primitives.hpp"

#include <vector>

namespace gtl {
namespace {

TypePtr a() { return ty::tvar(Symbol("a")); }
TypePtr b() { return ty::tvar(Symbol("b")); }
TypePtr all_a(TypePtr body) { return ty::forall(Symbol("a"), std::move(body)); }
TypePtr all_ab(TypePtr body) { return ty::forall(Symbol("a"), ty::forall(Symbol("b"), std::move(body))); }

std::vector<PrimSig> build_table() {
  using ty::bool_;
  using ty::fun;
  using ty::int_;
  using ty::list;
  using ty::nat;
  using ty::real;
  using ty::str;
  const auto real2 = [] { return fun({real(), real()}, real()); };
  const auto cmp = [] { return fun({real(), real()}, bool_()); };
  const auto pred = [] { return all_a(fun({a()}, bool_())); };

  // map, length: always return a list / a natural; list-ref, hash-ref,
  // vector-ref may return any kind of value.
  return {
      {Prim::Add, "+", 2, 2, real2(), true},
      {Prim::Sub, "-", 2, 2, real2(), true},
      {Prim::Mul, "*", 2, 2, real2(), true},
      {Prim::Div, "/", 2, 2, real2(), true},
      {Prim::Quotient, "quotient", 2, 2, fun({int_(), int_()}, int_()), true},
      {Prim::Modulo, "modulo", 2, 2, fun({int_(), int_()}, int_()), true},
      {Prim::Lt, "<", 2, 2, cmp(), true},
      {Prim::Gt, ">", 2, 2, cmp(), true},
      {Prim::Le, "<=", 2, 2, cmp(), true},
      {Prim::Ge, ">=", 2, 2, cmp(), true},
      {Prim::NumEq, "=", 2, 2, cmp(), true},
      {Prim::Not, "not", 1, 1, fun({bool_()}, bool_()), true},
      {Prim::Equal, "equal?", 2, 2, all_a(fun({a(), a()}, bool_())), true},
      {Prim::StringAppend, "string-append", 2, 2, fun({str(), str()}, str()), true},
      {Prim::StringLength, "string-length", 1, 1, fun({str()}, nat()), true},
      {Prim::StringEq, "string=?", 2, 2, fun({str(), str()}, bool_()), true},
      {Prim::NumberToString, "number->string", 1, 1, fun({real()}, str()), true},
      {Prim::List, "list", 0, kVariadic, nullptr, true},
      {Prim::Cons, "cons", 2, 2, all_a(fun({a(), list(a())}, list(a()))), true},
      {Prim::First, "first", 1, 1, all_a(fun({list(a())}, a())), false},
      {Prim::Rest, "rest", 1, 1, all_a(fun({list(a())}, list(a()))), false},
      {Prim::IsEmpty, "empty?", 1, 1, pred(), true},
      {Prim::IsCons, "cons?", 1, 1, pred(), true},
      {Prim::Length, "length", 1, 1, all_a(fun({list(a())}, nat())), true},
      {Prim::ListRef, "list-ref", 2, 2, all_a(fun({list(a()), int_()}, a())), false},
      {Prim::Map, "map", 2, 2, all_ab(fun({fun({a()}, b()), list(a())}, list(b()))), true},
      {Prim::Append, "append", 2, 2, all_a(fun({list(a()), list(a())}, list(a()))), true},
      {Prim::Reverse, "reverse", 1, 1, all_a(fun({list(a())}, list(a()))), true},
      {Prim::Vector, "vector", 0, kVariadic, nullptr, true},
      {Prim::MakeVector, "make-vector", 2, 2, all_a(fun({nat(), a()}, ty::vec_of(a()))), true},
      {Prim::VectorRef, "vector-ref", 2, 2, all_a(fun({ty::vec_of(a()), int_()}, a())), false},
      {Prim::VectorSet, "vector-set!", 3, 3, all_a(fun({ty::vec_of(a()), int_(), a()}, a())), true},
      {Prim::VectorLength, "vector-length", 1, 1, all_a(fun({ty::vec_of(a())}, nat())), true},
      {Prim::MakeHash, "make-hash", 0, 0, nullptr, true},
      {Prim::HashRef, "hash-ref", 2, 2, all_ab(fun({ty::hash(a(), b()), a()}, b())), false},
      {Prim::HashSet, "hash-set!", 3, 3, all_ab(fun({ty::hash(a(), b()), a(), b()}, b())), true},
      {Prim::HashHasKey, "hash-has-key?", 2, 2, all_ab(fun({ty::hash(a(), b()), a()}, bool_())), true},
      {Prim::HashCount, "hash-count", 1, 1, all_ab(fun({ty::hash(a(), b())}, nat())), true},
      {Prim::IsInteger, "integer?", 1, 1, pred(), true},
      {Prim::IsNatural, "natural?", 1, 1, pred(), true},
      {Prim::IsReal, "real?", 1, 1, pred(), true},
      {Prim::IsString, "string?", 1, 1, pred(), true},
      {Prim::IsBoolean, "boolean?", 1, 1, pred(), true},
      {Prim::IsList, "list?", 1, 1, pred(), true},
      {Prim::IsProcedure, "procedure?", 1, 1, pred(), true},
      {Prim::IsVector, "vector?", 1, 1, pred(), true},
      {Prim::IsHash, "hash?", 1, 1, pred(), true},
      {Prim::IsEof, "eof-object?", 1, 1, pred(), true},
      // The declared type under-approximates: the list ends in an eof sentinel.
      {Prim::ReadBytesFrom, "read-bytes-from", 1, 1, fun({str()}, list(int_())), true},
      {Prim::Displayln, "displayln", 1, 1, all_a(fun({a()}, a())), true},
      {Prim::Error, "error", 1, 1, nullptr, true},
  };
}

const std::vector<PrimSig>& table() {
  static const std::vector<PrimSig> prims = build_table();
  return prims;
}

}  // namespace

const PrimSig& prim_sig(Prim p) { return table()[static_cast<std::size_t>(p)]; }

std::optional<Prim> prim_by_name(std::string_view name) {
  for (const auto& sig : table())
    if (sig.name == name) return sig.prim;
  return std::nullopt;
}

std::span<const PrimSig> all_prims() { return table(); }

bool prim_accepts(Prim p, std::size_t argc) {
  const auto& sig = prim_sig(p);
  if (static_cast<int>(argc) < sig.min_arity) return false;
  return sig.max_arity == kVariadic || static_cast<int>(argc) <= sig.max_arity;
}

}  // namespace gtl
