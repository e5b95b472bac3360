#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "gtl/types.hpp"

namespace gtl {

enum class Prim {
  Add, Sub, Mul, Div, Quotient, Modulo,
  Lt, Gt, Le, Ge, NumEq,
  Not, Equal,
  StringAppend, StringLength, StringEq, NumberToString,
  List, Cons, First, Rest, IsEmpty, IsCons, Length, ListRef, Map, Append, Reverse,
  Vector, MakeVector, VectorRef, VectorSet, VectorLength,
  MakeHash, HashRef, HashSet, HashHasKey, HashCount,
  IsInteger, IsNatural, IsReal, IsString, IsBoolean, IsList, IsProcedure, IsVector, IsHash,
  IsEof,
  ReadBytesFrom, Displayln, Error,
};

inline constexpr int kVariadic = -1;

/// Signature of a trusted runtime-library function. `type` is the type a
/// first-class reference receives in typed code (null when the primitive can
/// only be used in operator position); `result_guaranteed` says the
/// implementation always returns a value matching the shape of its result
/// type, so no result check is needed at call sites.
struct PrimSig {
  Prim prim;
  std::string_view name;
  int min_arity;
  int max_arity;  // kVariadic for no upper bound
  TypePtr type;
  bool result_guaranteed;
};

const PrimSig& prim_sig(Prim p);
std::optional<Prim> prim_by_name(std::string_view name);
std::span<const PrimSig> all_prims();

bool prim_accepts(Prim p, std::size_t argc);

}  // namespace gtl
