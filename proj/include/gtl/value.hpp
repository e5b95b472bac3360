#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "gtl/primitives.hpp"
#include "gtl/syntax.hpp"

namespace gtl {

struct Object;
using ObjectPtr = std::shared_ptr<Object>;
struct Contract;
struct Boundary;
using ContractPtr = std::shared_ptr<const Contract>;
using BoundaryPtr = std::shared_ptr<const Boundary>;

struct EmptyList {};
// End-of-input marker produced by byte sources.
struct Sentinel {};
// Slot not yet initialised (letrec, forward module references).
struct Undefined {};

using StrPtr = std::shared_ptr<const std::string>;

/// Numbers, booleans and strings are immediate and untracked; everything
/// else lives on the heap and has an identity.
struct Value {
  std::variant<Undefined, std::int64_t, double, bool, StrPtr, EmptyList, Sentinel, ObjectPtr> v;

  static Value integer(std::int64_t i) { return Value{i}; }
  static Value real(double d) { return Value{d}; }
  static Value boolean(bool b) { return Value{b}; }
  static Value string(std::string s) { return Value{std::make_shared<const std::string>(std::move(s))}; }
  static Value empty() { return Value{EmptyList{}}; }
  static Value sentinel() { return Value{Sentinel{}}; }
  static Value object(ObjectPtr o) { return Value{std::move(o)}; }

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_real() const { return std::holds_alternative<double>(v); }
  bool is_number() const { return is_int() || is_real(); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_str() const { return std::holds_alternative<StrPtr>(v); }
  bool is_empty() const { return std::holds_alternative<EmptyList>(v); }
  bool is_sentinel() const { return std::holds_alternative<Sentinel>(v); }
  bool is_undefined() const { return std::holds_alternative<Undefined>(v); }
  bool is_object() const { return std::holds_alternative<ObjectPtr>(v); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : std::get<double>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const std::string& as_str() const { return *std::get<StrPtr>(v); }
  const ObjectPtr& as_object() const { return std::get<ObjectPtr>(v); }
  Object* object_or_null() const {
    auto* p = std::get_if<ObjectPtr>(&v);
    return p ? p->get() : nullptr;
  }
};

struct Env;
using EnvPtr = std::shared_ptr<Env>;

struct Env {
  EnvPtr parent;
  std::vector<std::pair<Symbol, Value>> slots;
};

struct Pair {
  Value car;
  Value cdr;
};
struct Vector {
  std::vector<Value> elems;
  bool immutable = false;  // `(vector ...)` literals are immutable
};
struct ValueLess {
  bool operator()(const Value& a, const Value& b) const;
};
struct Hash {
  std::map<Value, Value, ValueLess> table;
};
struct Record {
  Symbol tag;
  std::vector<std::pair<Symbol, Value>> fields;
};
struct Closure {
  TermPtr lambda;   // a Lambda or a CaseLambda node
  EnvPtr env;
  std::size_t module = 0;
};
struct PrimitiveFn {
  Prim prim;
};
// A value guarded by a Deep-semantics contract.
struct Wrapped {
  Value inner;
  ContractPtr contract;
  BoundaryPtr boundary;
  bool swapped = false;  // argument-position wrapper: parties exchanged
};

struct Object {
  std::uint64_t id;  // identity; never reused within a heap
  std::variant<Pair, Vector, Hash, Record, Closure, PrimitiveFn, Wrapped> data;

  template <typename T>
  T* as() {
    return std::get_if<T>(&data);
  }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&data);
  }
};

/// Allocation and the proper-list cache for one runtime. Not thread-safe;
/// each evaluation owns its heap.
class Heap {
 public:
  Value alloc(decltype(Object::data) data);
  Value cons(Value car, Value cdr);
  Value list(const std::vector<Value>& elems);
  Value primitive(Prim p);

  std::uint64_t allocated() const { return next_id_ - 1; }

  // Proper-list cache over pair identities. Pairs are immutable, so
  // entries never need invalidation.
  bool known_proper(std::uint64_t pair_id) const { return proper_.count(pair_id) > 0; }
  void mark_proper(std::uint64_t pair_id) { proper_.insert(pair_id); }

  // Incremented for every pair cell a shape check traverses.
  std::uint64_t traversal_steps = 0;

 private:
  std::uint64_t next_id_ = 1;
  std::unordered_set<std::uint64_t> proper_;
  std::map<Prim, Value> prims_;
};

// Strips Deep wrappers (for printing and comparisons).
const Value& unwrap(const Value& v);

// Collects a proper list into a vector; false if `v` is not a proper list.
bool list_elements(const Value& v, std::vector<Value>& out);

std::string print_value(const Value& v);
// Short description for error messages: `"abc"`, `5`, `#<procedure:f>`, ...
std::string sketch(const Value& v);
bool values_equal(const Value& a, const Value& b);

bool is_procedure(const Value& v);
// Arity set of a procedure value (max arity kVariadic meaning unbounded).
bool procedure_accepts(const Value& v, std::size_t argc);

}  // namespace gtl
