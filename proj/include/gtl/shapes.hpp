#pragma once

#include <string>
#include <vector>

#include "gtl/types.hpp"
#include "gtl/value.hpp"

namespace gtl {

/// First-order property of a type's outermost constructor.
struct Shape {
  enum class Kind {
    Int, Nat, Real, Bool, Str,
    ProperList,
    ListHead,  // lax mode only: empty or a pair
    Vector, VectorLen, Hash, RecordWith, ProcArity, AnyOf, Any, Unsupported,
  };

  Kind kind = Kind::Any;
  std::size_t length = 0;            // VectorLen
  Symbol tag;                        // RecordWith
  std::vector<Symbol> fields;        // RecordWith
  std::vector<std::size_t> arities;  // ProcArity, sorted
  std::vector<Shape> members;        // AnyOf
  std::string reason;                // Unsupported

  static Shape of(Kind k) {
    Shape s;
    s.kind = k;
    return s;
  }
  static Shape vector_len(std::size_t n);
  static Shape record_with(Symbol tag, std::vector<Symbol> fields);
  static Shape proc_arity(std::vector<std::size_t> arities);
  // Collapses to the single member when only one remains.
  static Shape any_of(std::vector<Shape> members);
  static Shape unsupported(std::string reason);

  bool supported() const { return kind != Kind::Unsupported; }
  bool trivial() const { return kind == Kind::Any; }
  friend bool operator==(const Shape& a, const Shape& b);
};

struct ShapeOptions {
  // Unions become any/c and lists only get a head test.
  bool lax = false;
};

Shape shape_of(const Type& t, const ShapeOptions& opts = {});
inline Shape shape_of(const TypePtr& t, const ShapeOptions& opts = {}) { return shape_of(*t, opts); }

struct ShapeCheckOutcome {
  bool pass = true;
  std::string witness;  // nonempty on failure
};

/// Decides membership. List traversal consults and fills the heap's
/// proper-list cache and counts traversed cells in heap.traversal_steps.
ShapeCheckOutcome check_shape(const Shape& s, const Value& v, Heap& heap);

// `list?`, `(vector/len 2)`, `(or real? string? list?)`, ...
std::string to_string(const Shape& s);

// Shallow's weak soundness: the value fits the outline of its static type.
bool weak_soundness_probe(const TypePtr& static_type, const Value& v, Heap& heap);

}  // namespace gtl
