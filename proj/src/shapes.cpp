#include "gtl/shapes.hpp"

#include <algorithm>

namespace gtl {

Shape Shape::vector_len(std::size_t n) {
  Shape s = of(Kind::VectorLen);
  s.length = n;
  return s;
}

Shape Shape::record_with(Symbol tag, std::vector<Symbol> fields) {
  Shape s = of(Kind::RecordWith);
  s.tag = tag;
  s.fields = std::move(fields);
  return s;
}

Shape Shape::proc_arity(std::vector<std::size_t> arities) {
  std::sort(arities.begin(), arities.end());
  arities.erase(std::unique(arities.begin(), arities.end()), arities.end());
  Shape s = of(Kind::ProcArity);
  s.arities = std::move(arities);
  return s;
}

Shape Shape::any_of(std::vector<Shape> members) {
  std::vector<Shape> flat;
  for (auto& m : members) {
    if (m.kind == Kind::Any) return of(Kind::Any);
    if (m.kind == Kind::Unsupported) return m;
    auto add = [&](Shape x) {
      if (std::find(flat.begin(), flat.end(), x) == flat.end()) flat.push_back(std::move(x));
    };
    if (m.kind == Kind::AnyOf)
      for (auto& x : m.members) add(x);
    else
      add(std::move(m));
  }
  if (flat.size() == 1) return flat.front();
  Shape s = of(Kind::AnyOf);
  s.members = std::move(flat);
  return s;
}

Shape Shape::unsupported(std::string reason) {
  Shape s = of(Kind::Unsupported);
  s.reason = std::move(reason);
  return s;
}

bool operator==(const Shape& a, const Shape& b) {
  return a.kind == b.kind && a.length == b.length && a.tag == b.tag && a.fields == b.fields &&
         a.arities == b.arities && a.members == b.members && a.reason == b.reason;
}

namespace {

// True when `var` can stand for the whole value, i.e. it appears outside
// every type constructor.
bool top_position(Symbol var, const Type& t) {
  if (const auto* v = t.as<Type::TVar>()) return v->name == var;
  if (const auto* u = t.as<Type::Union>()) {
    for (const auto& m : u->members)
      if (top_position(var, *m)) return true;
    return false;
  }
  if (const auto* f = t.as<Type::Forall>()) return f->var != var && top_position(var, *f->body);
  return false;
}

}  // namespace

Shape shape_of(const Type& t, const ShapeOptions& opts) {
  using K = Shape::Kind;
  if (const auto* b = t.as<Type::Base>()) {
    switch (b->kind) {
      case BaseType::Int: return Shape::of(K::Int);
      case BaseType::Nat: return Shape::of(K::Nat);
      case BaseType::Real: return Shape::of(K::Real);
      case BaseType::Bool: return Shape::of(K::Bool);
      case BaseType::Str: return Shape::of(K::Str);
    }
  }
  if (const auto* f = t.as<Type::Fun>()) return Shape::proc_arity({f->params.size()});
  if (t.is<Type::CaseFun>()) return Shape::proc_arity(arities(t));
  if (t.is<Type::List>()) return Shape::of(opts.lax ? K::ListHead : K::ProperList);
  if (const auto* v = t.as<Type::VecFixed>()) return Shape::vector_len(v->elems.size());
  if (t.is<Type::VecOf>()) return Shape::of(K::Vector);
  if (t.is<Type::Hash>()) return Shape::of(K::Hash);
  if (const auto* r = t.as<Type::Record>()) {
    std::vector<Symbol> names;
    for (const auto& f : r->fields) names.push_back(f.first);
    return Shape::record_with(r->tag, std::move(names));
  }
  if (const auto* u = t.as<Type::Union>()) {
    if (opts.lax) return Shape::of(K::Any);
    std::vector<Shape> members;
    for (const auto& m : u->members) members.push_back(shape_of(*m, opts));
    return Shape::any_of(std::move(members));
  }
  if (const auto* fa = t.as<Type::Forall>()) {
    if (top_position(fa->var, *fa->body))
      return Shape::unsupported("type variable " + fa->var.str() + " is not under a constructor");
    return shape_of(*fa->body, opts);
  }
  return Shape::of(K::Any);  // TVar
}

namespace {

bool proper_list(const Value& v, Heap& heap) {
  std::vector<std::uint64_t> seen;
  const Value* cur = &unwrap(v);
  bool ok = false;
  for (;;) {
    if (cur->is_empty()) {
      ok = true;
      break;
    }
    const Object* o = cur->object_or_null();
    const Pair* p = o ? o->as<Pair>() : nullptr;
    if (!p) break;
    if (heap.known_proper(o->id)) {
      ok = true;
      break;
    }
    ++heap.traversal_steps;
    seen.push_back(o->id);
    cur = &unwrap(p->cdr);
  }
  if (ok)
    for (auto id : seen) heap.mark_proper(id);
  return ok;
}

bool member(const Shape& s, const Value& raw, Heap& heap) {
  using K = Shape::Kind;
  const Value& v = unwrap(raw);
  switch (s.kind) {
    case K::Int: return v.is_int();
    case K::Nat: return v.is_int() && v.as_int() >= 0;
    case K::Real: return v.is_number();
    case K::Bool: return v.is_bool();
    case K::Str: return v.is_str();
    case K::ProperList: return proper_list(v, heap);
    case K::ListHead: {
      if (v.is_empty()) return true;
      const Object* o = v.object_or_null();
      return o && o->as<Pair>();
    }
    case K::Vector:
    case K::VectorLen: {
      const Object* o = v.object_or_null();
      const auto* vec = o ? o->as<Vector>() : nullptr;
      return vec && (s.kind == K::Vector || vec->elems.size() == s.length);
    }
    case K::Hash: {
      const Object* o = v.object_or_null();
      return o && o->as<Hash>();
    }
    case K::RecordWith: {
      const Object* o = v.object_or_null();
      const auto* r = o ? o->as<Record>() : nullptr;
      if (!r || r->tag != s.tag) return false;
      for (const auto& f : s.fields) {
        bool found = false;
        for (const auto& [name, _] : r->fields) found = found || name == f;
        if (!found) return false;
      }
      return true;
    }
    case K::ProcArity:
      if (!is_procedure(v)) return false;
      for (auto n : s.arities)
        if (!procedure_accepts(v, n)) return false;
      return true;
    case K::AnyOf:
      for (const auto& m : s.members)
        if (member(m, v, heap)) return true;
      return false;
    case K::Any: return true;
    case K::Unsupported: return false;
  }
  return false;
}

}  // namespace

ShapeCheckOutcome check_shape(const Shape& s, const Value& v, Heap& heap) {
  if (member(s, v, heap)) return {};
  return {false, sketch(v)};
}

std::string to_string(const Shape& s) {
  using K = Shape::Kind;
  switch (s.kind) {
    case K::Int: return "integer?";
    case K::Nat: return "natural?";
    case K::Real: return "real?";
    case K::Bool: return "boolean?";
    case K::Str: return "string?";
    case K::ProperList: return "list?";
    case K::ListHead: return "(or null? pair?)";
    case K::Vector: return "vector?";
    case K::VectorLen: return "(vector/len " + std::to_string(s.length) + ")";
    case K::Hash: return "hash?";
    case K::RecordWith: {
      std::string out = "(record/with " + s.tag.str();
      for (const auto& f : s.fields) out += " " + f.str();
      return out + ")";
    }
    case K::ProcArity: {
      std::string out = "(arity-includes";
      for (auto n : s.arities) out += " " + std::to_string(n);
      return out + ")";
    }
    case K::AnyOf: {
      std::string out = "(or";
      for (const auto& m : s.members) out += " " + to_string(m);
      return out + ")";
    }
    case K::Any: return "any/c";
    case K::Unsupported: return "(unsupported: " + s.reason + ")";
  }
  return "?";
}

bool weak_soundness_probe(const TypePtr& static_type, const Value& v, Heap& heap) {
  if (!static_type) return true;
  Shape s = shape_of(static_type);
  if (!s.supported()) return true;
  return check_shape(s, v, heap).pass;
}

}  // namespace gtl
