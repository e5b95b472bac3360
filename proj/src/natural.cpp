#include "gtl/natural.hpp"

namespace gtl {

std::string ContractViolation::message() const {
  return "deep: boundary " + boundary->importer_loc.str() + " / " + boundary->exporter_loc.str() +
         ": blamed " + blamed.str() + ": expected " + expected + ", got " + witness;
}

ContractFailure::ContractFailure(ContractViolation v) : Error(v.message()), v_(std::move(v)) {}

namespace {

using K = Contract::Kind;

ContractPtr make(Contract c) { return std::make_shared<const Contract>(std::move(c)); }

ContractPtr reject(const TypePtr& t, std::string reason) {
  Contract c;
  c.kind = K::Reject;
  c.type = t;
  c.reason = std::move(reason);
  return make(std::move(c));
}

bool may_overlap(const Shape& a, const Shape& b) {
  using S = Shape::Kind;
  if (a.kind == S::Any || b.kind == S::Any) return true;
  if (a.kind == S::AnyOf) {
    for (const auto& m : a.members)
      if (may_overlap(m, b)) return true;
    return false;
  }
  if (b.kind == S::AnyOf) return may_overlap(b, a);
  auto family = [](S k) {
    switch (k) {
      case S::Int: case S::Nat: case S::Real: return 0;
      case S::Bool: return 1;
      case S::Str: return 2;
      case S::ProperList: case S::ListHead: return 3;
      case S::Vector: case S::VectorLen: return 4;
      case S::Hash: return 5;
      case S::RecordWith: return 6;
      case S::ProcArity: return 7;
      default: return 8;
    }
  };
  if (family(a.kind) != family(b.kind)) return false;
  if (a.kind == S::VectorLen && b.kind == S::VectorLen) return a.length == b.length;
  if (a.kind == S::RecordWith && b.kind == S::RecordWith) return a.tag == b.tag;
  if (a.kind == S::Int && b.kind == S::Int) return true;
  return true;
}

}  // namespace

ContractPtr compile_contract(const TypePtr& t) {
  if (t->is<Type::Forall>() || t->is<Type::TVar>())
    return reject(t, "no contract enforces a universal type");
  if (is_first_order(*t)) {
    Contract c;
    c.kind = K::Flat;
    c.type = t;
    return make(std::move(c));
  }
  Contract c;
  c.type = t;
  auto sub = [&](const TypePtr& x, ContractPtr& slot) {
    slot = compile_contract(x);
    return slot->kind != K::Reject;
  };
  if (t->is<Type::Fun>() || t->is<Type::CaseFun>()) {
    c.kind = K::FunGuard;
    std::vector<TypePtr> funs;
    if (const auto* cf = t->as<Type::CaseFun>()) funs = cf->branches;
    else funs.push_back(t);
    for (const auto& f : funs) {
      const auto& fn = *f->as<Type::Fun>();
      Contract::Branch br;
      for (const auto& p : fn.params) {
        ContractPtr pc;
        if (!sub(p, pc)) return pc;
        br.params.push_back(pc);
      }
      if (!sub(fn.result, br.result)) return br.result;
      c.branches.push_back(std::move(br));
    }
    return make(std::move(c));
  }
  if (const auto* v = t->as<Type::VecOf>()) {
    c.kind = K::VecGuard;
    if (!sub(v->elem, c.elem)) return c.elem;
    return make(std::move(c));
  }
  if (const auto* h = t->as<Type::Hash>()) {
    c.kind = K::HashGuard;
    if (!sub(h->key, c.key)) return c.key;
    if (!sub(h->val, c.val)) return c.val;
    return make(std::move(c));
  }
  if (const auto* l = t->as<Type::List>()) {
    c.kind = K::ListGuard;
    if (!sub(l->elem, c.elem)) return c.elem;
    return make(std::move(c));
  }
  if (const auto* v = t->as<Type::VecFixed>()) {
    c.kind = K::ListGuard;
    for (const auto& e : v->elems) {
      ContractPtr ec;
      if (!sub(e, ec)) return ec;
      c.elems.push_back(ec);
    }
    return make(std::move(c));
  }
  if (const auto* r = t->as<Type::Record>()) {
    c.kind = K::RecordGuard;
    for (const auto& [name, ft] : r->fields) {
      ContractPtr fc;
      if (!sub(ft, fc)) return fc;
      c.fields.emplace_back(name, fc);
    }
    return make(std::move(c));
  }
  if (const auto* u = t->as<Type::Union>()) {
    c.kind = K::UnionPick;
    for (const auto& m : u->members) {
      ContractPtr mc;
      if (!sub(m, mc)) return mc;
      Shape s = shape_of(m);
      for (const auto& [other, _] : c.members)
        if (may_overlap(s, other))
          return reject(t, "union members are not distinguishable by shape");
      c.members.emplace_back(std::move(s), mc);
    }
    return make(std::move(c));
  }
  return reject(t, "unsupported type");
}

bool deep_check(const Type& t, const Value& raw, Heap& heap, CostCounters& counters) {
  ++counters.flat_checks;
  const Value& v = unwrap(raw);
  if (const auto* b = t.as<Type::Base>()) {
    switch (b->kind) {
      case BaseType::Int: return v.is_int();
      case BaseType::Nat: return v.is_int() && v.as_int() >= 0;
      case BaseType::Real: return v.is_number();
      case BaseType::Bool: return v.is_bool();
      case BaseType::Str: return v.is_str();
    }
  }
  if (const auto* l = t.as<Type::List>()) {
    const Value* cur = &v;
    for (;;) {
      if (cur->is_empty()) return true;
      const Object* o = cur->object_or_null();
      const Pair* p = o ? o->as<Pair>() : nullptr;
      if (!p) return false;
      ++heap.traversal_steps;
      if (!deep_check(*l->elem, p->car, heap, counters)) return false;
      cur = &unwrap(p->cdr);
    }
  }
  if (const auto* vf = t.as<Type::VecFixed>()) {
    const Object* o = v.object_or_null();
    const auto* vec = o ? o->as<Vector>() : nullptr;
    if (!vec || vec->elems.size() != vf->elems.size()) return false;
    for (std::size_t i = 0; i < vf->elems.size(); ++i)
      if (!deep_check(*vf->elems[i], vec->elems[i], heap, counters)) return false;
    return true;
  }
  if (const auto* r = t.as<Type::Record>()) {
    const Object* o = v.object_or_null();
    const auto* rec = o ? o->as<Record>() : nullptr;
    if (!rec || rec->tag != r->tag) return false;
    for (const auto& [name, ft] : r->fields) {
      const Value* fv = nullptr;
      for (const auto& [n, val] : rec->fields)
        if (n == name) fv = &val;
      if (!fv || !deep_check(*ft, *fv, heap, counters)) return false;
    }
    return true;
  }
  if (const auto* u = t.as<Type::Union>()) {
    for (const auto& m : u->members)
      if (deep_check(*m, v, heap, counters)) return true;
    return false;
  }
  return false;
}

namespace {

[[noreturn]] void fail(const BoundaryPtr& b, bool blame_producer, bool swapped,
                       const TypePtr& expected, const Value& v) {
  // Producer is the positive party unless the wrapper sits in argument
  // position, where roles are exchanged.
  const bool positive = blame_producer != swapped;
  throw ContractFailure(ContractViolation{b, positive ? b->positive : b->negative,
                                          to_string(expected), sketch(v)});
}

Value wrap(const ContractPtr& c, const Value& v, const BoundaryPtr& b, bool swapped, ContractHost& host) {
  ++host.counters().wrappers_allocated;
  return host.heap().alloc(Wrapped{v, c, b, swapped});
}

}  // namespace

Value apply_contract(const ContractPtr& c, const Value& v, const BoundaryPtr& b, bool swapped,
                     ContractHost& host) {
  Heap& heap = host.heap();
  switch (c->kind) {
    case K::Flat:
      if (!deep_check(*c->type, v, heap, host.counters())) fail(b, true, swapped, c->type, v);
      return v;
    case K::FunGuard: {
      ++host.counters().flat_checks;
      if (!is_procedure(v)) fail(b, true, swapped, c->type, v);
      for (const auto& br : c->branches)
        if (!procedure_accepts(v, br.params.size())) fail(b, true, swapped, c->type, v);
      return wrap(c, v, b, swapped, host);
    }
    case K::VecGuard:
    case K::HashGuard:
    case K::RecordGuard: {
      ++host.counters().flat_checks;
      const Object* o = unwrap(v).object_or_null();
      bool ok = false;
      if (c->kind == K::VecGuard) ok = o && o->as<Vector>();
      if (c->kind == K::HashGuard) ok = o && o->as<Hash>();
      if (c->kind == K::RecordGuard) {
        const auto* rec = o ? o->as<Record>() : nullptr;
        ok = rec && rec->tag == c->type->as<Type::Record>()->tag;
        for (const auto& [name, _] : c->fields) {
          bool found = false;
          for (const auto& f : rec ? rec->fields : std::vector<std::pair<Symbol, Value>>{})
            found = found || f.first == name;
          ok = ok && found;
        }
      }
      if (!ok) fail(b, true, swapped, c->type, v);
      return wrap(c, v, b, swapped, host);
    }
    case K::ListGuard: {
      ++host.counters().flat_checks;
      if (c->type->is<Type::List>()) {
        std::vector<Value> elems;
        if (!list_elements(v, elems)) fail(b, true, swapped, c->type, v);
        heap.traversal_steps += elems.size();
        for (auto& e : elems) e = apply_contract(c->elem, e, b, swapped, host);
        return heap.list(elems);
      }
      const Object* o = unwrap(v).object_or_null();
      const auto* vec = o ? o->as<Vector>() : nullptr;
      if (!vec || vec->elems.size() != c->elems.size()) fail(b, true, swapped, c->type, v);
      Vector copy{vec->elems, true};
      for (std::size_t i = 0; i < copy.elems.size(); ++i)
        copy.elems[i] = apply_contract(c->elems[i], copy.elems[i], b, swapped, host);
      return heap.alloc(std::move(copy));
    }
    case K::UnionPick:
      for (const auto& [shape, mc] : c->members)
        if (check_shape(shape, v, heap).pass) return apply_contract(mc, v, b, swapped, host);
      fail(b, true, swapped, c->type, v);
    case K::Reject:
      throw ContractFailure(ContractViolation{b, swapped ? b->positive : b->negative,
                                              to_string(c->type) + " (" + c->reason + ")",
                                              sketch(v)});
  }
  return v;
}

Value call_wrapped(const Value& wrapper, std::vector<Value> args, ContractHost& host) {
  const auto& w = *wrapper.as_object()->as<Wrapped>();
  const Contract& c = *w.contract;
  ++host.counters().wrapped_calls;
  const Contract::Branch* br = nullptr;
  for (const auto& b : c.branches)
    if (b.params.size() == args.size()) br = &b;
  if (!br) {
    // The consumer called with an arity the type does not allow.
    throw ContractFailure(ContractViolation{
        w.boundary, w.swapped ? w.boundary->positive : w.boundary->negative, to_string(c.type),
        std::to_string(args.size()) + " argument(s)"});
  }
  for (std::size_t i = 0; i < args.size(); ++i)
    args[i] = apply_contract(br->params[i], args[i], w.boundary, !w.swapped, host);
  Value result = host.call(w.inner, std::move(args));
  return apply_contract(br->result, result, w.boundary, w.swapped, host);
}

Value guarded_read(const Wrapped& w, const Value& raw, const Contract& part, ContractHost& host) {
  return apply_contract(std::shared_ptr<const Contract>(std::shared_ptr<const Contract>{}, &part),
                        raw, w.boundary, w.swapped, host);
}

Value guarded_write(const Wrapped& w, const Value& raw, const Contract& part, ContractHost& host) {
  return apply_contract(std::shared_ptr<const Contract>(std::shared_ptr<const Contract>{}, &part),
                        raw, w.boundary, !w.swapped, host);
}

}  // namespace gtl
