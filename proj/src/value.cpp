#include "gtl/value.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace gtl {

Value Heap::alloc(decltype(Object::data) data) {
  return Value::object(std::make_shared<Object>(Object{next_id_++, std::move(data)}));
}

Value Heap::cons(Value car, Value cdr) { return alloc(Pair{std::move(car), std::move(cdr)}); }

Value Heap::list(const std::vector<Value>& elems) {
  Value out = Value::empty();
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) out = cons(*it, std::move(out));
  return out;
}

Value Heap::primitive(Prim p) {
  auto it = prims_.find(p);
  if (it != prims_.end()) return it->second;
  return prims_.emplace(p, alloc(PrimitiveFn{p})).first->second;
}

const Value& unwrap(const Value& v) {
  const Value* cur = &v;
  while (const Object* o = cur->object_or_null()) {
    const auto* w = o->as<Wrapped>();
    if (!w) break;
    cur = &w->inner;
  }
  return *cur;
}

bool list_elements(const Value& v, std::vector<Value>& out) {
  const Value* cur = &unwrap(v);
  while (!cur->is_empty()) {
    const Object* o = cur->object_or_null();
    const Pair* p = o ? o->as<Pair>() : nullptr;
    if (!p) return false;
    out.push_back(p->car);
    cur = &unwrap(p->cdr);
  }
  return true;
}

namespace {

std::string real_text(double d) {
  if (std::isnan(d)) return "+nan.0";
  if (std::isinf(d)) return d > 0 ? "+inf.0" : "-inf.0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

void print(std::ostream& out, const Value& raw) {
  const Value& v = unwrap(raw);
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Undefined>) out << "#<undefined>";
        else if constexpr (std::is_same_v<X, std::int64_t>) out << x;
        else if constexpr (std::is_same_v<X, double>) out << real_text(x);
        else if constexpr (std::is_same_v<X, bool>) out << (x ? "#t" : "#f");
        else if constexpr (std::is_same_v<X, StrPtr>) out << quoted(*x);
        else if constexpr (std::is_same_v<X, EmptyList>) out << "()";
        else if constexpr (std::is_same_v<X, Sentinel>) out << "#<eof>";
        else {
          const Object& o = *x;
          if (o.as<Pair>()) {
            out << '(';
            const Value* cur = &v;
            bool first = true;
            for (;;) {
              const Object* co = cur->object_or_null();
              const Pair* p = co ? co->as<Pair>() : nullptr;
              if (!p) break;
              if (!first) out << ' ';
              first = false;
              print(out, p->car);
              cur = &unwrap(p->cdr);
            }
            if (!cur->is_empty()) {
              out << " . ";
              print(out, *cur);
            }
            out << ')';
          } else if (const auto* vec = o.as<Vector>()) {
            out << "#(";
            for (std::size_t i = 0; i < vec->elems.size(); ++i) {
              if (i) out << ' ';
              print(out, vec->elems[i]);
            }
            out << ')';
          } else if (const auto* h = o.as<Hash>()) {
            out << "#hash(";
            bool first = true;
            for (const auto& [k, val] : h->table) {
              if (!first) out << ' ';
              first = false;
              out << '(';
              print(out, k);
              out << " . ";
              print(out, val);
              out << ')';
            }
            out << ')';
          } else if (const auto* r = o.as<Record>()) {
            out << "#<" << r->tag.str();
            for (const auto& [name, val] : r->fields) {
              out << ' ' << name.str() << '=';
              print(out, val);
            }
            out << '>';
          } else if (const auto* p = o.as<PrimitiveFn>()) {
            out << "#<procedure:" << prim_sig(p->prim).name << '>';
          } else {
            out << "#<procedure>";
          }
        }
      },
      v.v);
}

int kind_rank(const Value& v) { return static_cast<int>(v.v.index()); }

}  // namespace

bool ValueLess::operator()(const Value& a, const Value& b) const {
  // Numbers compare by value across int/real so 1 and 1.0 are distinct
  // keys only when they differ numerically.
  if (a.is_number() && b.is_number()) {
    if (a.is_int() && b.is_int()) return a.as_int() < b.as_int();
    if (a.as_number() != b.as_number()) return a.as_number() < b.as_number();
    return a.is_int() && !b.is_int();
  }
  if (kind_rank(a) != kind_rank(b)) return kind_rank(a) < kind_rank(b);
  if (a.is_bool()) return a.as_bool() < b.as_bool();
  if (a.is_str()) return a.as_str() < b.as_str();
  if (a.is_object()) return a.as_object()->id < b.as_object()->id;
  return false;
}

std::string print_value(const Value& v) {
  std::ostringstream out;
  print(out, v);
  return out.str();
}

std::string sketch(const Value& v) {
  std::string s = print_value(v);
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

bool values_equal(const Value& ra, const Value& rb) {
  const Value& a = unwrap(ra);
  const Value& b = unwrap(rb);
  if (a.v.index() != b.v.index()) return false;
  if (a.is_int()) return a.as_int() == b.as_int();
  if (a.is_real()) return a.as_number() == b.as_number();
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_str()) return a.as_str() == b.as_str();
  if (!a.is_object()) return true;
  const Object& x = *a.as_object();
  const Object& y = *b.as_object();
  if (&x == &y) return true;
  if (x.data.index() != y.data.index()) return false;
  if (const auto* p = x.as<Pair>()) {
    const auto* q = y.as<Pair>();
    return values_equal(p->car, q->car) && values_equal(p->cdr, q->cdr);
  }
  if (const auto* p = x.as<Vector>()) {
    const auto* q = y.as<Vector>();
    if (p->elems.size() != q->elems.size()) return false;
    for (std::size_t i = 0; i < p->elems.size(); ++i)
      if (!values_equal(p->elems[i], q->elems[i])) return false;
    return true;
  }
  if (const auto* p = x.as<Hash>()) {
    const auto* q = y.as<Hash>();
    if (p->table.size() != q->table.size()) return false;
    for (const auto& [k, val] : p->table) {
      auto it = q->table.find(k);
      if (it == q->table.end() || !values_equal(val, it->second)) return false;
    }
    return true;
  }
  if (const auto* p = x.as<Record>()) {
    const auto* q = y.as<Record>();
    if (p->tag != q->tag || p->fields.size() != q->fields.size()) return false;
    for (std::size_t i = 0; i < p->fields.size(); ++i)
      if (p->fields[i].first != q->fields[i].first ||
          !values_equal(p->fields[i].second, q->fields[i].second))
        return false;
    return true;
  }
  if (const auto* p = x.as<PrimitiveFn>()) return p->prim == y.as<PrimitiveFn>()->prim;
  return false;
}

bool is_procedure(const Value& raw) {
  const Object* o = unwrap(raw).object_or_null();
  return o && (o->as<Closure>() || o->as<PrimitiveFn>());
}

bool procedure_accepts(const Value& raw, std::size_t argc) {
  const Object* o = unwrap(raw).object_or_null();
  if (!o) return false;
  if (const auto* p = o->as<PrimitiveFn>()) return prim_accepts(p->prim, argc);
  const auto* c = o->as<Closure>();
  if (!c) return false;
  if (const auto* l = c->lambda->as<Term::Lambda>()) return l->params.size() == argc;
  for (const auto& clause : c->lambda->as<Term::CaseLambda>()->clauses)
    if (clause->as<Term::Lambda>()->params.size() == argc) return true;
  return false;
}

}  // namespace gtl
