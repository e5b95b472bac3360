#include "gtl/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gtl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

TypePtr make(Type::Node node) { return std::make_shared<const Type>(Type{std::move(node)}); }

bool all_equal(const std::vector<TypePtr>& a, const std::vector<TypePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!type_equal(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

namespace ty {

TypePtr base(BaseType kind) {
  static const TypePtr cache[] = {
      make(Type::Base{BaseType::Int}), make(Type::Base{BaseType::Nat}),
      make(Type::Base{BaseType::Real}), make(Type::Base{BaseType::Bool}),
      make(Type::Base{BaseType::Str})};
  return cache[static_cast<int>(kind)];
}
TypePtr int_() { return base(BaseType::Int); }
TypePtr nat() { return base(BaseType::Nat); }
TypePtr real() { return base(BaseType::Real); }
TypePtr bool_() { return base(BaseType::Bool); }
TypePtr str() { return base(BaseType::Str); }

TypePtr fun(std::vector<TypePtr> params, TypePtr result) {
  return make(Type::Fun{std::move(params), std::move(result)});
}

TypePtr case_fun(std::vector<TypePtr> branches) {
  std::set<std::size_t> seen;
  for (const auto& b : branches) {
    const auto* f = b->as<Type::Fun>();
    if (!f) throw TypeError("case-> branch is not a function type");
    if (!seen.insert(f->params.size()).second)
      throw TypeError("case-> branches must have distinct arities");
  }
  if (branches.size() == 1) return branches.front();
  return make(Type::CaseFun{std::move(branches)});
}

TypePtr list(TypePtr elem) { return make(Type::List{std::move(elem)}); }
TypePtr vec_fixed(std::vector<TypePtr> elems) { return make(Type::VecFixed{std::move(elems)}); }
TypePtr vec_of(TypePtr elem) { return make(Type::VecOf{std::move(elem)}); }
TypePtr hash(TypePtr key, TypePtr val) { return make(Type::Hash{std::move(key), std::move(val)}); }

TypePtr record(Symbol tag, std::vector<std::pair<Symbol, TypePtr>> fields) {
  std::set<Symbol> names;
  for (const auto& [name, _] : fields)
    if (!names.insert(name).second) throw TypeError("duplicate record field " + name.str());
  return make(Type::Record{tag, std::move(fields)});
}

TypePtr union_(std::vector<TypePtr> members) {
  std::vector<TypePtr> flat;
  for (auto& m : members) {
    if (const auto* u = m->as<Type::Union>()) {
      for (const auto& inner : u->members) flat.push_back(inner);
    } else {
      flat.push_back(std::move(m));
    }
  }
  std::vector<TypePtr> unique;
  for (auto& m : flat) {
    bool dup = std::any_of(unique.begin(), unique.end(),
                           [&](const TypePtr& u) { return type_equal(*u, *m); });
    if (!dup) unique.push_back(std::move(m));
  }
  if (unique.empty()) throw TypeError("empty union");
  if (unique.size() == 1) return unique.front();
  return make(Type::Union{std::move(unique)});
}

TypePtr forall(Symbol var, TypePtr body) { return make(Type::Forall{var, std::move(body)}); }
TypePtr tvar(Symbol name) { return make(Type::TVar{name}); }

}  // namespace ty

bool type_equal(const Type& a, const Type& b) {
  if (&a == &b) return true;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Type::Base& x) { return x.kind == b.as<Type::Base>()->kind; },
          [&](const Type::Fun& x) {
            const auto& y = *b.as<Type::Fun>();
            return all_equal(x.params, y.params) && type_equal(*x.result, *y.result);
          },
          [&](const Type::CaseFun& x) { return all_equal(x.branches, b.as<Type::CaseFun>()->branches); },
          [&](const Type::List& x) { return type_equal(*x.elem, *b.as<Type::List>()->elem); },
          [&](const Type::VecFixed& x) { return all_equal(x.elems, b.as<Type::VecFixed>()->elems); },
          [&](const Type::VecOf& x) { return type_equal(*x.elem, *b.as<Type::VecOf>()->elem); },
          [&](const Type::Hash& x) {
            const auto& y = *b.as<Type::Hash>();
            return type_equal(*x.key, *y.key) && type_equal(*x.val, *y.val);
          },
          [&](const Type::Record& x) {
            const auto& y = *b.as<Type::Record>();
            if (x.tag != y.tag || x.fields.size() != y.fields.size()) return false;
            for (std::size_t i = 0; i < x.fields.size(); ++i)
              if (x.fields[i].first != y.fields[i].first ||
                  !type_equal(*x.fields[i].second, *y.fields[i].second))
                return false;
            return true;
          },
          [&](const Type::Union& x) {
            // Member order is not significant.
            const auto& y = *b.as<Type::Union>();
            if (x.members.size() != y.members.size()) return false;
            for (const auto& m : x.members) {
              bool found = std::any_of(y.members.begin(), y.members.end(),
                                       [&](const TypePtr& n) { return type_equal(*m, *n); });
              if (!found) return false;
            }
            return true;
          },
          [&](const Type::Forall& x) {
            const auto& y = *b.as<Type::Forall>();
            if (x.var == y.var) return type_equal(*x.body, *y.body);
            return type_equal(*x.body, *substitute(y.body, y.var, ty::tvar(x.var)));
          },
          [&](const Type::TVar& x) { return x.name == b.as<Type::TVar>()->name; },
      },
      a.node);
}

std::string to_string(const Type& t) {
  std::ostringstream out;
  auto seq = [&](const std::vector<TypePtr>& ts) {
    for (const auto& x : ts) out << ' ' << to_string(*x);
  };
  std::visit(overloaded{
                 [&](const Type::Base& x) {
                   static const char* names[] = {"Int", "Nat", "Real", "Bool", "Str"};
                   out << names[static_cast<int>(x.kind)];
                 },
                 [&](const Type::Fun& x) {
                   out << "(->";
                   seq(x.params);
                   out << ' ' << to_string(*x.result) << ')';
                 },
                 [&](const Type::CaseFun& x) {
                   out << "(case->";
                   seq(x.branches);
                   out << ')';
                 },
                 [&](const Type::List& x) { out << "(Listof " << to_string(*x.elem) << ')'; },
                 [&](const Type::VecFixed& x) {
                   out << "(Vector";
                   seq(x.elems);
                   out << ')';
                 },
                 [&](const Type::VecOf& x) { out << "(Vectorof " << to_string(*x.elem) << ')'; },
                 [&](const Type::Hash& x) {
                   out << "(HashTable " << to_string(*x.key) << ' ' << to_string(*x.val) << ')';
                 },
                 [&](const Type::Record& x) {
                   out << "(Record " << x.tag.str();
                   for (const auto& [name, ft] : x.fields)
                     out << " [" << name.str() << ' ' << to_string(*ft) << ']';
                   out << ')';
                 },
                 [&](const Type::Union& x) {
                   out << "(U";
                   seq(x.members);
                   out << ')';
                 },
                 [&](const Type::Forall& x) {
                   out << "(All (" << x.var.str() << ") " << to_string(*x.body) << ')';
                 },
                 [&](const Type::TVar& x) { out << x.name.str(); },
             },
             t.node);
  return out.str();
}

namespace {

bool numeric_sub(BaseType a, BaseType b) {
  if (a == b) return true;
  if (a == BaseType::Nat) return b == BaseType::Int || b == BaseType::Real;
  if (a == BaseType::Int) return b == BaseType::Real;
  return false;
}

bool fun_sub(const Type::Fun& a, const Type::Fun& b) {
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (!subtype(b.params[i], a.params[i])) return false;
  return subtype(a.result, b.result);
}

bool mutual(const TypePtr& a, const TypePtr& b) { return subtype(a, b) && subtype(b, a); }

}  // namespace

bool subtype(const TypePtr& a, const TypePtr& b) {
  if (type_equal(*a, *b)) return true;
  if (const auto* u = a->as<Type::Union>()) {
    return std::all_of(u->members.begin(), u->members.end(),
                       [&](const TypePtr& m) { return subtype(m, b); });
  }
  if (const auto* u = b->as<Type::Union>()) {
    return std::any_of(u->members.begin(), u->members.end(),
                       [&](const TypePtr& m) { return subtype(a, m); });
  }
  if (const auto* x = a->as<Type::Base>()) {
    const auto* y = b->as<Type::Base>();
    return y && numeric_sub(x->kind, y->kind);
  }
  if (const auto* x = a->as<Type::Fun>()) {
    if (const auto* y = b->as<Type::Fun>()) return fun_sub(*x, *y);
    if (const auto* y = b->as<Type::CaseFun>()) {
      return std::all_of(y->branches.begin(), y->branches.end(), [&](const TypePtr& br) {
        return fun_sub(*x, *br->as<Type::Fun>());
      });
    }
    return false;
  }
  if (const auto* x = a->as<Type::CaseFun>()) {
    auto covered = [&](const Type::Fun& target) {
      return std::any_of(x->branches.begin(), x->branches.end(), [&](const TypePtr& br) {
        return fun_sub(*br->as<Type::Fun>(), target);
      });
    };
    if (const auto* y = b->as<Type::Fun>()) return covered(*y);
    if (const auto* y = b->as<Type::CaseFun>()) {
      return std::all_of(y->branches.begin(), y->branches.end(),
                         [&](const TypePtr& br) { return covered(*br->as<Type::Fun>()); });
    }
    return false;
  }
  if (const auto* x = a->as<Type::List>()) {
    const auto* y = b->as<Type::List>();
    return y && subtype(x->elem, y->elem);
  }
  if (const auto* x = a->as<Type::VecFixed>()) {
    // Literal vectors are immutable, so they are covariant.
    const auto* y = b->as<Type::VecFixed>();
    if (!y || x->elems.size() != y->elems.size()) return false;
    for (std::size_t i = 0; i < x->elems.size(); ++i)
      if (!subtype(x->elems[i], y->elems[i])) return false;
    return true;
  }
  if (const auto* x = a->as<Type::VecOf>()) {
    const auto* y = b->as<Type::VecOf>();
    return y && mutual(x->elem, y->elem);
  }
  if (const auto* x = a->as<Type::Hash>()) {
    const auto* y = b->as<Type::Hash>();
    return y && mutual(x->key, y->key) && mutual(x->val, y->val);
  }
  if (const auto* x = a->as<Type::Record>()) {
    const auto* y = b->as<Type::Record>();
    if (!y || x->tag != y->tag) return false;
    for (const auto& [name, ft] : y->fields) {
      auto it = std::find_if(x->fields.begin(), x->fields.end(),
                             [&](const auto& f) { return f.first == name; });
      if (it == x->fields.end() || !subtype(it->second, ft)) return false;
    }
    return true;
  }
  if (const auto* x = a->as<Type::Forall>()) {
    const auto* y = b->as<Type::Forall>();
    if (!y) return false;
    return subtype(x->body, substitute(y->body, y->var, ty::tvar(x->var)));
  }
  return false;  // TVar: only reflexive
}

TypePtr join(const TypePtr& a, const TypePtr& b) {
  if (subtype(a, b)) return b;
  if (subtype(b, a)) return a;
  return ty::union_({a, b});
}

TypePtr substitute(const TypePtr& t, Symbol var, const TypePtr& replacement) {
  auto sub = [&](const TypePtr& x) { return substitute(x, var, replacement); };
  auto subs = [&](const std::vector<TypePtr>& xs) {
    std::vector<TypePtr> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(sub(x));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const Type::Base&) { return t; },
          [&](const Type::Fun& x) { return ty::fun(subs(x.params), sub(x.result)); },
          [&](const Type::CaseFun& x) { return make(Type::CaseFun{subs(x.branches)}); },
          [&](const Type::List& x) { return ty::list(sub(x.elem)); },
          [&](const Type::VecFixed& x) { return ty::vec_fixed(subs(x.elems)); },
          [&](const Type::VecOf& x) { return ty::vec_of(sub(x.elem)); },
          [&](const Type::Hash& x) { return ty::hash(sub(x.key), sub(x.val)); },
          [&](const Type::Record& x) {
            std::vector<std::pair<Symbol, TypePtr>> fields;
            for (const auto& [n, ft] : x.fields) fields.emplace_back(n, sub(ft));
            return make(Type::Record{x.tag, std::move(fields)});
          },
          [&](const Type::Union& x) { return ty::union_(subs(x.members)); },
          [&](const Type::Forall& x) -> TypePtr {
            if (x.var == var) return t;
            if (occurs_free(x.var, *replacement)) {
              // Rename the binder to avoid capture.
              Symbol fresh(x.var.str() + "'");
              while (occurs_free(fresh, *replacement) || occurs_free(fresh, *x.body))
                fresh = Symbol(fresh.str() + "'");
              auto renamed = substitute(x.body, x.var, ty::tvar(fresh));
              return ty::forall(fresh, substitute(renamed, var, replacement));
            }
            return ty::forall(x.var, sub(x.body));
          },
          [&](const Type::TVar& x) { return x.name == var ? replacement : t; },
      },
      t->node);
}

bool occurs_free(Symbol var, const Type& t) {
  auto any = [&](const std::vector<TypePtr>& xs) {
    return std::any_of(xs.begin(), xs.end(), [&](const TypePtr& x) { return occurs_free(var, *x); });
  };
  return std::visit(
      overloaded{
          [&](const Type::Base&) { return false; },
          [&](const Type::Fun& x) { return any(x.params) || occurs_free(var, *x.result); },
          [&](const Type::CaseFun& x) { return any(x.branches); },
          [&](const Type::List& x) { return occurs_free(var, *x.elem); },
          [&](const Type::VecFixed& x) { return any(x.elems); },
          [&](const Type::VecOf& x) { return occurs_free(var, *x.elem); },
          [&](const Type::Hash& x) { return occurs_free(var, *x.key) || occurs_free(var, *x.val); },
          [&](const Type::Record& x) {
            return std::any_of(x.fields.begin(), x.fields.end(),
                               [&](const auto& f) { return occurs_free(var, *f.second); });
          },
          [&](const Type::Union& x) { return any(x.members); },
          [&](const Type::Forall& x) { return x.var != var && occurs_free(var, *x.body); },
          [&](const Type::TVar& x) { return x.name == var; },
      },
      t.node);
}

namespace {

bool closed_under(const Type& t, std::vector<Symbol>& bound) {
  auto all = [&](const std::vector<TypePtr>& xs) {
    return std::all_of(xs.begin(), xs.end(), [&](const TypePtr& x) { return closed_under(*x, bound); });
  };
  return std::visit(
      overloaded{
          [&](const Type::Base&) { return true; },
          [&](const Type::Fun& x) { return all(x.params) && closed_under(*x.result, bound); },
          [&](const Type::CaseFun& x) { return all(x.branches); },
          [&](const Type::List& x) { return closed_under(*x.elem, bound); },
          [&](const Type::VecFixed& x) { return all(x.elems); },
          [&](const Type::VecOf& x) { return closed_under(*x.elem, bound); },
          [&](const Type::Hash& x) { return closed_under(*x.key, bound) && closed_under(*x.val, bound); },
          [&](const Type::Record& x) {
            return std::all_of(x.fields.begin(), x.fields.end(),
                               [&](const auto& f) { return closed_under(*f.second, bound); });
          },
          [&](const Type::Union& x) { return all(x.members); },
          [&](const Type::Forall& x) {
            bound.push_back(x.var);
            bool ok = closed_under(*x.body, bound);
            bound.pop_back();
            return ok;
          },
          [&](const Type::TVar& x) {
            return std::find(bound.begin(), bound.end(), x.name) != bound.end();
          },
      },
      t.node);
}

}  // namespace

bool is_closed(const Type& t) {
  std::vector<Symbol> bound;
  return closed_under(t, bound);
}

bool is_first_order(const Type& t) {
  auto all = [](const std::vector<TypePtr>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](const TypePtr& x) { return is_first_order(*x); });
  };
  return std::visit(
      overloaded{
          [&](const Type::Base&) { return true; },
          [&](const Type::Fun&) { return false; },
          [&](const Type::CaseFun&) { return false; },
          [&](const Type::List& x) { return is_first_order(*x.elem); },
          [&](const Type::VecFixed& x) { return all(x.elems); },
          [&](const Type::VecOf&) { return false; },
          [&](const Type::Hash&) { return false; },
          [&](const Type::Record& x) {
            return std::all_of(x.fields.begin(), x.fields.end(),
                               [](const auto& f) { return is_first_order(*f.second); });
          },
          [&](const Type::Union& x) { return all(x.members); },
          [&](const Type::Forall&) { return false; },
          [&](const Type::TVar&) { return false; },
      },
      t.node);
}

std::vector<std::size_t> arities(const Type& t) {
  if (const auto* f = t.as<Type::Fun>()) return {f->params.size()};
  std::vector<std::size_t> out;
  if (const auto* c = t.as<Type::CaseFun>())
    for (const auto& br : c->branches) out.push_back(br->as<Type::Fun>()->params.size());
  return out;
}

}  // namespace gtl
