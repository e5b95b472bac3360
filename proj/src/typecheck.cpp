#include "gtl/typecheck.hpp"

#include <functional>
#include <map>
#include <unordered_set>

namespace gtl {

TypePtr TypedProgram::type_of(const Term& t) const {
  auto it = node_types.find(t.id);
  return it == node_types.end() ? nullptr : it->second;
}

std::size_t main_module(const std::vector<ModuleDecl>& program) {
  std::unordered_set<Symbol> imported;
  for (const auto& m : program)
    for (const auto& imp : m.imports) imported.insert(imp.source_module);
  for (std::size_t i = program.size(); i-- > 0;)
    if (!imported.count(program[i].name)) return i;
  return program.empty() ? 0 : program.size() - 1;
}

namespace {

bool is_empty_literal(const Term& t) {
  const auto* lit = t.as<Term::Literal>();
  return lit && std::holds_alternative<EmptyListLit>(lit->value);
}

// The List member of `t` when `t` is a list type or a union with one.
const Type::List* list_view(const TypePtr& t) {
  if (const auto* l = t->as<Type::List>()) return l;
  if (const auto* u = t->as<Type::Union>())
    for (const auto& m : u->members)
      if (const auto* l = m->as<Type::List>()) return l;
  return nullptr;
}

class Checker {
 public:
  Checker(TypedProgram& out, std::size_t index,
          const std::unordered_map<Symbol, TypePtr>& imports)
      : out_(out), index_(index), m_(out.modules[index]), globals_(imports) {}

  void check_module() {
    for (const auto& def : m_.defs)
      if (!def.is_expression() && def.declared_type) {
        wf(def.declared_type, def.loc);
        globals_[def.name] = def.declared_type;
      }
    for (const auto& def : m_.defs)
      if (!def.is_expression() && !def.declared_type) pending_.insert(def.name);

    TypePtr last;
    for (const auto& def : m_.defs) {
      if (def.is_expression()) {
        last = synth(*def.expr);
        continue;
      }
      if (def.declared_type) {
        check(*def.expr, def.declared_type);
      } else {
        pending_.erase(def.name);
        globals_[def.name] = synth(*def.expr);
      }
      last = nullptr;
    }
    auto& info = out_.info[index_];
    for (const auto& def : m_.defs)
      if (!def.is_expression()) info.exports[def.name] = globals_.at(def.name);
    for (std::size_t i = 0; i < m_.imports.size(); ++i)
      info.exports[m_.imports[i].binding] = info.imports[i].type;
    if (index_ == out_.main) out_.main_type = last;
  }

 private:
  [[noreturn]] void fail(const SourceLoc& loc, const std::string& msg) const {
    throw StaticTypeError(loc, msg);
  }
  [[noreturn]] void fail(const Term& t, const std::string& msg) const { fail(t.loc, msg); }

  TypePtr record(const Term& t, TypePtr type) {
    out_.node_types[t.id] = type;
    return type;
  }

  void wf(const TypePtr& t, const SourceLoc& loc) {
    std::function<void(const Type&, std::vector<Symbol>&)> go = [&](const Type& ty,
                                                                    std::vector<Symbol>& bound) {
      if (const auto* v = ty.as<Type::TVar>()) {
        for (auto b : bound)
          if (b == v->name) return;
        for (auto b : tvars_)
          if (b == v->name) return;
        fail(loc, "unbound type variable " + v->name.str());
      }
      if (const auto* f = ty.as<Type::Forall>()) {
        bound.push_back(f->var);
        go(*f->body, bound);
        bound.pop_back();
        return;
      }
      std::visit(
          [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Type::Fun>) {
              for (const auto& p : n.params) go(*p, bound);
              go(*n.result, bound);
            } else if constexpr (std::is_same_v<N, Type::CaseFun>) {
              for (const auto& b : n.branches) go(*b, bound);
            } else if constexpr (std::is_same_v<N, Type::List> || std::is_same_v<N, Type::VecOf>) {
              go(*n.elem, bound);
            } else if constexpr (std::is_same_v<N, Type::VecFixed>) {
              for (const auto& e : n.elems) go(*e, bound);
            } else if constexpr (std::is_same_v<N, Type::Hash>) {
              go(*n.key, bound);
              go(*n.val, bound);
            } else if constexpr (std::is_same_v<N, Type::Record>) {
              for (const auto& f : n.fields) go(*f.second, bound);
            } else if constexpr (std::is_same_v<N, Type::Union>) {
              for (const auto& mem : n.members) go(*mem, bound);
            }
          },
          ty.node);
    };
    std::vector<Symbol> bound;
    go(*t, bound);
  }

  TypePtr lookup(const Term& t, Symbol name) {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
      if (it->first == name) return it->second;
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    if (pending_.count(name))
      fail(t, name.str() + " is used before its type is known; annotate its definition");
    if (auto p = prim_by_name(name.str())) {
      const auto& sig = prim_sig(*p);
      if (!sig.type) fail(t, "primitive " + name.str() + " cannot be used as a value");
      return sig.type;
    }
    throw UnboundVariable(t.loc, name);
  }

  struct Scope {
    Checker& c;
    std::size_t mark;
    explicit Scope(Checker& c) : c(c), mark(c.locals_.size()) {}
    ~Scope() { c.locals_.resize(mark); }
  };

  TypePtr synth(const Term& t) {
    TypePtr r = synth_opt(t);
    if (!r) fail(t, "cannot determine the type of this expression; add an annotation");
    return r;
  }

  void expect(const Term& t, const TypePtr& got, const TypePtr& want) {
    if (!subtype(got, want))
      fail(t, "type mismatch: expected " + to_string(want) + ", got " + to_string(got));
  }

  // Returns null for forms whose type only an expected type can determine.
  TypePtr synth_opt(const Term& t) {
    return std::visit([&](const auto& n) { return synth_node(t, n); }, t.node);
  }

  TypePtr synth_node(const Term& t, const Term::Literal& n) {
    return std::visit(
        [&](const auto& v) -> TypePtr {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, std::int64_t>) return record(t, v >= 0 ? ty::nat() : ty::int_());
          else if constexpr (std::is_same_v<V, double>) return record(t, ty::real());
          else if constexpr (std::is_same_v<V, bool>) return record(t, ty::bool_());
          else if constexpr (std::is_same_v<V, std::string>) return record(t, ty::str());
          else return nullptr;
        },
        n.value);
  }

  TypePtr synth_node(const Term& t, const Term::Var& n) { return record(t, lookup(t, n.name)); }

  TypePtr lambda_type(const Term& t, const Term::Lambda& n, const std::vector<TypePtr>& hint) {
    Scope scope(*this);
    std::vector<TypePtr> params;
    for (std::size_t i = 0; i < n.params.size(); ++i) {
      const auto& p = n.params[i];
      TypePtr pt = p.type;
      if (pt) {
        wf(pt, p.loc);
        if (i < hint.size() && hint[i] && !subtype(hint[i], pt))
          fail(p.loc, "parameter " + p.name.str() + " : " + to_string(pt) + " cannot accept " +
                          to_string(hint[i]));
      } else if (i < hint.size() && hint[i]) {
        pt = hint[i];
      } else {
        fail(p.loc, "parameter " + p.name.str() + " needs a type annotation in typed code");
      }
      params.push_back(pt);
      locals_.emplace_back(p.name, pt);
    }
    TypePtr result;
    if (n.result) {
      wf(n.result, t.loc);
      check(*n.body, n.result);
      result = n.result;
    } else {
      result = synth(*n.body);
    }
    return record(t, ty::fun(std::move(params), std::move(result)));
  }

  TypePtr synth_node(const Term& t, const Term::Lambda& n) { return lambda_type(t, n, {}); }

  TypePtr synth_node(const Term& t, const Term::CaseLambda& n) {
    std::vector<TypePtr> branches;
    for (const auto& c : n.clauses) branches.push_back(synth(*c));
    try {
      return record(t, ty::case_fun(std::move(branches)));
    } catch (const TypeError& e) {
      fail(t, e.what());
    }
  }

  // The function type an operator of `argc` arguments resolves to.
  TypePtr select_branch(const Term& site, const TypePtr& fn, std::size_t argc) {
    if (const auto* f = fn->as<Type::Fun>()) {
      if (f->params.size() != argc)
        fail(site, "arity mismatch: function expects " + std::to_string(f->params.size()) +
                       " argument(s), given " + std::to_string(argc));
      return fn;
    }
    if (const auto* cf = fn->as<Type::CaseFun>()) {
      for (const auto& b : cf->branches)
        if (b->as<Type::Fun>()->params.size() == argc) return b;
      fail(site, "no case-> branch accepts " + std::to_string(argc) + " argument(s)");
    }
    if (fn->is<Type::Forall>()) fail(site, "polymorphic function must be instantiated with inst");
    fail(site, "cannot apply a value of type " + to_string(fn));
  }

  TypePtr synth_node(const Term& t, const Term::App& n) {
    TypePtr fn_t = synth(*n.fn);
    TypePtr branch = select_branch(t, fn_t, n.args.size());
    const auto& f = *branch->as<Type::Fun>();
    for (std::size_t i = 0; i < n.args.size(); ++i) check(*n.args[i], f.params[i]);
    out_.app_branch[t.id] = branch;
    return record(t, f.result);
  }

  TypePtr synth_node(const Term& t, const Term::If& n) {
    check(*n.test, ty::bool_());
    TypePtr a = synth_opt(*n.then);
    TypePtr b = synth_opt(*n.els);
    if (!a && !b) return nullptr;
    if (!a) {
      check(*n.then, b);
      return record(t, b);
    }
    if (!b) {
      check(*n.els, a);
      return record(t, a);
    }
    return record(t, join(a, b));
  }

  void bind_let(const std::vector<Binding>& bindings) {
    std::vector<std::pair<Symbol, TypePtr>> bound;
    for (const auto& b : bindings) {
      TypePtr bt;
      if (b.type) {
        wf(b.type, b.loc);
        check(*b.init, b.type);
        bt = b.type;
      } else {
        bt = synth(*b.init);
      }
      bound.emplace_back(b.name, bt);
    }
    for (auto& p : bound) locals_.push_back(std::move(p));
  }

  void bind_letrec(const std::vector<Binding>& bindings) {
    for (const auto& b : bindings) {
      TypePtr bt = b.type;
      if (!bt) bt = annotated_lambda_type(*b.init);
      if (!bt) fail(b.loc, "letrec binding " + b.name.str() + " needs a type annotation");
      wf(bt, b.loc);
      locals_.emplace_back(b.name, bt);
    }
    for (std::size_t i = 0; i < bindings.size(); ++i)
      check(*bindings[i].init, locals_[locals_.size() - bindings.size() + i].second);
  }

  static TypePtr annotated_lambda_type(const Term& t) {
    const auto* l = t.as<Term::Lambda>();
    if (!l || !l->result) return nullptr;
    std::vector<TypePtr> ps;
    for (const auto& p : l->params) {
      if (!p.type) return nullptr;
      ps.push_back(p.type);
    }
    return ty::fun(std::move(ps), l->result);
  }

  TypePtr synth_node(const Term& t, const Term::Let& n) {
    Scope scope(*this);
    bind_let(n.bindings);
    TypePtr r = synth_opt(*n.body);
    return r ? record(t, r) : nullptr;
  }

  TypePtr synth_node(const Term& t, const Term::Letrec& n) {
    Scope scope(*this);
    bind_letrec(n.bindings);
    TypePtr r = synth_opt(*n.body);
    return r ? record(t, r) : nullptr;
  }

  TypePtr synth_node(const Term& t, const Term::Begin& n) {
    for (std::size_t i = 0; i + 1 < n.body.size(); ++i) synth_opt(*n.body[i]);
    TypePtr r = synth_opt(*n.body.back());
    return r ? record(t, r) : nullptr;
  }

  TypePtr synth_node(const Term& t, const Term::RecordNew& n) {
    std::vector<std::pair<Symbol, TypePtr>> fields;
    for (const auto& [name, e] : n.fields) fields.emplace_back(name, synth(*e));
    return record(t, ty::record(n.tag, std::move(fields)));
  }

  TypePtr synth_node(const Term& t, const Term::FieldRef& n) {
    TypePtr rt = synth(*n.record);
    const auto* r = rt->as<Type::Record>();
    if (!r) fail(t, "field access on non-record type " + to_string(rt));
    for (const auto& [name, ft] : r->fields)
      if (name == n.field) return record(t, ft);
    fail(t, "record " + r->tag.str() + " has no field " + n.field.str());
  }

  TypePtr synth_node(const Term& t, const Term::Cast& n) {
    wf(n.type, t.loc);
    synth_opt(*n.expr);
    return record(t, n.type);
  }

  TypePtr synth_node(const Term& t, const Term::Inst& n) {
    wf(n.type, t.loc);
    TypePtr op = synth(*n.expr);
    const auto* f = op->as<Type::Forall>();
    if (!f) fail(t, "inst requires a polymorphic operand, got " + to_string(op));
    return record(t, substitute(f->body, f->var, n.type));
  }

  TypePtr synth_node(const Term& t, const Term::ForLoop&) {
    fail(t, "internal: loop sugar reached the type checker");
  }

  // --- primitives ---------------------------------------------------------

  TypePtr numeric(const Term& arg) {
    TypePtr a = synth(arg);
    expect(arg, a, ty::real());
    return a;
  }

  TypePtr list_arg(const Term& arg) {
    TypePtr a = synth(arg);
    if (!a->is<Type::List>()) fail(arg, "expected a list, got " + to_string(a));
    return a;
  }

  TypePtr synth_node(const Term& t, const Term::PrimCall& n) {
    const auto& sig = prim_sig(n.prim);
    if (!prim_accepts(n.prim, n.args.size()))
      fail(t, "arity mismatch: " + std::string(sig.name) + " given " +
                  std::to_string(n.args.size()) + " argument(s)");
    const auto& a = n.args;
    auto both = [&](const TypePtr& want) {
      return subtype(numeric(*a[0]), want) & subtype(numeric(*a[1]), want);
    };
    switch (n.prim) {
      case Prim::Add:
      case Prim::Mul: {
        TypePtr x = numeric(*a[0]), y = numeric(*a[1]);
        if (subtype(x, ty::nat()) && subtype(y, ty::nat())) return record(t, ty::nat());
        if (subtype(x, ty::int_()) && subtype(y, ty::int_())) return record(t, ty::int_());
        return record(t, ty::real());
      }
      case Prim::Sub:
        return record(t, both(ty::int_()) ? ty::int_() : ty::real());
      case Prim::Div:
        numeric(*a[0]);
        numeric(*a[1]);
        return record(t, ty::real());
      case Prim::Quotient:
      case Prim::Modulo: {
        TypePtr x = synth(*a[0]), y = synth(*a[1]);
        expect(*a[0], x, ty::int_());
        expect(*a[1], y, ty::int_());
        bool nat = subtype(x, ty::nat()) && subtype(y, ty::nat());
        return record(t, nat ? ty::nat() : ty::int_());
      }
      case Prim::Not:
      case Prim::IsEmpty:
      case Prim::IsCons:
      case Prim::IsInteger:
      case Prim::IsNatural:
      case Prim::IsReal:
      case Prim::IsString:
      case Prim::IsBoolean:
      case Prim::IsList:
      case Prim::IsProcedure:
      case Prim::IsVector:
      case Prim::IsHash:
      case Prim::IsEof:
        synth_opt(*a[0]);
        return record(t, ty::bool_());
      case Prim::Equal:
        synth_opt(*a[0]);
        synth_opt(*a[1]);
        return record(t, ty::bool_());
      case Prim::List: {
        if (a.empty()) return nullptr;
        TypePtr elem;
        for (const auto& e : a) {
          TypePtr et = synth(*e);
          elem = elem ? join(elem, et) : et;
        }
        return record(t, ty::list(elem));
      }
      case Prim::Cons: {
        TypePtr head = synth(*a[0]);
        TypePtr tail = synth_opt(*a[1]);
        if (!tail) {
          check(*a[1], ty::list(head));
          return record(t, ty::list(head));
        }
        const auto* l = tail->as<Type::List>();
        if (!l) fail(*a[1], "cons needs a list tail, got " + to_string(tail));
        return record(t, ty::list(join(head, l->elem)));
      }
      case Prim::First:
      case Prim::ListRef: {
        TypePtr l = list_arg(*a[0]);
        if (n.prim == Prim::ListRef) check(*a[1], ty::int_());
        return record(t, l->as<Type::List>()->elem);
      }
      case Prim::Rest:
      case Prim::Reverse:
        return record(t, list_arg(*a[0]));
      case Prim::Length:
        list_arg(*a[0]);
        return record(t, ty::nat());
      case Prim::Append: {
        TypePtr x = synth_opt(*a[0]);
        TypePtr y = synth_opt(*a[1]);
        if (!x && !y) return nullptr;
        if (!x) {
          if (!y->is<Type::List>()) fail(*a[1], "append needs lists");
          check(*a[0], y);
          return record(t, y);
        }
        if (!x->is<Type::List>()) fail(*a[0], "append needs lists");
        if (!y) {
          check(*a[1], x);
          return record(t, x);
        }
        if (!y->is<Type::List>()) fail(*a[1], "append needs lists");
        return record(t, ty::list(join(x->as<Type::List>()->elem, y->as<Type::List>()->elem)));
      }
      case Prim::Map: {
        TypePtr l = list_arg(*a[1]);
        TypePtr elem = l->as<Type::List>()->elem;
        TypePtr fn_t;
        if (const auto* lam = a[0]->as<Term::Lambda>())
          fn_t = lambda_type(*a[0], *lam, {elem});
        else
          fn_t = synth(*a[0]);
        TypePtr branch = select_branch(*a[0], fn_t, 1);
        const auto& f = *branch->as<Type::Fun>();
        expect(*a[1], elem, f.params[0]);
        return record(t, ty::list(f.result));
      }
      case Prim::Vector: {
        std::vector<TypePtr> elems;
        for (const auto& e : a) elems.push_back(synth(*e));
        return record(t, ty::vec_fixed(std::move(elems)));
      }
      case Prim::MakeVector:
        check(*a[0], ty::nat());
        return record(t, ty::vec_of(synth(*a[1])));
      case Prim::VectorRef: {
        TypePtr v = synth(*a[0]);
        check(*a[1], ty::int_());
        if (const auto* vf = v->as<Type::VecFixed>()) {
          if (auto idx = literal_index(*a[1])) {
            if (*idx < 0 || static_cast<std::size_t>(*idx) >= vf->elems.size())
              fail(t, "vector-ref index " + std::to_string(*idx) + " out of range for " + to_string(v));
            return record(t, vf->elems[*idx]);
          }
          if (vf->elems.empty()) fail(t, "vector-ref on an empty vector type");
          TypePtr j = vf->elems[0];
          for (const auto& e : vf->elems) j = join(j, e);
          return record(t, j);
        }
        if (const auto* vo = v->as<Type::VecOf>()) return record(t, vo->elem);
        fail(*a[0], "expected a vector, got " + to_string(v));
      }
      case Prim::VectorSet: {
        TypePtr v = synth(*a[0]);
        const auto* vo = v->as<Type::VecOf>();
        if (!vo) fail(*a[0], "vector-set! needs a mutable (Vectorof T), got " + to_string(v));
        check(*a[1], ty::int_());
        check(*a[2], vo->elem);
        return record(t, vo->elem);
      }
      case Prim::VectorLength: {
        TypePtr v = synth(*a[0]);
        if (!v->is<Type::VecFixed>() && !v->is<Type::VecOf>())
          fail(*a[0], "expected a vector, got " + to_string(v));
        return record(t, ty::nat());
      }
      case Prim::MakeHash:
      case Prim::Error:
        if (n.prim == Prim::Error) check(*a[0], ty::str());
        return nullptr;
      case Prim::HashRef:
      case Prim::HashSet:
      case Prim::HashHasKey:
      case Prim::HashCount: {
        TypePtr h = synth(*a[0]);
        const auto* ht = h->as<Type::Hash>();
        if (!ht) fail(*a[0], "expected a hash table, got " + to_string(h));
        if (n.prim == Prim::HashCount) return record(t, ty::nat());
        check(*a[1], ht->key);
        if (n.prim == Prim::HashHasKey) return record(t, ty::bool_());
        if (n.prim == Prim::HashSet) check(*a[2], ht->val);
        return record(t, ht->val);
      }
      case Prim::Displayln:
        return record(t, synth(*a[0]));
      default:
        break;
    }
    // Remaining primitives have monomorphic signatures.
    const auto& f = *sig.type->as<Type::Fun>();
    for (std::size_t i = 0; i < a.size(); ++i) check(*a[i], f.params[i]);
    return record(t, f.result);
  }

  static std::optional<std::int64_t> literal_index(const Term& t) {
    const auto* lit = t.as<Term::Literal>();
    if (!lit) return std::nullopt;
    if (const auto* i = std::get_if<std::int64_t>(&lit->value)) return *i;
    return std::nullopt;
  }

  // --- checking -----------------------------------------------------------

  void check(const Term& t, const TypePtr& want) {
    if (const auto* fa = want->as<Type::Forall>()) {
      if (t.is<Term::Lambda>() || t.is<Term::CaseLambda>()) {
        tvars_.push_back(fa->var);
        check(t, fa->body);
        tvars_.pop_back();
        record(t, want);
        return;
      }
    }
    if (const auto* lam = t.as<Term::Lambda>()) {
      if (const auto* f = want->as<Type::Fun>(); f && f->params.size() == lam->params.size()) {
        TypePtr got = lambda_type(t, *lam, f->params);
        expect(t, got, want);
        return;
      }
    }
    if (const auto* cl = t.as<Term::CaseLambda>()) {
      if (const auto* cf = want->as<Type::CaseFun>()) {
        for (const auto& b : cf->branches) {
          const auto& bf = *b->as<Type::Fun>();
          bool found = false;
          for (const auto& c : cl->clauses) {
            const auto& l = *c->as<Term::Lambda>();
            if (l.params.size() != bf.params.size()) continue;
            expect(*c, lambda_type(*c, l, bf.params), b);
            found = true;
          }
          if (!found)
            fail(t, "case-lambda has no clause of arity " + std::to_string(bf.params.size()));
        }
        record(t, want);
        return;
      }
    }
    if (const auto* n = t.as<Term::If>()) {
      check(*n->test, ty::bool_());
      check(*n->then, want);
      check(*n->els, want);
      record(t, want);
      return;
    }
    if (const auto* n = t.as<Term::Let>()) {
      Scope scope(*this);
      bind_let(n->bindings);
      check(*n->body, want);
      record(t, want);
      return;
    }
    if (const auto* n = t.as<Term::Letrec>()) {
      Scope scope(*this);
      bind_letrec(n->bindings);
      check(*n->body, want);
      record(t, want);
      return;
    }
    if (const auto* n = t.as<Term::Begin>()) {
      for (std::size_t i = 0; i + 1 < n->body.size(); ++i) synth_opt(*n->body[i]);
      check(*n->body.back(), want);
      record(t, want);
      return;
    }
    if (is_empty_literal(t)) {
      if (!list_view(want)) fail(t, "empty list where " + to_string(want) + " is expected");
      record(t, want);
      return;
    }
    if (const auto* p = t.as<Term::PrimCall>()) {
      if (check_prim(t, *p, want)) return;
    }
    TypePtr got = synth(t);
    expect(t, got, want);
  }

  // Check-mode rules for primitives whose result needs the expected type.
  bool check_prim(const Term& t, const Term::PrimCall& n, const TypePtr& want) {
    if (!prim_accepts(n.prim, n.args.size())) return false;
    switch (n.prim) {
      case Prim::List: {
        const auto* l = list_view(want);
        if (!l) return false;
        for (const auto& e : n.args) check(*e, l->elem);
        record(t, ty::list(l->elem));
        return true;
      }
      case Prim::Cons: {
        const auto* l = list_view(want);
        if (!l) return false;
        check(*n.args[0], l->elem);
        check(*n.args[1], ty::list(l->elem));
        record(t, ty::list(l->elem));
        return true;
      }
      case Prim::MakeVector: {
        const auto* v = want->as<Type::VecOf>();
        if (!v) return false;
        check(*n.args[0], ty::nat());
        check(*n.args[1], v->elem);
        record(t, want);
        return true;
      }
      case Prim::MakeHash:
        if (!want->is<Type::Hash>()) fail(t, "make-hash where " + to_string(want) + " is expected");
        record(t, want);
        return true;
      case Prim::Error:
        check(*n.args[0], ty::str());
        record(t, want);
        return true;
      default:
        return false;
    }
  }

  TypedProgram& out_;
  std::size_t index_;
  const ModuleDecl& m_;
  std::unordered_map<Symbol, TypePtr> globals_;
  std::unordered_set<Symbol> pending_;
  std::vector<std::pair<Symbol, TypePtr>> locals_;
  std::vector<Symbol> tvars_;
};

// Untyped modules: only free variables are an error.
class ScopeScanner {
 public:
  explicit ScopeScanner(std::unordered_set<Symbol> globals) : globals_(std::move(globals)) {}

  void scan(const Term& t) {
    if (const auto* v = t.as<Term::Var>()) {
      for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
        if (*it == v->name) return;
      if (globals_.count(v->name) || prim_by_name(v->name.str())) return;
      throw UnboundVariable(t.loc, v->name);
    }
    const std::size_t mark = locals_.size();
    if (const auto* l = t.as<Term::Lambda>()) {
      for (const auto& p : l->params) locals_.push_back(p.name);
      scan(*l->body);
    } else if (const auto* n = t.as<Term::Let>()) {
      for (const auto& b : n->bindings) scan(*b.init);
      for (const auto& b : n->bindings) locals_.push_back(b.name);
      scan(*n->body);
    } else if (const auto* n = t.as<Term::Letrec>()) {
      for (const auto& b : n->bindings) locals_.push_back(b.name);
      for (const auto& b : n->bindings) scan(*b.init);
      scan(*n->body);
    } else {
      visit_children(t, [&](const Term& c) { scan(c); });
    }
    locals_.resize(mark);
  }

 private:
  std::unordered_set<Symbol> globals_;
  std::vector<Symbol> locals_;
};

std::vector<std::size_t> topo_order(const std::vector<ModuleDecl>& mods,
                                    const std::unordered_map<Symbol, std::size_t>& index) {
  std::vector<int> state(mods.size(), 0);  // 0 new, 1 active, 2 done
  std::vector<std::size_t> order;
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    state[i] = 1;
    for (const auto& imp : mods[i].imports) {
      std::size_t j = index.at(imp.source_module);
      if (state[j] == 1)
        throw StaticTypeError(imp.loc, "import cycle through module " + imp.source_module.str());
      if (state[j] == 0) visit(j);
    }
    state[i] = 2;
    order.push_back(i);
  };
  for (std::size_t i = 0; i < mods.size(); ++i)
    if (state[i] == 0) visit(i);
  return order;
}

}  // namespace

TypedProgram typecheck(const std::vector<ModuleDecl>& program, const Configuration& config) {
  TypedProgram out;
  out.config = config;
  for (const auto& m : program) out.modules.push_back(is_kernel(m) ? m : desugar(m));
  const auto langs = resolve_langs(program, config);
  out.main = main_module(program);

  std::unordered_map<Symbol, std::size_t> index;
  for (std::size_t i = 0; i < out.modules.size(); ++i) {
    const auto& m = out.modules[i];
    if (!index.emplace(m.name, i).second)
      throw StaticTypeError(m.loc, "duplicate module " + m.name.str());
  }

  // Names each module provides: its definitions and everything it imports.
  out.info.resize(out.modules.size());
  std::vector<std::unordered_set<Symbol>> provided(out.modules.size());
  for (std::size_t i = 0; i < out.modules.size(); ++i) {
    const auto& m = out.modules[i];
    auto& info = out.info[i];
    info.typed = langs[i];
    for (const auto& def : m.defs) {
      if (def.is_expression()) continue;
      if (!provided[i].insert(def.name).second)
        throw StaticTypeError(def.loc, "duplicate definition of " + def.name.str());
      info.export_locs[def.name] = def.loc;
    }
    for (const auto& imp : m.imports) {
      if (!provided[i].insert(imp.binding).second)
        throw StaticTypeError(imp.loc, imp.binding.str() + " is both imported and defined");
      info.export_locs[imp.binding] = imp.loc;
      if (!index.count(imp.source_module))
        throw StaticTypeError(imp.loc, "unknown module " + imp.source_module.str());
    }
  }
  out.order = topo_order(out.modules, index);

  for (std::size_t i : out.order) {
    const auto& m = out.modules[i];
    auto& info = out.info[i];
    std::unordered_map<Symbol, TypePtr> import_types;
    for (const auto& imp : m.imports) {
      const std::size_t j = index.at(imp.source_module);
      if (!provided[j].count(imp.binding))
        throw StaticTypeError(imp.loc, "module " + imp.source_module.str() + " does not provide " +
                                           imp.binding.str());
      ImportLink link;
      link.exporter = j;
      link.export_loc = out.info[j].export_locs.at(imp.binding);
      const bool exporter_typed = out.info[j].typed;
      link.boundary = info.typed != exporter_typed;
      link.into_typed = info.typed && !exporter_typed;
      if (info.typed && exporter_typed) {
        link.type = out.info[j].exports.at(imp.binding);
        if (imp.declared_type && !subtype(link.type, imp.declared_type))
          throw StaticTypeError(imp.loc, "declared type " + to_string(imp.declared_type) +
                                             " disagrees with exported type " + to_string(link.type));
      } else if (link.into_typed) {
        if (!imp.declared_type)
          throw StaticTypeError(imp.loc, "import of " + imp.binding.str() +
                                             " from untyped module " + imp.source_module.str() +
                                             " needs a type annotation");
        if (!is_closed(*imp.declared_type))
          throw StaticTypeError(imp.loc, "import type mentions an unbound type variable");
        link.type = imp.declared_type;
      } else if (exporter_typed) {
        link.type = out.info[j].exports.at(imp.binding);
      }
      if (info.typed) import_types[imp.binding] = link.type;
      info.imports.push_back(std::move(link));
    }

    if (info.typed) {
      Checker(out, i, import_types).check_module();
    } else {
      ScopeScanner scanner(provided[i]);
      for (const auto& def : m.defs) scanner.scan(*def.expr);
    }
  }
  return out;
}

}  // namespace gtl
