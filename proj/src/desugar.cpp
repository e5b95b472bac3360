#include "gtl/syntax.hpp"

namespace gtl {
namespace {

class Desugarer {
 public:
  explicit Desugarer(Symbol module) : module_(module) {}

  TermPtr term(const TermPtr& t) {
    return std::visit([&](const auto& n) { return rewrite(t, n); }, t->node);
  }

 private:
  Symbol fresh(const char* base) {
    return Symbol(std::string("#%") + base + "_" + std::to_string(counter_++));
  }

  TermPtr rewrite(const TermPtr& t, const Term::Literal&) { return t; }
  TermPtr rewrite(const TermPtr& t, const Term::Var&) { return t; }

  TermPtr rewrite(const TermPtr& t, const Term::Lambda& n) {
    TermPtr body = term(n.body);
    if (body == n.body) return t;
    auto copy = n;
    copy.body = std::move(body);
    return rebuild(t, std::move(copy));
  }

  TermPtr rewrite(const TermPtr& t, const Term::CaseLambda& n) {
    auto copy = n;
    bool changed = false;
    for (auto& c : copy.clauses) changed |= swap_in(c);
    return changed ? rebuild(t, std::move(copy)) : t;
  }

  TermPtr rewrite(const TermPtr& t, const Term::App& n) {
    auto copy = n;
    bool changed = swap_in(copy.fn);
    for (auto& a : copy.args) changed |= swap_in(a);
    return changed ? rebuild(t, std::move(copy)) : t;
  }

  TermPtr rewrite(const TermPtr& t, const Term::PrimCall& n) {
    auto copy = n;
    bool changed = false;
    for (auto& a : copy.args) changed |= swap_in(a);
    return changed ? rebuild(t, std::move(copy)) : t;
  }

  TermPtr rewrite(const TermPtr& t, const Term::If& n) {
    auto copy = n;
    bool changed = swap_in(copy.test);
    changed |= swap_in(copy.then);
    changed |= swap_in(copy.els);
    return changed ? rebuild(t, std::move(copy)) : t;
  }

  template <typename LetLike>
  TermPtr rewrite_let(const TermPtr& t, const LetLike& n) {
    auto copy = n;
    bool changed = false;
    for (auto& b : copy.bindings) changed |= swap_in(b.init);
    changed |= swap_in(copy.body);
    return changed ? rebuild(t, std::move(copy)) : t;
  }
  TermPtr rewrite(const TermPtr& t, const Term::Let& n) { return rewrite_let(t, n); }
  TermPtr rewrite(const TermPtr& t, const Term::Letrec& n) { return rewrite_let(t, n); }

  TermPtr rewrite(const TermPtr& t, const Term::Begin& n) {
    auto copy = n;
    bool changed = false;
    for (auto& e : copy.body) changed |= swap_in(e);
    return changed ? rebuild(t, std::move(copy)) : t;
  }

  TermPtr rewrite(const TermPtr& t, const Term::RecordNew& n) {
    auto copy = n;
    bool changed = false;
    for (auto& [_, e] : copy.fields) changed |= swap_in(e);
    return changed ? rebuild(t, std::move(copy)) : t;
  }

  TermPtr rewrite(const TermPtr& t, const Term::FieldRef& n) {
    auto copy = n;
    return swap_in(copy.record) ? rebuild(t, std::move(copy)) : t;
  }
  TermPtr rewrite(const TermPtr& t, const Term::Cast& n) {
    auto copy = n;
    return swap_in(copy.expr) ? rebuild(t, std::move(copy)) : t;
  }
  TermPtr rewrite(const TermPtr& t, const Term::Inst& n) {
    auto copy = n;
    return swap_in(copy.expr) ? rebuild(t, std::move(copy)) : t;
  }

  // (letrec ([loop : (-> (Listof T) R R)
  //           (lambda ([lst : (Listof T)] [acc : R]) : R
  //             (if (empty? lst) acc (loop (rest lst) (+ acc <elem>))))])
  //   (loop seq 0))
  // where <elem> binds the user variable to (first lst). for/skip tests the
  // element against the end sentinel first and skips it.
  TermPtr rewrite(const TermPtr& t, const Term::ForLoop& n) {
    const SourceLoc loc{t->loc.module, t->loc.span, Origin::Desugared};
    auto mk = [&](Term::Node node) { return make_term(loc, std::move(node)); };
    auto var = [&](Symbol s) { return mk(Term::Var{s}); };

    TermPtr seq = term(n.seq);
    TermPtr body = term(n.body);
    const bool typed = n.var.type != nullptr;
    TypePtr elem_t = n.var.type;
    TypePtr result_t = typed ? (n.result ? n.result : ty::real()) : n.result;
    TypePtr list_t = typed ? ty::list(elem_t) : nullptr;
    TypePtr loop_t = typed && result_t ? ty::fun({list_t, result_t}, result_t) : nullptr;

    const Symbol loop = fresh("loop");
    const Symbol lst = fresh("lst");
    const Symbol acc = fresh("acc");

    auto bind_user = [&](TermPtr init) {
      return mk(Term::Let{{Binding{n.var.name, elem_t, std::move(init), n.var.loc}}, body});
    };
    auto step = [&](TermPtr elem_value) {
      TermPtr sum = mk(Term::PrimCall{Prim::Add, {var(acc), bind_user(std::move(elem_value))}});
      return mk(Term::App{var(loop), {mk(Term::PrimCall{Prim::Rest, {var(lst)}}), sum}});
    };
    TermPtr head = mk(Term::PrimCall{Prim::First, {var(lst)}});

    TermPtr advance;
    if (!n.skip) {
      advance = step(head);
    } else {
      const Symbol v = fresh("v");
      TermPtr skip = mk(Term::App{var(loop), {mk(Term::PrimCall{Prim::Rest, {var(lst)}}), var(acc)}});
      TermPtr test = mk(Term::PrimCall{Prim::IsEof, {var(v)}});
      advance = mk(Term::Let{{Binding{v, elem_t, head, loc}}, mk(Term::If{test, skip, step(var(v))})});
    }
    TermPtr loop_body =
        mk(Term::If{mk(Term::PrimCall{Prim::IsEmpty, {var(lst)}}), var(acc), advance});
    TermPtr lambda = mk(Term::Lambda{
        {Param{lst, list_t, loc}, Param{acc, result_t, loc}}, result_t, loop_body, {}});
    TermPtr start = mk(Term::App{var(loop), {seq, mk(Term::Literal{std::int64_t{0}})}});
    return mk(Term::Letrec{{Binding{loop, loop_t, lambda, loc}}, start});
  }

  bool swap_in(TermPtr& slot) {
    TermPtr next = term(slot);
    if (next == slot) return false;
    slot = std::move(next);
    return true;
  }

  TermPtr rebuild(const TermPtr& t, Term::Node node) {
    return std::make_shared<const Term>(Term{t->id, t->loc, std::move(node)});
  }

  Symbol module_;
  int counter_ = 0;
};

bool has_loop(const Term& t) {
  bool found = false;
  for_each_node(t, [&](const Term& n) { found = found || n.is<Term::ForLoop>(); });
  return found;
}

}  // namespace

ModuleDecl desugar(const ModuleDecl& m) {
  ModuleDecl out = m;
  Desugarer d(m.name);
  for (auto& def : out.defs) def.expr = d.term(def.expr);
  return out;
}

bool is_kernel(const ModuleDecl& m) {
  for (const auto& def : m.defs)
    if (has_loop(*def.expr)) return false;
  return true;
}

}  // namespace gtl
