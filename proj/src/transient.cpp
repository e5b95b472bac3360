#include "gtl/transient.hpp"

#include <sstream>

namespace gtl {

std::string_view site_kind_name(SiteKind k) {
  switch (k) {
    case SiteKind::FnEntry: return "fn-entry";
    case SiteKind::ElimResult: return "elim-result";
    case SiteKind::Cast: return "cast";
    case SiteKind::Inst: return "inst";
    case SiteKind::BoundaryImport: return "boundary-import";
  }
  return "?";
}

UnsupportedBoundaryType::UnsupportedBoundaryType(SourceLoc loc, const std::string& what)
    : Error(loc.str() + ": unsupported boundary type: " + what), loc_(std::move(loc)) {}

namespace {

TermPtr with_node(const Term& t, Term::Node node) {
  return std::make_shared<const Term>(Term{t.id, t.loc, std::move(node)});
}

// Rebuilds `t` with every child passed through `f`.
template <typename F>
TermPtr map_children(const Term& t, F&& f) {
  Term::Node node = t.node;
  std::visit(
      [&](auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Term::Lambda>) {
          n.body = f(n.body);
        } else if constexpr (std::is_same_v<N, Term::CaseLambda>) {
          for (auto& c : n.clauses) c = f(c);
        } else if constexpr (std::is_same_v<N, Term::App>) {
          n.fn = f(n.fn);
          for (auto& a : n.args) a = f(a);
        } else if constexpr (std::is_same_v<N, Term::PrimCall>) {
          for (auto& a : n.args) a = f(a);
        } else if constexpr (std::is_same_v<N, Term::If>) {
          n.test = f(n.test);
          n.then = f(n.then);
          n.els = f(n.els);
        } else if constexpr (std::is_same_v<N, Term::Let> || std::is_same_v<N, Term::Letrec>) {
          for (auto& b : n.bindings) b.init = f(b.init);
          n.body = f(n.body);
        } else if constexpr (std::is_same_v<N, Term::Begin>) {
          for (auto& e : n.body) e = f(e);
        } else if constexpr (std::is_same_v<N, Term::RecordNew>) {
          for (auto& fe : n.fields) fe.second = f(fe.second);
        } else if constexpr (std::is_same_v<N, Term::FieldRef>) {
          n.record = f(n.record);
        } else if constexpr (std::is_same_v<N, Term::Cast> || std::is_same_v<N, Term::Inst>) {
          n.expr = f(n.expr);
        } else if constexpr (std::is_same_v<N, Term::ForLoop>) {
          n.seq = f(n.seq);
          n.body = f(n.body);
        }
      },
      node);
  return with_node(t, std::move(node));
}

const Type::Fun* strip_to_fun(const TypePtr& t) {
  const Type* cur = t.get();
  while (cur) {
    if (const auto* f = cur->as<Type::Fun>()) return f;
    const auto* fa = cur->as<Type::Forall>();
    if (!fa) return nullptr;
    cur = fa->body.get();
  }
  return nullptr;
}

std::optional<std::int64_t> literal_int(const Term& t) {
  const auto* lit = t.as<Term::Literal>();
  if (!lit) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&lit->value)) return *i;
  return std::nullopt;
}

class Instrumenter {
 public:
  Instrumenter(const TypedProgram& p, const CheckOptions& opts, std::vector<CheckSite>& sites)
      : p_(p), opts_(opts), sites_(sites) {}

  TermPtr run(std::size_t module, const TermPtr& t) {
    module_ = module;
    return visit(t);
  }

  void import_sites(std::size_t module) {
    const auto& info = p_.info[module];
    const auto& m = p_.modules[module];
    for (std::size_t i = 0; i < info.imports.size(); ++i) {
      const auto& link = info.imports[i];
      if (!link.into_typed) continue;
      Shape s = shape_of(link.type, opts_.shapes);
      if (s.trivial()) continue;
      CheckSite site;
      site.kind = SiteKind::BoundaryImport;
      site.module = module;
      site.import_index = i;
      site.loc = m.imports[i].loc;
      site.shape = std::move(s);
      site.type = link.type;
      sites_.push_back(std::move(site));
    }
  }

 private:
  bool eligible(const Term& t) const {
    return t.loc.origin == Origin::User || opts_.check_desugared;
  }

  // Returns the site index, or kNoSite when the shape is vacuous.
  int add(SiteKind kind, const SourceLoc& loc, const TypePtr& type, std::optional<BlameHook> hook,
          std::size_t param = 0) {
    if (!type) return kNoSite;
    Shape s = shape_of(type, opts_.shapes);
    if (s.trivial()) return kNoSite;
    if (!s.supported()) {
      if (kind == SiteKind::Cast) throw UnsupportedBoundaryType(loc, "cannot check " + to_string(type));
      return kNoSite;
    }
    CheckSite site;
    site.kind = kind;
    site.param_index = param;
    site.module = module_;
    site.loc = loc;
    site.shape = std::move(s);
    site.type = type;
    site.hook = std::move(hook);
    sites_.push_back(std::move(site));
    return static_cast<int>(sites_.size() - 1);
  }

  TermPtr visit(const TermPtr& t) {
    TermPtr r = map_children(*t, [&](const TermPtr& c) { return visit(c); });
    if (!eligible(*t)) return r;
    Term::Node node = r->node;
    std::visit([&](auto& n) { instrument(*t, n); }, node);
    return with_node(*t, std::move(node));
  }

  template <typename N>
  void instrument(const Term&, N&) {}

  void instrument(const Term& t, Term::Lambda& n) {
    const Type::Fun* f = strip_to_fun(p_.type_of(t));
    n.entry_sites.assign(n.params.size(), kNoSite);
    for (std::size_t i = 0; i < n.params.size(); ++i) {
      TypePtr pt = n.params[i].type ? n.params[i].type : (f ? f->params[i] : nullptr);
      n.entry_sites[i] =
          add(SiteKind::FnEntry, n.params[i].loc, pt, BlameHook{t.id, Action::dom(i)}, i);
    }
  }

  void instrument(const Term& t, Term::App& n) {
    n.site = add(SiteKind::ElimResult, t.loc, p_.type_of(t), BlameHook{n.fn->id, Action::cod(0)});
  }

  void instrument(const Term& t, Term::PrimCall& n) {
    if (prim_sig(n.prim).result_guaranteed) return;
    Action a;
    switch (n.prim) {
      case Prim::First:
      case Prim::ListRef: a = Action::list_elem(); break;
      case Prim::Rest: a = Action::list_rest(); break;
      case Prim::HashRef: a = Action::hash_value(); break;
      case Prim::VectorRef: {
        TypePtr vt = p_.type_of(*n.args[0]);
        auto idx = literal_int(*n.args[1]);
        if (vt && vt->is<Type::VecFixed>() && idx && *idx >= 0)
          a = Action::list_elem_at(static_cast<std::size_t>(*idx));
        else
          a = Action::list_elem();
        break;
      }
      default: a = Action::noop(); break;
    }
    n.site = add(SiteKind::ElimResult, t.loc, p_.type_of(t), BlameHook{n.args[0]->id, a});
  }

  void instrument(const Term& t, Term::FieldRef& n) {
    n.site = add(SiteKind::ElimResult, t.loc, p_.type_of(t),
                 BlameHook{n.record->id, Action::record_field(n.field)});
  }

  void instrument(const Term& t, Term::Cast& n) {
    n.site = add(SiteKind::Cast, t.loc, n.type, std::nullopt);
  }

  void instrument(const Term& t, Term::Inst& n) {
    TypePtr op = p_.type_of(*n.expr);
    if (!op || shape_of(op, opts_.shapes).supported()) return;
    n.site = add(SiteKind::Inst, t.loc, p_.type_of(t), std::nullopt);
  }

  const TypedProgram& p_;
  const CheckOptions& opts_;
  std::vector<CheckSite>& sites_;
  std::size_t module_ = 0;
};

class Optimizer {
 public:
  Optimizer(const TypedProgram& p, OptimizeMode mode) : p_(p), mode_(mode) {}

  TermPtr visit(const TermPtr& t) {
    if (mode_ == OptimizeMode::Deep) {
      if (const auto* n = t->as<Term::If>()) {
        if (const auto* lit = n->test->as<Term::Literal>()) {
          if (const auto* b = std::get_if<bool>(&lit->value)) return visit(*b ? n->then : n->els);
        }
      }
    }
    TermPtr r = map_children(*t, [&](const TermPtr& c) { return visit(c); });
    if (const auto* pc = r->as<Term::PrimCall>(); pc && pc->prim == Prim::VectorRef) {
      TypePtr vt = p_.type_of(*pc->args[0]);
      auto idx = literal_int(*pc->args[1]);
      if (vt && idx) {
        if (const auto* vf = vt->as<Type::VecFixed>();
            vf && *idx >= 0 && static_cast<std::size_t>(*idx) < vf->elems.size()) {
          auto copy = *pc;
          copy.bounds_check = false;
          return with_node(*r, std::move(copy));
        }
      }
    }
    return r;
  }

 private:
  const TypedProgram& p_;
  OptimizeMode mode_;
};

}  // namespace

InstrumentedProgram insert_checks(const TypedProgram& program, const CheckOptions& opts) {
  InstrumentedProgram out{program, {}};
  Instrumenter inst(program, opts, out.sites);
  for (std::size_t i = 0; i < out.program.modules.size(); ++i) {
    if (!program.typed(i)) continue;
    inst.import_sites(i);
    for (auto& def : out.program.modules[i].defs) def.expr = inst.run(i, def.expr);
  }
  return out;
}

TypedProgram optimize(const TypedProgram& program, OptimizeMode mode) {
  TypedProgram out = program;
  Optimizer opt(program, mode);
  for (std::size_t i = 0; i < out.modules.size(); ++i) {
    if (!program.typed(i)) continue;
    for (auto& def : out.modules[i].defs) def.expr = opt.visit(def.expr);
  }
  return out;
}

std::string dump_checks(const std::vector<CheckSite>& sites) {
  std::ostringstream out;
  for (const auto& s : sites) {
    out << site_kind_name(s.kind);
    if (s.kind == SiteKind::FnEntry) out << '[' << s.param_index << ']';
    out << ' ' << s.loc.str() << ' ' << to_string(s.shape) << '\n';
  }
  return out.str();
}

}  // namespace gtl
