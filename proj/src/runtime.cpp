#include "gtl/runtime.hpp"

#include <pthread.h>

#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <unordered_map>

namespace gtl {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Erased: return "erased";
    case Mode::Deep: return "deep";
    case Mode::Shallow: return "shallow";
    case Mode::ShallowBlame: return "sb";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::Erased, Mode::Deep, Mode::Shallow, Mode::ShallowBlame})
    if (mode_name(m) == text) return m;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected erased, deep, shallow or sb)");
}

std::string_view kind_name(RuntimeError::Kind k) {
  switch (k) {
    case RuntimeError::Kind::Shape: return "ShapeError";
    case RuntimeError::Kind::Contract: return "ContractError";
    case RuntimeError::Kind::Dynamic: return "DynamicError";
    case RuntimeError::Kind::Timeout: return "Timeout";
  }
  return "?";
}

RuntimeError::RuntimeError(Kind kind, SourceLoc loc, std::string message)
    : Error(std::move(message)), kind_(kind), loc_(std::move(loc)) {}

std::string BlameReport::render() const {
  std::ostringstream out;
  out << "witness: " << witness << '\n';
  out << "check: " << site << '\n';
  if (fell_back) out << "filter removed every boundary; showing all gathered boundaries\n";
  out << "either the untyped value or this type is wrong:\n";
  for (const auto& b : boundaries)
    out << "  " << b.client.str() << " ⇄ " << b.spec.str() << " : " << labeled_type(b) << '\n';
  out << "unfiltered: " << unfiltered << '\n';
  return out.str();
}

PreparedProgram prepare(const TypedProgram& typed, const RunOptions& options) {
  PreparedProgram out{typed, {}, options};
  switch (options.mode) {
    case Mode::Erased:
      break;
    case Mode::Deep:
      out.program = optimize(typed, OptimizeMode::Deep);
      break;
    case Mode::Shallow:
    case Mode::ShallowBlame: {
      CheckOptions co;
      co.shapes.lax = options.lax_shapes;
      co.check_desugared = options.check_desugared;
      auto inst = insert_checks(optimize(typed, OptimizeMode::Shallow), co);
      out.program = std::move(inst.program);
      out.sites = std::move(inst.sites);
      break;
    }
  }
  return out;
}

namespace {

using Kind = RuntimeError::Kind;


class Interp final : public ContractHost {
 public:
  explicit Interp(const PreparedProgram& prep)
      : p_(prep.program),
        sites_(prep.sites),
        opt_(prep.options),
        heap_(std::make_shared<Heap>()),
        globals_(p_.modules.size()) {
    shallow_ = opt_.mode == Mode::Shallow || opt_.mode == Mode::ShallowBlame;
    blame_ = opt_.mode == Mode::ShallowBlame;
    deep_ = opt_.mode == Mode::Deep;
    for (std::size_t i = 0; i < sites_.size(); ++i)
      if (sites_[i].kind == SiteKind::BoundaryImport)
        import_site_[{sites_[i].module, sites_[i].import_index}] = i;
  }

  Heap& heap() override { return *heap_; }
  CostCounters& counters() override { return c_; }
  Value call(const Value& fn, std::vector<Value> args) override {
    return apply(fn, args, wrapped_site_);
  }

  Evaluation run() {
    Evaluation ev;
    ev.heap = heap_;
    try {
      Value result;
      for (std::size_t m : p_.order) {
        link_imports(m);
        for (const auto& def : p_.modules[m].defs) {
          Value v = eval(&def.expr, nullptr, m);
          if (def.is_expression()) {
            if (m == p_.main) result = v;
          } else {
            set_global(m, def.name, v);
          }
        }
      }
      ev.value = result;
      ev.printed = print_value(result);
      if (deep_) ev.monitor_violations = monitor_scan();
    } catch (const RuntimeError& e) {
      ev.error = e;
    } catch (const ContractFailure& f) {
      ev.error = contract_error(f);
    }
    ev.output = std::move(out_);
    c_.steps = steps_ + heap_->traversal_steps;
    c_.map_size = bmap_.size();
    ev.counters = c_;
    return ev;
  }

 private:
  // ---------------------------------------------------------------- errors

  static SourceLoc loc_of(const Term* t) { return t ? t->loc : SourceLoc{}; }

  [[noreturn]] void dynamic(const Term* site, std::string_view prim, const std::string& expected,
                            const Value& got) {
    RuntimeError e(Kind::Dynamic, loc_of(site),
                   loc_of(site).str() + ": " + std::string(prim) + ": expected " + expected +
                       ", got " + sketch(got));
    e.primitive = prim;
    e.expected = expected;
    e.witness = sketch(got);
    throw e;
  }

  [[noreturn]] void dynamic_msg(const Term* site, std::string_view prim, const std::string& msg) {
    RuntimeError e(Kind::Dynamic, loc_of(site), loc_of(site).str() + ": " + std::string(prim) + ": " + msg);
    e.primitive = prim;
    throw e;
  }

  RuntimeError contract_error(const ContractFailure& f) {
    const auto& v = f.violation();
    RuntimeError e(Kind::Contract, v.boundary->importer_loc, v.message());
    e.expected = v.expected;
    e.witness = v.witness;
    e.violation = v;
    return e;
  }

  // ----------------------------------------------------------- blame map

  void record_boundary(const Value& v, const TypePtr& type, Direction dir, SourceLoc client,
                       SourceLoc spec) {
    ++c_.blame_ops;
    if (auto k = blame_key(v)) bmap_.add_boundary(*k, BoundaryEntry{type, dir, client, spec, 0});
  }

  void record_link(const Value& child, const Value& parent, const Action& a) {
    ++c_.blame_ops;
    auto ck = blame_key(child);
    auto pk = blame_key(parent);
    if (ck && pk) bmap_.add_link(*ck, *pk, a);
  }

  // ---------------------------------------------------------- shape checks

  void check_site(int idx, const Value& v, const Value* parent, const Term* call_site) {
    ++c_.shape_checks;
    const CheckSite& s = sites_[static_cast<std::size_t>(idx)];
    auto outcome = check_shape(s.shape, v, *heap_);
    if (!outcome.pass) shape_failure(s, v, parent, call_site);
  }

  [[noreturn]] void shape_failure(const CheckSite& s, const Value& v, const Value* parent,
                                  const Term* call_site) {
    std::string msg = "shallow: " + s.loc.str() + ": " + std::string(site_kind_name(s.kind)) +
                      " check: expected " + to_string(s.shape) + ", got " + sketch(v);
    if (call_site) msg += " (called from " + call_site->loc.str() + ")";
    RuntimeError e(Kind::Shape, s.loc, msg);
    if (call_site) e.call_loc = call_site->loc;
    e.expected = to_string(s.shape);
    e.witness = sketch(v);
    if (blame_) e.blame = blame_report(s, v, parent);
    throw e;
  }

  BlameReport blame_report(const CheckSite& s, const Value& v, const Value* parent) {
    BlameReport r;
    r.witness = sketch(v);
    r.site = std::string(site_kind_name(s.kind)) + ' ' + s.loc.str() + ' ' + to_string(s.shape);
    std::vector<Gathered> gathered;
    if (auto k = blame_key(v)) {
      gathered = bmap_.gather(*k);
    } else if (s.hook && parent) {
      if (auto pk = blame_key(*parent)) gathered = bmap_.gather(*pk, s.hook->action);
    }
    if (gathered.empty() && s.kind == SiteKind::BoundaryImport) {
      auto it = import_entry_.find({s.module, s.import_index});
      if (it != import_entry_.end()) gathered.push_back({it->second, {}});
    }
    r.unfiltered = gathered.size();
    for (const auto& g : gathered) r.gathered.push_back(g.entry);
    auto kept = filter_blame(v, gathered, *heap_);
    if (kept.empty() && !gathered.empty()) {
      kept = gathered;
      r.fell_back = true;
    }
    for (auto& g : kept) r.boundaries.push_back(std::move(g.entry));
    return r;
  }

  // --------------------------------------------------------------- linking

  Value lookup_export(std::size_t exporter, Symbol name, const SourceLoc& loc) {
    auto it = globals_[exporter].find(name);
    if (it == globals_[exporter].end() || it->second.is_undefined()) {
      RuntimeError e(Kind::Dynamic, loc,
                     loc.str() + ": require: " + name.str() + " is not defined when linked");
      e.primitive = "require";
      throw e;
    }
    return it->second;
  }

  void link_imports(std::size_t m) {
    const auto& decl = p_.modules[m];
    const auto& info = p_.info[m];
    for (std::size_t i = 0; i < decl.imports.size(); ++i) {
      const auto& imp = decl.imports[i];
      const auto& link = info.imports[i];
      Value v = lookup_export(link.exporter, imp.binding, imp.loc);
      if (link.boundary) {
        if (deep_) {
          auto b = std::make_shared<Boundary>(Boundary{next_boundary_++, imp.loc, link.export_loc,
                                                       link.type, p_.modules[link.exporter].name,
                                                       decl.name});
          v = apply_contract(compile_contract(link.type), v, b, false, *this);
          monitored_.push_back({link.type, v});
        }
        if (blame_) {
          BoundaryEntry e;
          e.type = link.type;
          if (link.into_typed) {
            e.direction = Direction::IntoTyped;
            e.client = link.export_loc;
            e.spec = imp.loc;
          } else {
            e.direction = Direction::OutOfTyped;
            e.client = imp.loc;
            e.spec = link.export_loc;
          }
          import_entry_[{m, i}] = e;
          record_boundary(v, e.type, e.direction, e.client, e.spec);
        }
        if (shallow_ && link.into_typed) {
          auto it = import_site_.find({m, i});
          if (it != import_site_.end()) {
            const CheckSite& s = sites_[it->second];
            if (!s.shape.supported()) {
              RuntimeError e(Kind::Shape, s.loc,
                             "shallow: " + s.loc.str() + ": unsupported boundary type " +
                                 to_string(s.type) + ": " + to_string(s.shape));
              e.expected = to_string(s.shape);
              e.witness = sketch(v);
              throw e;
            }
            check_site(static_cast<int>(it->second), v, nullptr, nullptr);
          }
        }
      }
      globals_[m][imp.binding] = v;
    }
  }

  void set_global(std::size_t m, Symbol name, Value v) { globals_[m][name] = std::move(v); }

  // Complete monitoring: every higher-order value imported across a
  // boundary must be guarded.
  std::size_t monitor_scan() {
    std::size_t bad = 0;
    for (const auto& [type, v] : monitored_)
      if (!is_monitored(*type, v)) ++bad;
    return bad;
  }

  bool is_monitored(const Type& t, const Value& v) {
    if (is_first_order(t)) return true;
    const Object* o = v.object_or_null();
    if (t.is<Type::Fun>() || t.is<Type::CaseFun>() || t.is<Type::VecOf>() || t.is<Type::Hash>() ||
        t.is<Type::Record>())
      return o && o->as<Wrapped>();
    if (const auto* l = t.as<Type::List>()) {
      std::vector<Value> elems;
      if (!list_elements(v, elems)) return false;
      for (const auto& e : elems)
        if (!is_monitored(*l->elem, e)) return false;
      return true;
    }
    if (const auto* vf = t.as<Type::VecFixed>()) {
      const auto* vec = o ? o->as<Vector>() : nullptr;
      if (!vec) return false;
      for (std::size_t i = 0; i < vec->elems.size() && i < vf->elems.size(); ++i)
        if (!is_monitored(*vf->elems[i], vec->elems[i])) return false;
      return true;
    }
    if (const auto* u = t.as<Type::Union>()) {
      for (const auto& m : u->members)
        if (is_monitored(*m, v)) return true;
      return false;
    }
    return true;
  }

  // ------------------------------------------------------------ evaluation

  struct DepthGuard {
    Interp& in;
    const Term* site;
    explicit DepthGuard(Interp& in, const Term* site) : in(in), site(site) {
      if (++in.depth_ > in.opt_.max_depth) {
        --in.depth_;
        in.dynamic_msg(site, "eval", "recursion depth limit exceeded");
      }
    }
    ~DepthGuard() { --in.depth_; }
  };

  void tick(const Term& t) {
    ++steps_;
    if (opt_.step_budget && steps_ > opt_.step_budget) {
      RuntimeError e(Kind::Timeout, t.loc,
                     "timeout: step budget of " + std::to_string(opt_.step_budget) + " exhausted");
      throw e;
    }
  }

  Value lookup(const Term& t, Symbol name, const EnvPtr& env, std::size_t m) {
    for (const Env* e = env.get(); e; e = e->parent.get()) {
      for (auto it = e->slots.rbegin(); it != e->slots.rend(); ++it) {
        if (it->first == name) {
          if (it->second.is_undefined())
            dynamic_msg(&t, name.str(), "variable used before its definition");
          return it->second;
        }
      }
    }
    auto it = globals_[m].find(name);
    if (it != globals_[m].end()) {
      if (it->second.is_undefined()) dynamic_msg(&t, name.str(), "variable used before its definition");
      return it->second;
    }
    if (auto p = prim_by_name(name.str())) return heap_->primitive(*p);
    dynamic_msg(&t, name.str(), "variable used before its definition");
  }

  // Binds a closure's parameters; returns the body to evaluate.
  const TermPtr* bind(const Value& fn, const Closure& c, const std::vector<Value>& args,
                      const Term* call_site, EnvPtr& env_out) {
    const Term::Lambda* lam = c.lambda->as<Term::Lambda>();
    if (!lam) {
      lam = nullptr;
      for (const auto& clause : c.lambda->as<Term::CaseLambda>()->clauses) {
        const auto* l = clause->as<Term::Lambda>();
        if (l->params.size() == args.size()) {
          lam = l;
          break;
        }
      }
      if (!lam)
        dynamic_msg(call_site, "application",
                    "no case-lambda clause accepts " + std::to_string(args.size()) + " argument(s)");
    } else if (lam->params.size() != args.size()) {
      dynamic_msg(call_site, "application",
                  "arity mismatch: expected " + std::to_string(lam->params.size()) +
                      " argument(s), given " + std::to_string(args.size()));
    }
    auto env = std::make_shared<Env>();
    env->parent = c.env;
    env->slots.reserve(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) env->slots.emplace_back(lam->params[i].name, args[i]);
    if (shallow_ && !lam->entry_sites.empty()) {
      for (std::size_t i = 0; i < args.size(); ++i) {
        int site = lam->entry_sites[i];
        if (site == kNoSite) continue;
        if (blame_) record_link(args[i], fn, sites_[static_cast<std::size_t>(site)].hook->action);
        check_site(site, args[i], &fn, call_site);
      }
    }
    env_out = std::move(env);
    return &lam->body;
  }

  Value apply(const Value& fn, std::vector<Value>& args, const Term* call_site) {
    const Object* o = fn.object_or_null();
    if (o) {
      if (const auto* c = o->as<Closure>()) {
        EnvPtr env;
        const TermPtr* body = bind(fn, *c, args, call_site, env);
        return eval(body, std::move(env), c->module);
      }
      if (const auto* p = o->as<PrimitiveFn>()) {
        if (!prim_accepts(p->prim, args.size()))
          dynamic_msg(call_site, prim_sig(p->prim).name,
                      "arity mismatch: given " + std::to_string(args.size()) + " argument(s)");
        return call_prim(p->prim, args, call_site);
      }
      if (const auto* w = o->as<Wrapped>()) {
        if (w->contract->kind == Contract::Kind::FunGuard) {
          const Term* saved = wrapped_site_;
          wrapped_site_ = call_site;
          Value r = call_wrapped(fn, std::move(args), *this);
          wrapped_site_ = saved;
          return r;
        }
      }
    }
    dynamic(call_site, "application", "procedure?", fn);
  }

  Value eval(const TermPtr* tp, EnvPtr env, std::size_t m) {
    DepthGuard guard(*this, tp->get());
    for (;;) {
      const Term& t = **tp;
      tick(t);
      if (const auto* n = t.as<Term::Literal>()) {
        return std::visit(
            [](const auto& x) -> Value {
              using X = std::decay_t<decltype(x)>;
              if constexpr (std::is_same_v<X, std::int64_t>) return Value::integer(x);
              else if constexpr (std::is_same_v<X, double>) return Value::real(x);
              else if constexpr (std::is_same_v<X, bool>) return Value::boolean(x);
              else if constexpr (std::is_same_v<X, std::string>) return Value::string(x);
              else return Value::empty();
            },
            n->value);
      }
      if (const auto* n = t.as<Term::Var>()) return lookup(t, n->name, env, m);
      if (t.is<Term::Lambda>() || t.is<Term::CaseLambda>())
        return heap_->alloc(Closure{*tp, env, m});
      if (const auto* n = t.as<Term::App>()) {
        Value fn = eval(&n->fn, env, m);
        std::vector<Value> args;
        args.reserve(n->args.size());
        for (const auto& a : n->args) args.push_back(eval(&a, env, m));
        const Object* o = fn.object_or_null();
        const Closure* c = o ? o->as<Closure>() : nullptr;
        if (c && n->site == kNoSite) {
          EnvPtr callee;
          tp = bind(fn, *c, args, &t, callee);
          env = std::move(callee);
          m = c->module;
          continue;
        }
        Value r = apply(fn, args, &t);
        if (n->site != kNoSite) {
          if (blame_) record_link(r, fn, sites_[static_cast<std::size_t>(n->site)].hook->action);
          check_site(n->site, r, &fn, nullptr);
        }
        return r;
      }
      if (const auto* n = t.as<Term::PrimCall>()) {
        std::vector<Value> args;
        args.reserve(n->args.size());
        for (const auto& a : n->args) args.push_back(eval(&a, env, m));
        if (!prim_accepts(n->prim, args.size()))
          dynamic_msg(&t, prim_sig(n->prim).name,
                      "arity mismatch: given " + std::to_string(args.size()) + " argument(s)");
        Value r = call_prim(n->prim, args, &t, n->bounds_check);
        if (n->site != kNoSite) {
          if (blame_) record_link(r, args[0], sites_[static_cast<std::size_t>(n->site)].hook->action);
          check_site(n->site, r, args.empty() ? nullptr : &args[0], nullptr);
        } else if (blame_ && opt_.init_trusted && p_.typed(m) && r.is_object() &&
                   t.loc.origin == Origin::User) {
          if (TypePtr ty = p_.type_of(t))
            record_boundary(r, ty, Direction::IntoTyped, t.loc, t.loc);
        }
        return r;
      }
      if (const auto* n = t.as<Term::If>()) {
        Value test = eval(&n->test, env, m);
        bool truthy = !(test.is_bool() && !test.as_bool());
        tp = truthy ? &n->then : &n->els;
        continue;
      }
      if (const auto* n = t.as<Term::Let>()) {
        auto frame = std::make_shared<Env>();
        frame->parent = env;
        frame->slots.reserve(n->bindings.size());
        for (const auto& b : n->bindings) frame->slots.emplace_back(b.name, eval(&b.init, env, m));
        env = std::move(frame);
        tp = &n->body;
        continue;
      }
      if (const auto* n = t.as<Term::Letrec>()) {
        auto frame = std::make_shared<Env>();
        frame->parent = env;
        for (const auto& b : n->bindings) frame->slots.emplace_back(b.name, Value{});
        for (std::size_t i = 0; i < n->bindings.size(); ++i)
          frame->slots[i].second = eval(&n->bindings[i].init, frame, m);
        env = std::move(frame);
        tp = &n->body;
        continue;
      }
      if (const auto* n = t.as<Term::Begin>()) {
        if (n->body.empty()) return Value{};
        for (std::size_t i = 0; i + 1 < n->body.size(); ++i) eval(&n->body[i], env, m);
        tp = &n->body.back();
        continue;
      }
      if (const auto* n = t.as<Term::RecordNew>()) {
        Record r{n->tag, {}};
        for (const auto& [name, e] : n->fields) r.fields.emplace_back(name, eval(&e, env, m));
        return heap_->alloc(std::move(r));
      }
      if (const auto* n = t.as<Term::FieldRef>()) {
        Value rec = eval(&n->record, env, m);
        Value r = field_ref(rec, n->field, &t);
        if (n->site != kNoSite) {
          if (blame_) record_link(r, rec, sites_[static_cast<std::size_t>(n->site)].hook->action);
          check_site(n->site, r, &rec, nullptr);
        }
        return r;
      }
      if (const auto* n = t.as<Term::Cast>()) {
        Value v = eval(&n->expr, env, m);
        if (n->site != kNoSite) check_site(n->site, v, nullptr, nullptr);
        if (deep_) {
          auto& b = cast_boundary_[&t];
          if (!b.first) {
            Symbol owner = p_.modules[m].name;
            b.first = std::make_shared<Boundary>(Boundary{next_boundary_++, t.loc, t.loc, n->type, owner, owner});
            b.second = compile_contract(n->type);
          }
          v = apply_contract(b.second, v, b.first, false, *this);
        }
        return v;
      }
      if (const auto* n = t.as<Term::Inst>()) {
        Value v = eval(&n->expr, env, m);
        if (n->site != kNoSite) check_site(n->site, v, nullptr, nullptr);
        return v;
      }
      dynamic_msg(&t, "eval", "loop forms must be desugared before evaluation");
    }
  }

  // --------------------------------------------------------------- records

  Value field_ref(const Value& v, Symbol field, const Term* site) {
    const Object* o = v.object_or_null();
    if (o) {
      if (const auto* w = o->as<Wrapped>()) {
        if (w->contract->kind == Contract::Kind::RecordGuard) {
          Value raw = field_ref(w->inner, field, site);
          for (const auto& [name, fc] : w->contract->fields)
            if (name == field) return guarded_read(*w, raw, *fc, *this);
          return raw;
        }
      }
      if (const auto* r = o->as<Record>()) {
        for (const auto& [name, val] : r->fields)
          if (name == field) return val;
        dynamic(site, "get", "record with field " + field.str(), v);
      }
    }
    dynamic(site, "get", "record?", v);
  }

  // ------------------------------------------------------------ primitives

  static bool is_false(const Value& v) { return v.is_bool() && !v.as_bool(); }

  double number(const Value& v, std::string_view prim, const Term* site) {
    if (!v.is_number()) dynamic(site, prim, "real?", v);
    return v.as_number();
  }

  std::int64_t integer(const Value& v, std::string_view prim, const Term* site) {
    if (!v.is_int()) dynamic(site, prim, "integer?", v);
    return v.as_int();
  }

  const std::string& string(const Value& v, std::string_view prim, const Term* site) {
    if (!v.is_str()) dynamic(site, prim, "string?", v);
    return v.as_str();
  }

  const Pair& pair(const Value& v, std::string_view prim, const Term* site) {
    const Object* o = unwrap(v).object_or_null();
    const Pair* p = o ? o->as<Pair>() : nullptr;
    if (!p) dynamic(site, prim, "(and/c list? (not/c empty?))", v);
    return *p;
  }

  std::vector<Value> elements(const Value& v, std::string_view prim, const Term* site) {
    std::vector<Value> out;
    if (!list_elements(v, out)) dynamic(site, prim, "list?", v);
    return out;
  }

  Value arith(Prim p, const Value& a, const Value& b, const Term* site) {
    std::string_view name = prim_sig(p).name;
    double x = number(a, name, site);
    double y = number(b, name, site);
    if (a.is_int() && b.is_int() && p != Prim::Div) {
      std::int64_t i = a.as_int(), j = b.as_int(), r = 0;
      bool overflow = false;
      switch (p) {
        case Prim::Add: overflow = __builtin_add_overflow(i, j, &r); break;
        case Prim::Sub: overflow = __builtin_sub_overflow(i, j, &r); break;
        case Prim::Mul: overflow = __builtin_mul_overflow(i, j, &r); break;
        default: break;
      }
      if (!overflow) return Value::integer(r);
    }
    switch (p) {
      case Prim::Add: return Value::real(x + y);
      case Prim::Sub: return Value::real(x - y);
      case Prim::Mul: return Value::real(x * y);
      case Prim::Div:
        if (y == 0) dynamic_msg(site, name, "division by zero");
        return Value::real(x / y);
      default: break;
    }
    return Value{};
  }

  Value vector_ref(const Value& v, const Value& idx, const Term* site, bool bounds_check) {
    const Object* o = v.object_or_null();
    if (o) {
      if (const auto* w = o->as<Wrapped>(); w && w->contract->kind == Contract::Kind::VecGuard)
        return guarded_read(*w, vector_ref(w->inner, idx, site, bounds_check), *w->contract->elem, *this);
      if (const auto* vec = o->as<Vector>()) {
        std::int64_t i = integer(idx, "vector-ref", site);
        if (i < 0 || static_cast<std::size_t>(i) >= vec->elems.size()) {
          if (bounds_check) dynamic(site, "vector-ref", "index below " + std::to_string(vec->elems.size()), idx);
          dynamic_msg(site, "vector-ref", "elided bounds check violated by index " + sketch(idx));
        }
        return vec->elems[static_cast<std::size_t>(i)];
      }
    }
    dynamic(site, "vector-ref", "vector?", v);
  }

  Value vector_set(const Value& v, const Value& idx, Value x, const Term* site) {
    Object* o = v.object_or_null();
    if (o) {
      if (auto* w = o->as<Wrapped>(); w && w->contract->kind == Contract::Kind::VecGuard) {
        x = guarded_write(*w, x, *w->contract->elem, *this);
        return vector_set(w->inner, idx, x, site);
      }
      if (auto* vec = o->as<Vector>()) {
        if (vec->immutable) dynamic(site, "vector-set!", "mutable vector", v);
        std::int64_t i = integer(idx, "vector-set!", site);
        if (i < 0 || static_cast<std::size_t>(i) >= vec->elems.size())
          dynamic(site, "vector-set!", "index below " + std::to_string(vec->elems.size()), idx);
        vec->elems[static_cast<std::size_t>(i)] = x;
        return x;
      }
    }
    dynamic(site, "vector-set!", "vector?", v);
  }

  Hash& hash(const Value& v, std::string_view prim, const Term* site) {
    Object* o = unwrap(v).object_or_null();
    Hash* h = o ? o->as<Hash>() : nullptr;
    if (!h) dynamic(site, prim, "hash?", v);
    return *h;
  }

  const Wrapped* hash_guard(const Value& v) {
    const Object* o = v.object_or_null();
    const Wrapped* w = o ? o->as<Wrapped>() : nullptr;
    return w && w->contract->kind == Contract::Kind::HashGuard ? w : nullptr;
  }

  Value hash_ref(const Value& v, Value key, const Term* site) {
    if (const Wrapped* w = hash_guard(v)) {
      key = guarded_write(*w, key, *w->contract->key, *this);
      return guarded_read(*w, hash_ref(w->inner, key, site), *w->contract->val, *this);
    }
    Hash& h = hash(v, "hash-ref", site);
    auto it = h.table.find(key);
    if (it == h.table.end()) dynamic_msg(site, "hash-ref", "no value found for key " + sketch(key));
    return it->second;
  }

  Value hash_set(const Value& v, Value key, Value val, const Term* site) {
    if (const Wrapped* w = hash_guard(v)) {
      key = guarded_write(*w, key, *w->contract->key, *this);
      val = guarded_write(*w, val, *w->contract->val, *this);
      return hash_set(w->inner, key, val, site);
    }
    hash(v, "hash-set!", site).table[key] = val;
    return val;
  }

  bool hash_has(const Value& v, Value key, const Term* site) {
    if (const Wrapped* w = hash_guard(v)) {
      key = guarded_write(*w, key, *w->contract->key, *this);
      return hash_has(w->inner, key, site);
    }
    return hash(v, "hash-has-key?", site).table.count(key) > 0;
  }

  static bool proper_list(const Value& v) {
    std::vector<Value> ignored;
    return list_elements(v, ignored);
  }

  static bool object_is(const Value& v, auto pred) {
    const Object* o = unwrap(v).object_or_null();
    return o && pred(*o);
  }

  Value call_prim(Prim p, std::vector<Value>& a, const Term* site, bool bounds_check = true) {
    std::string_view name = prim_sig(p).name;
    switch (p) {
      case Prim::Add:
      case Prim::Sub:
      case Prim::Mul:
      case Prim::Div:
        return arith(p, a[0], a[1], site);
      case Prim::Quotient:
      case Prim::Modulo: {
        std::int64_t x = integer(a[0], name, site), y = integer(a[1], name, site);
        if (y == 0) dynamic_msg(site, name, "division by zero");
        if (p == Prim::Quotient) return Value::integer(x / y);
        std::int64_t r = x % y;
        if (r != 0 && ((r < 0) != (y < 0))) r += y;
        return Value::integer(r);
      }
      case Prim::Lt: return Value::boolean(number(a[0], name, site) < number(a[1], name, site));
      case Prim::Gt: return Value::boolean(number(a[0], name, site) > number(a[1], name, site));
      case Prim::Le: return Value::boolean(number(a[0], name, site) <= number(a[1], name, site));
      case Prim::Ge: return Value::boolean(number(a[0], name, site) >= number(a[1], name, site));
      case Prim::NumEq: return Value::boolean(number(a[0], name, site) == number(a[1], name, site));
      case Prim::Not: return Value::boolean(is_false(a[0]));
      case Prim::Equal: return Value::boolean(values_equal(a[0], a[1]));
      case Prim::StringAppend: return Value::string(string(a[0], name, site) + string(a[1], name, site));
      case Prim::StringLength: return Value::integer(static_cast<std::int64_t>(string(a[0], name, site).size()));
      case Prim::StringEq: return Value::boolean(string(a[0], name, site) == string(a[1], name, site));
      case Prim::NumberToString:
        number(a[0], name, site);
        return Value::string(print_value(a[0]));
      case Prim::List: return heap_->list(a);
      case Prim::Cons: return heap_->cons(a[0], a[1]);
      case Prim::First: return pair(a[0], name, site).car;
      case Prim::Rest: return pair(a[0], name, site).cdr;
      case Prim::IsEmpty: return Value::boolean(unwrap(a[0]).is_empty());
      case Prim::IsCons: return Value::boolean(object_is(a[0], [](const Object& o) { return o.as<Pair>() != nullptr; }));
      case Prim::Length: return Value::integer(static_cast<std::int64_t>(elements(a[0], name, site).size()));
      case Prim::ListRef: {
        std::int64_t i = integer(a[1], name, site);
        auto elems = elements(a[0], name, site);
        if (i < 0 || static_cast<std::size_t>(i) >= elems.size())
          dynamic(site, name, "index below " + std::to_string(elems.size()), a[1]);
        return elems[static_cast<std::size_t>(i)];
      }
      case Prim::Map: {
        if (!is_procedure(a[0])) dynamic(site, name, "procedure?", a[0]);
        auto elems = elements(a[1], name, site);
        std::vector<Value> out;
        out.reserve(elems.size());
        for (auto& e : elems) {
          std::vector<Value> args{e};
          out.push_back(apply(a[0], args, site));
        }
        return heap_->list(out);
      }
      case Prim::Append: {
        auto xs = elements(a[0], name, site);
        auto ys = elements(a[1], name, site);
        xs.insert(xs.end(), ys.begin(), ys.end());
        return heap_->list(xs);
      }
      case Prim::Reverse: {
        auto xs = elements(a[0], name, site);
        return heap_->list(std::vector<Value>(xs.rbegin(), xs.rend()));
      }
      case Prim::Vector: return heap_->alloc(Vector{a, true});
      case Prim::MakeVector: {
        std::int64_t n = integer(a[0], name, site);
        if (n < 0) dynamic(site, name, "natural?", a[0]);
        return heap_->alloc(Vector{std::vector<Value>(static_cast<std::size_t>(n), a[1]), false});
      }
      case Prim::VectorRef: return vector_ref(a[0], a[1], site, bounds_check);
      case Prim::VectorSet: return vector_set(a[0], a[1], a[2], site);
      case Prim::VectorLength: {
        const Object* o = unwrap(a[0]).object_or_null();
        const auto* vec = o ? o->as<Vector>() : nullptr;
        if (!vec) dynamic(site, name, "vector?", a[0]);
        return Value::integer(static_cast<std::int64_t>(vec->elems.size()));
      }
      case Prim::MakeHash: return heap_->alloc(Hash{});
      case Prim::HashRef: return hash_ref(a[0], a[1], site);
      case Prim::HashSet: return hash_set(a[0], a[1], a[2], site);
      case Prim::HashHasKey: return Value::boolean(hash_has(a[0], a[1], site));
      case Prim::HashCount: return Value::integer(static_cast<std::int64_t>(hash(a[0], name, site).table.size()));
      case Prim::IsInteger: return Value::boolean(a[0].is_int());
      case Prim::IsNatural: return Value::boolean(a[0].is_int() && a[0].as_int() >= 0);
      case Prim::IsReal: return Value::boolean(a[0].is_number());
      case Prim::IsString: return Value::boolean(a[0].is_str());
      case Prim::IsBoolean: return Value::boolean(a[0].is_bool());
      case Prim::IsList: return Value::boolean(proper_list(a[0]));
      case Prim::IsProcedure: return Value::boolean(is_procedure(a[0]));
      case Prim::IsVector: return Value::boolean(object_is(a[0], [](const Object& o) { return o.as<Vector>() != nullptr; }));
      case Prim::IsHash: return Value::boolean(object_is(a[0], [](const Object& o) { return o.as<Hash>() != nullptr; }));
      case Prim::IsEof: return Value::boolean(a[0].is_sentinel());
      case Prim::ReadBytesFrom: {
        const std::string& s = string(a[0], name, site);
        std::vector<Value> bytes;
        for (unsigned char ch : s) bytes.push_back(Value::integer(ch));
        bytes.push_back(Value::sentinel());
        return heap_->list(bytes);
      }
      case Prim::Displayln:
        out_ += a[0].is_str() ? a[0].as_str() : print_value(a[0]);
        out_ += '\n';
        return a[0];
      case Prim::Error:
        dynamic_msg(site, name, a[0].is_str() ? a[0].as_str() : print_value(a[0]));
    }
    dynamic_msg(site, name, "unknown primitive");
  }

  struct PairHash {
    std::size_t operator()(const std::pair<std::size_t, std::size_t>& k) const {
      return k.first * 1000003u ^ k.second;
    }
  };

  const TypedProgram& p_;
  const std::vector<CheckSite>& sites_;
  RunOptions opt_;
  std::shared_ptr<Heap> heap_;
  CostCounters c_;
  BlameMap bmap_;
  std::vector<std::unordered_map<Symbol, Value>> globals_;
  std::unordered_map<std::pair<std::size_t, std::size_t>, std::size_t, PairHash> import_site_;
  std::unordered_map<std::pair<std::size_t, std::size_t>, BoundaryEntry, PairHash> import_entry_;
  std::unordered_map<const Term*, std::pair<BoundaryPtr, ContractPtr>> cast_boundary_;
  std::vector<std::pair<TypePtr, Value>> monitored_;
  std::string out_;
  std::uint64_t steps_ = 0;
  std::size_t depth_ = 0;
  std::uint32_t next_boundary_ = 1;
  const Term* wrapped_site_ = nullptr;
  bool shallow_ = false;
  bool blame_ = false;
  bool deep_ = false;
};

struct ThreadJob {
  const PreparedProgram* prep;
  Evaluation result;
  std::exception_ptr failure;
};

void* thread_main(void* arg) {
  auto* job = static_cast<ThreadJob*>(arg);
  try {
    Interp interp(*job->prep);
    job->result = interp.run();
  } catch (...) {
    job->failure = std::current_exception();
  }
  return nullptr;
}

constexpr std::size_t kStackBytes = std::size_t{1} << 30;

}  // namespace

Evaluation evaluate(const PreparedProgram& prepared) {
  ThreadJob job{&prepared, {}, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStackBytes);
  pthread_t thread;
  if (pthread_create(&thread, &attr, thread_main, &job) != 0) {
    pthread_attr_destroy(&attr);
    thread_main(&job);  // fall back to the caller's stack
  } else {
    pthread_attr_destroy(&attr);
    pthread_join(thread, nullptr);
  }
  if (job.failure) std::rethrow_exception(job.failure);
  return std::move(job.result);
}

RunOutcome run_program(const std::vector<ModuleDecl>& modules, const Configuration& config,
                       const RunOptions& options) {
  RunOutcome out;
  TypedProgram typed;
  try {
    typed = typecheck(modules, config);
  } catch (const StaticTypeError& e) {
    out.status = RunOutcome::Status::StaticError;
    out.static_error = e.what();
    return out;
  }
  out.main_type = typed.main_type;
  PreparedProgram prep;
  try {
    prep = prepare(typed, options);
  } catch (const UnsupportedBoundaryType& e) {
    // Rejected while loading: reported as a run-time shape failure.
    out.status = RunOutcome::Status::RuntimeError;
    out.evaluation.error = RuntimeError(RuntimeError::Kind::Shape, e.loc(), std::string("shallow: ") + e.what());
    return out;
  }
  out.sites = prep.sites;
  out.evaluation = evaluate(prep);
  out.status = out.evaluation.ok() ? RunOutcome::Status::Ok : RunOutcome::Status::RuntimeError;
  return out;
}

}  // namespace gtl
