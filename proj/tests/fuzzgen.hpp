#pragma once

#include <chrono>
#include <optional>
#include <random>

#include "support.hpp"

namespace gtl::fuzz {

// Types the generator works with.
enum Ty { TInt, TNat, TReal, TBool, TStr, TListInt, TListStr, TVec, TRec, TUnion, TListList, TFun, kTyCount };

const char* kTyText[] = {"Int", "Nat", "Real", "Bool", "Str", "(Listof Int)", "(Listof Str)", "(Vector Int Str)",
                         "(Record P [a Int] [b Str])", "(U Int Str)", "(Listof (Listof Int))", "(-> Int Int)"};

bool sub(Ty a, Ty b) {
  if (a == b) return true;
  if (a == TNat) return b == TInt || b == TReal || b == TUnion;
  if (a == TInt) return b == TReal || b == TUnion;
  if (a == TStr) return b == TUnion;
  return false;
}

struct Var {
  std::string name;
  Ty ty;
};

struct Fn {
  std::string name;
  Ty param, result;
};

// Emits type-directed expressions: every expression generated for type T
// has a static type that is a subtype of T in the given environment.
class Gen {
 public:
  explicit Gen(std::uint32_t seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool chance(int percent) { return pick(100) < percent; }
  Ty any_type(bool allow_fun) { return static_cast<Ty>(pick(allow_fun ? kTyCount : kTyCount - 1)); }

  std::string expr(Ty t, std::vector<Var>& env, const std::vector<Fn>& fns, int depth) {
    // Variables and calls first, when available.
    std::vector<const Var*> vars;
    for (const auto& v : env)
      if (sub(v.ty, t)) vars.push_back(&v);
    if (!vars.empty() && chance(depth > 0 ? 30 : 70)) return vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))]->name;
    if (depth > 0) {
      std::vector<const Fn*> calls;
      for (const auto& f : fns)
        if (sub(f.result, t)) calls.push_back(&f);
      if (!calls.empty() && chance(35)) {
        const Fn* f = calls[static_cast<std::size_t>(pick(static_cast<int>(calls.size())))];
        return "(" + f->name + " " + expr(f->param, env, fns, depth - 1) + ")";
      }
      if (chance(10)) return "(if " + expr(TBool, env, fns, depth - 1) + " " + expr(t, env, fns, depth - 1) + " " +
                             expr(t, env, fns, depth - 1) + ")";
      if (chance(10)) {
        Ty bt = any_type(false);
        std::string name = "v" + std::to_string(fresh_++);
        std::string init = expr(bt, env, fns, depth - 1);
        env.push_back({name, bt});
        std::string body = expr(t, env, fns, depth - 1);
        env.pop_back();
        return "(let ([" + name + " : " + kTyText[bt] + " " + init + "]) " + body + ")";
      }
    }
    return construct(t, env, fns, depth);
  }

 private:
  std::string lit_int() { return std::to_string(pick(13) - 3); }
  std::string lit_str() {
    static const char* s[] = {"\"a\"", "\"bc\"", "\"\"", "\"pear\""};
    return s[pick(4)];
  }

  std::string construct(Ty t, std::vector<Var>& env, const std::vector<Fn>& fns, int depth) {
    auto e = [&](Ty x) { return expr(x, env, fns, depth - 1); };
    const bool deep = depth > 0;
    switch (t) {
      case TInt:
        if (!deep) return lit_int();
        switch (pick(8)) {
          case 0: return "(+ " + e(TInt) + " " + e(TInt) + ")";
          case 1: return "(- " + e(TInt) + " " + e(TInt) + ")";
          case 2: return "(first (cons " + e(TInt) + " " + e(TListInt) + "))";
          case 3: return "(get " + e(TRec) + " a)";
          case 4: return "(vector-ref " + e(TVec) + " 0)";
          case 5: return "(" + e(TFun) + " " + e(TInt) + ")";
          case 6: return "(length " + e(TListStr) + ")";
          default: return lit_int();
        }
      case TNat:
        if (!deep) return std::to_string(pick(10));
        switch (pick(4)) {
          case 0: return "(length " + e(TListInt) + ")";
          case 1: return "(string-length " + e(TStr) + ")";
          case 2: return "(+ " + e(TNat) + " " + e(TNat) + ")";
          default: return std::to_string(pick(10));
        }
      case TReal:
        if (!deep || chance(40)) return std::to_string(pick(8)) + ".5";
        return chance(50) ? "(+ " + e(TReal) + " " + e(TInt) + ")" : e(TInt);
      case TBool:
        if (!deep) return chance(50) ? "#t" : "#f";
        switch (pick(6)) {
          case 0: return "(< " + e(TInt) + " " + e(TInt) + ")";
          case 1: return "(empty? " + e(TListStr) + ")";
          case 2: return "(string=? " + e(TStr) + " " + e(TStr) + ")";
          case 3: return "(not " + e(TBool) + ")";
          case 4: return "(integer? " + e(TUnion) + ")";
          default: return chance(50) ? "#t" : "#f";
        }
      case TStr:
        if (!deep) return lit_str();
        switch (pick(6)) {
          case 0: return "(string-append " + e(TStr) + " " + e(TStr) + ")";
          case 1: return "(vector-ref " + e(TVec) + " 1)";
          case 2: return "(get " + e(TRec) + " b)";
          case 3: return "(number->string " + e(TInt) + ")";
          case 4: return "(first (cons " + e(TStr) + " " + e(TListStr) + "))";
          default: return lit_str();
        }
      case TListInt:
        if (!deep) return "(list " + lit_int() + ")";
        switch (pick(5)) {
          case 0: return "(cons " + e(TInt) + " " + e(TListInt) + ")";
          case 1: return "(reverse " + e(TListInt) + ")";
          case 2: {
            std::string y = "y" + std::to_string(fresh_++);
            env.push_back({y, TInt});
            std::string body = e(TInt);
            env.pop_back();
            return "(map (lambda ([" + y + " : Int]) " + body + ") " + e(TListInt) + ")";
          }
          case 3: return "(first (cons " + e(TListInt) + " " + e(TListList) + "))";
          default: return "(list " + e(TInt) + " " + e(TInt) + ")";
        }
      case TListStr:
        if (!deep) return "(list " + lit_str() + ")";
        switch (pick(3)) {
          case 0: return "(cons " + e(TStr) + " " + e(TListStr) + ")";
          case 1: return "(append " + e(TListStr) + " " + e(TListStr) + ")";
          default: return "(list " + e(TStr) + ")";
        }
      case TVec: return "(vector " + e(TInt) + " " + e(TStr) + ")";
      case TRec: return "(record P [a " + e(TInt) + "] [b " + e(TStr) + "])";
      case TUnion: return chance(50) ? e(TInt) : e(TStr);
      case TListList:
        return chance(50) ? "(list " + e(TListInt) + ")" : "(cons " + e(TListInt) + " " + e(TListList) + ")";
      case TFun: {
        std::string y = "y" + std::to_string(fresh_++);
        env.push_back({y, TInt});
        std::string body = e(TInt);
        env.pop_back();
        return "(lambda ([" + y + " : Int]) : Int " + body + ")";
      }
      case kTyCount: break;
    }
    return "0";
  }

  std::mt19937 rng_;
  int fresh_ = 0;
};

struct Program {
  std::string text;
  Ty main_type;
  bool main_configurable;
};

// An untyped library whose functions may not honor their declared types,
// a configurable middle module, and a main module computing a result.
Program generate(std::uint32_t seed) {
  Gen g(seed);
  std::string text;
  std::vector<Fn> lib;
  const int nlib = 1 + g.pick(3);
  text += "(module lib untyped\n";
  for (int i = 0; i < nlib; ++i) {
    Fn f{"l" + std::to_string(i), g.any_type(true), g.any_type(true)};
    std::vector<Var> env{{"x", f.param}};
    // Occasionally the implementation lies about its result type.
    Ty actual = g.chance(20) ? g.any_type(true) : f.result;
    text += "  (define (" + f.name + " x) " + g.expr(actual, env, {}, 2) + ")\n";
    lib.push_back(f);
  }
  text += ")\n";

  auto requires_of = [&](const std::string& mod, const std::vector<Fn>& fns) {
    std::string r = "  (require " + mod;
    for (const auto& f : fns)
      r += " [" + f.name + " : (-> " + kTyText[f.param] + " " + kTyText[f.result] + ")]";
    return r + ")\n";
  };

  std::vector<Fn> mid;
  const int nmid = 1 + g.pick(3);
  text += "(module mid configurable\n" + requires_of("lib", lib);
  std::vector<Fn> visible = lib;
  for (int i = 0; i < nmid; ++i) {
    Fn f{"m" + std::to_string(i), g.any_type(true), g.any_type(true)};
    std::vector<Var> env{{"p", f.param}};
    text += "  (define (" + f.name + " [p : " + kTyText[f.param] + "]) : " + kTyText[f.result] + "\n    " +
            g.expr(f.result, env, visible, 3) + ")\n";
    visible.push_back(f);
    mid.push_back(f);
  }
  text += ")\n";

  Program p;
  p.main_configurable = g.chance(50);
  p.main_type = g.any_type(true);
  text += std::string("(module main ") + (p.main_configurable ? "configurable" : "typed") + "\n";
  text += requires_of("mid", mid) + requires_of("lib", lib);
  std::vector<Fn> all = lib;
  all.insert(all.end(), mid.begin(), mid.end());
  std::vector<Var> env;
  text += "  " + g.expr(p.main_type, env, all, 3) + ")\n";
  p.text = std::move(text);
  return p;
}

// Deep structural membership for the first-order generator types.
bool inhabits(Ty t, const Value& raw) {
  const Value& v = unwrap(raw);
  const Object* o = v.object_or_null();
  auto list_of = [&](Ty elem) {
    std::vector<Value> xs;
    if (!list_elements(v, xs)) return false;
    for (const auto& x : xs)
      if (!inhabits(elem, x)) return false;
    return true;
  };
  switch (t) {
    case TInt: return v.is_int();
    case TNat: return v.is_int() && v.as_int() >= 0;
    case TReal: return v.is_number();
    case TBool: return v.is_bool();
    case TStr: return v.is_str();
    case TListInt: return list_of(TInt);
    case TListStr: return list_of(TStr);
    case TListList: return list_of(TListInt);
    case TUnion: return v.is_int() || v.is_str();
    case TVec: {
      const auto* vec = o ? o->as<Vector>() : nullptr;
      return vec && vec->elems.size() == 2 && inhabits(TInt, vec->elems[0]) && inhabits(TStr, vec->elems[1]);
    }
    case TRec: {
      const auto* r = o ? o->as<Record>() : nullptr;
      if (!r || r->tag != Symbol("P")) return false;
      bool a = false, b = false;
      for (const auto& [n, x] : r->fields) {
        if (n == Symbol("a")) a = inhabits(TInt, x);
        if (n == Symbol("b")) b = inhabits(TStr, x);
      }
      return a && b;
    }
    case TFun: return is_procedure(v) && procedure_accepts(v, 1);
    case kTyCount: break;
  }
  return false;
}


struct Stats {
  std::size_t programs = 0, runs = 0;
  std::size_t clean_shallow = 0, clean_deep = 0, shallow_errors = 0, deep_errors = 0;
  std::size_t static_errors = 0, weak_violations = 0, deep_violations = 0, disagreements = 0;
  double seconds = 0;
  std::string first_failure;  // program text of the first violation

  bool ok() const {
    return static_errors == 0 && weak_violations == 0 && deep_violations == 0 && disagreements == 0;
  }
};

// Generates `count` programs and runs each under every configuration and
// mode. Error-free Shallow/SB results must fit their static type's shape;
// error-free Deep results must inhabit it fully; all error-free runs of a
// configuration must print the same value.
inline Stats run(int count, std::uint32_t seed = 1000) {
  const auto start = std::chrono::steady_clock::now();
  Stats st;
  auto note = [&](const Program& p, const std::string& why) {
    if (st.first_failure.empty()) st.first_failure = why + "\n" + p.text;
  };
  for (int i = 0; i < count; ++i) {
    Program p = generate(seed + static_cast<std::uint32_t>(i));
    ++st.programs;
    std::vector<ModuleDecl> mods;
    try {
      mods = parse(p.text);
    } catch (const Error& e) {
      ++st.static_errors;
      note(p, e.what());
      continue;
    }
    for (const auto& c : enumerate_lattice(mods)) {
      std::optional<std::string> agreed;
      for (auto mode : gtl::test::all_modes()) {
        auto o = gtl::test::run(mods, c, mode);
        ++st.runs;
        if (o.status == RunOutcome::Status::StaticError) {
          ++st.static_errors;
          note(p, o.static_error);
          break;
        }
        const auto& ev = o.evaluation;
        const bool shallow = mode == Mode::Shallow || mode == Mode::ShallowBlame;
        if (!ev.ok()) {
          if (shallow) ++st.shallow_errors;
          if (mode == Mode::Deep) ++st.deep_errors;
          continue;
        }
        if (agreed && *agreed != ev.printed) {
          ++st.disagreements;
          note(p, "modes disagree under " + c.bits());
        }
        agreed = ev.printed;
        if (!o.main_type) continue;
        if (shallow) {
          ++st.clean_shallow;
          if (!weak_soundness_probe(o.main_type, *ev.value, *ev.heap)) {
            ++st.weak_violations;
            note(p, std::string("weak soundness violated in ") + std::string(mode_name(mode)) + " " + c.bits());
          }
        } else if (mode == Mode::Deep) {
          ++st.clean_deep;
          if (!inhabits(p.main_type, *ev.value)) {
            ++st.deep_violations;
            note(p, "deep result outside its type under " + c.bits());
          }
        }
      }
    }
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return st;
}

// Error-free Erased runs whose result misses its static type's shape. The
// untyped library lies, so this must be nonzero for the probes to mean
// anything.
inline std::size_t erased_violations(int count, std::uint32_t seed = 1000) {
  std::size_t bad = 0;
  for (int i = 0; i < count; ++i) {
    auto mods = parse(generate(seed + static_cast<std::uint32_t>(i)).text);
    for (const auto& c : enumerate_lattice(mods)) {
      auto o = gtl::test::run(mods, c, Mode::Erased);
      if (o.status == RunOutcome::Status::StaticError || !o.evaluation.ok() || !o.main_type) continue;
      if (!weak_soundness_probe(o.main_type, *o.evaluation.value, *o.evaluation.heap)) ++bad;
    }
  }
  return bad;
}

}  // namespace gtl::fuzz
