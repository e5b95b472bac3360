#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gtl/primitives.hpp"
#include "gtl/source.hpp"
#include "gtl/types.hpp"

namespace gtl {

using NodeId = std::uint64_t;

// Process-wide unique node identities; safe to call from worker threads.
NodeId fresh_node_id();

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct EmptyListLit {
  friend bool operator==(EmptyListLit, EmptyListLit) { return true; }
};

struct Param {
  Symbol name;
  TypePtr type;  // null when unannotated
  SourceLoc loc;
};

struct Binding {
  Symbol name;
  TypePtr type;  // null when unannotated
  TermPtr init;
  SourceLoc loc;
};

inline constexpr int kNoSite = -1;

/// Surface and kernel terms share one representation. Kernel terms never
/// contain ForLoop. The `site` fields are filled in by check insertion and
/// index into the program's CheckSite table.
struct Term {
  struct Literal {
    std::variant<std::int64_t, double, bool, std::string, EmptyListLit> value;
  };
  struct Var {
    Symbol name;
  };
  struct Lambda {
    std::vector<Param> params;
    TypePtr result;
    TermPtr body;
    std::vector<int> entry_sites;  // one per param, or empty
  };
  struct CaseLambda {
    std::vector<TermPtr> clauses;  // each a Lambda
  };
  struct App {
    TermPtr fn;
    std::vector<TermPtr> args;
    int site = kNoSite;
  };
  struct PrimCall {
    Prim prim;
    std::vector<TermPtr> args;
    int site = kNoSite;
    bool bounds_check = true;
  };
  struct If {
    TermPtr test;
    TermPtr then;
    TermPtr els;
  };
  struct Let {
    std::vector<Binding> bindings;
    TermPtr body;
  };
  struct Letrec {
    std::vector<Binding> bindings;
    TermPtr body;
  };
  struct Begin {
    std::vector<TermPtr> body;
  };
  struct RecordNew {
    Symbol tag;
    std::vector<std::pair<Symbol, TermPtr>> fields;
  };
  struct FieldRef {
    TermPtr record;
    Symbol field;
    int site = kNoSite;
  };
  struct Cast {
    TermPtr expr;
    TypePtr type;
    int site = kNoSite;
  };
  struct Inst {
    TermPtr expr;
    TypePtr type;
    int site = kNoSite;
  };
  // Surface-only loops: for/sum and for/skip.
  struct ForLoop {
    bool skip;
    Param var;
    TermPtr seq;
    TypePtr result;
    TermPtr body;
  };

  using Node = std::variant<Literal, Var, Lambda, CaseLambda, App, PrimCall, If, Let, Letrec,
                            Begin, RecordNew, FieldRef, Cast, Inst, ForLoop>;

  NodeId id = 0;
  SourceLoc loc;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

TermPtr make_term(SourceLoc loc, Term::Node node);

enum class Lang { Typed, Untyped, Configurable };

struct Import {
  Symbol source_module;
  Symbol binding;
  TypePtr declared_type;  // the require/typed annotation, if written
  SourceLoc loc;
};

struct Definition {
  Symbol name;  // empty for a top-level expression
  TypePtr declared_type;
  TermPtr expr;
  SourceLoc loc;

  bool is_expression() const { return name.empty(); }
};

struct ModuleDecl {
  Symbol name;
  Lang lang = Lang::Untyped;
  std::vector<Import> imports;
  std::vector<Definition> defs;
  SourceLoc loc;
};

/// Reads every `(module ...)` form in `text`. Throws ParseError.
std::vector<ModuleDecl> parse(std::string_view text);

/// Parses a single type expression; used by tests and tools.
TypePtr parse_type(std::string_view text);

/// Replaces loop sugar with explicit recursion. Introduced nodes carry
/// Origin::Desugared and the span of the loop form they came from.
ModuleDecl desugar(const ModuleDecl& m);

bool is_kernel(const ModuleDecl& m);

std::string print_term(const Term& t);
std::string print_module(const ModuleDecl& m);
std::string print_program(const std::vector<ModuleDecl>& modules);

// Equality ignoring node ids and source locations.
bool structurally_equal(const Term& a, const Term& b);
bool structurally_equal(const ModuleDecl& a, const ModuleDecl& b);

std::string_view lang_name(Lang lang);

// Calls `f` on every node reachable from `t`, parents before children.
template <typename F>
void for_each_node(const Term& t, F&& f);

void visit_children(const Term& t, const std::function<void(const Term&)>& f);

template <typename F>
void for_each_node(const Term& t, F&& f) {
  f(t);
  visit_children(t, [&](const Term& child) { for_each_node(child, f); });
}

}  // namespace gtl
