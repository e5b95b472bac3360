#pragma once

#include <unordered_map>
#include <vector>

#include "gtl/config.hpp"
#include "gtl/syntax.hpp"
#include "gtl/types.hpp"

namespace gtl {

/// How one import is resolved under the active configuration.
struct ImportLink {
  std::size_t exporter = 0;
  // Importer and exporter disagree on typedness.
  bool boundary = false;
  // Typed importer, untyped exporter (the value enters typed code).
  bool into_typed = false;
  // Boundary type, or the exporter's type for typed-to-typed imports.
  // Null when the importer is untyped and the exporter is untyped too.
  TypePtr type;
  // Where the exporter introduced the name.
  SourceLoc export_loc;
};

struct ModuleTyping {
  bool typed = false;
  std::vector<ImportLink> imports;  // parallel to ModuleDecl::imports
  std::unordered_map<Symbol, TypePtr> exports;  // typed modules only
  std::unordered_map<Symbol, SourceLoc> export_locs;
};

/// Checker output. Node-keyed tables refer to nodes of `modules`; later
/// passes rewrite terms but preserve node ids.
struct TypedProgram {
  std::vector<ModuleDecl> modules;
  std::vector<ModuleTyping> info;
  std::vector<std::size_t> order;  // dependencies first
  std::size_t main = 0;
  Configuration config;
  std::unordered_map<NodeId, TypePtr> node_types;
  // The Fun (or selected case-> branch) of every typed application.
  std::unordered_map<NodeId, TypePtr> app_branch;
  // Static type of the main module's final expression, when typed.
  TypePtr main_type;

  TypePtr type_of(const Term& t) const;
  bool typed(std::size_t module) const { return info[module].typed; }
};

/// Checks typed modules under `config`; untyped ones are only scanned for
/// unbound variables. Desugars first if needed.
/// Throws StaticTypeError, UnboundVariable or ConfigError.
TypedProgram typecheck(const std::vector<ModuleDecl>& program, const Configuration& config);

// Index of the module whose final expression is the program result: the
// last module no other module imports.
std::size_t main_module(const std::vector<ModuleDecl>& program);

}  // namespace gtl
