#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtl/blamemap.hpp"
#include "gtl/shapes.hpp"
#include "gtl/typecheck.hpp"

namespace gtl {

enum class SiteKind { FnEntry, ElimResult, Cast, Inst, BoundaryImport };

std::string_view site_kind_name(SiteKind k);

/// Which parent value a checked result descends from, and how. The parent
/// is the value of `parent_expr` at run time (the operator for
/// applications, the container for accessors, the lambda itself for
/// function entries).
struct BlameHook {
  NodeId parent_expr = 0;
  Action action;
};

struct CheckSite {
  SiteKind kind = SiteKind::ElimResult;
  std::size_t param_index = 0;  // FnEntry
  std::size_t module = 0;
  std::size_t import_index = 0;  // BoundaryImport
  SourceLoc loc;
  Shape shape;
  TypePtr type;
  std::optional<BlameHook> hook;
};

struct CheckOptions {
  ShapeOptions shapes;
  // Debug: also instrument desugared code (produces spurious failures).
  bool check_desugared = false;
};

/// A typed program whose terms carry indices into `sites`.
struct InstrumentedProgram {
  TypedProgram program;
  std::vector<CheckSite> sites;
};

/// Load-time rejection of a check that cannot be expressed as a shape.
class UnsupportedBoundaryType : public Error {
 public:
  UnsupportedBoundaryType(SourceLoc loc, const std::string& what);
  const SourceLoc& loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

/// Transient check insertion over every typed module. Untyped modules are
/// left untouched. Throws UnsupportedBoundaryType for casts to a type with
/// no shape; unsupported boundary imports are recorded and rejected when
/// the program is linked.
InstrumentedProgram insert_checks(const TypedProgram& program, const CheckOptions& opts = {});

enum class OptimizeMode { Deep, Shallow };

/// Vector bounds-check elision (both modes) and constant-condition branch
/// pruning (Deep only; not sound for Shallow).
TypedProgram optimize(const TypedProgram& program, OptimizeMode mode);

// `kind loc shape` per site.
std::string dump_checks(const std::vector<CheckSite>& sites);

}  // namespace gtl
