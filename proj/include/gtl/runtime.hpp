#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtl/blamemap.hpp"
#include "gtl/counters.hpp"
#include "gtl/natural.hpp"
#include "gtl/transient.hpp"
#include "gtl/typecheck.hpp"

namespace gtl {

enum class Mode { Erased, Deep, Shallow, ShallowBlame };

std::string_view mode_name(Mode m);
// Accepts erased, deep, shallow, sb (case-sensitive). Throws ConfigError.
Mode parse_mode(std::string_view text);

struct RunOptions {
  Mode mode = Mode::Erased;
  bool lax_shapes = false;
  bool check_desugared = false;
  // Record a boundary entry for trackable results of trusted primitives
  // called from typed code.
  bool init_trusted = false;
  std::uint64_t step_budget = 0;  // 0: unlimited
  std::size_t max_depth = 100000;
};

/// What an SB run reports when a shape check fails.
struct BlameReport {
  std::string witness;
  std::string site;  // `kind loc shape` of the failing check
  std::vector<BoundaryEntry> boundaries;
  std::size_t unfiltered = 0;
  std::vector<BoundaryEntry> gathered;  // before filtering
  // The filter pruned everything, so `boundaries` is the unfiltered set.
  bool fell_back = false;

  std::string render() const;
};

class RuntimeError : public Error {
 public:
  enum class Kind { Shape, Contract, Dynamic, Timeout };

  RuntimeError(Kind kind, SourceLoc loc, std::string message);

  Kind kind() const { return kind_; }
  const SourceLoc& loc() const { return loc_; }

  // Shape: the application that entered the failing function, if any.
  std::optional<SourceLoc> call_loc;
  std::string expected;
  std::string witness;
  std::string primitive;  // Dynamic
  std::optional<ContractViolation> violation;
  std::optional<BlameReport> blame;

 private:
  Kind kind_;
  SourceLoc loc_;
};

std::string_view kind_name(RuntimeError::Kind k);

/// A program ready to run under one mode: optimized and, for the
/// transient modes, instrumented.
struct PreparedProgram {
  TypedProgram program;
  std::vector<CheckSite> sites;
  RunOptions options;
};

// Throws UnsupportedBoundaryType for casts with no shape.
PreparedProgram prepare(const TypedProgram& typed, const RunOptions& options);

struct Evaluation {
  std::optional<Value> value;
  std::string printed;
  std::string output;  // displayln text
  CostCounters counters;
  std::optional<RuntimeError> error;
  // Deep only: higher-order imports found unwrapped at program end.
  std::size_t monitor_violations = 0;
  // Keeps `value` alive and exposes the proper-list cache to callers.
  std::shared_ptr<Heap> heap;

  bool ok() const { return !error.has_value(); }
};

/// Runs the program on a dedicated large-stack thread. Never throws for
/// run-time failures; they are returned in `error`.
Evaluation evaluate(const PreparedProgram& prepared);

/// parse-independent pipeline: typecheck under `config`, prepare, run.
struct RunOutcome {
  enum class Status { Ok, StaticError, RuntimeError };
  Status status = Status::Ok;
  std::string static_error;
  std::vector<CheckSite> sites;
  Evaluation evaluation;
  TypePtr main_type;
};

RunOutcome run_program(const std::vector<ModuleDecl>& modules, const Configuration& config,
                       const RunOptions& options);

}  // namespace gtl
