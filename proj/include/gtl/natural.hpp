#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gtl/counters.hpp"
#include "gtl/shapes.hpp"
#include "gtl/types.hpp"
#include "gtl/value.hpp"

namespace gtl {

/// One typed/untyped boundary. The positive party produces the value, the
/// negative party consumes it.
struct Boundary {
  std::uint32_t id = 0;
  SourceLoc importer_loc;
  SourceLoc exporter_loc;
  TypePtr type;
  Symbol positive;
  Symbol negative;
};

struct Contract {
  enum class Kind { Flat, FunGuard, VecGuard, HashGuard, RecordGuard, ListGuard, UnionPick, Reject };
  Kind kind = Kind::Flat;
  TypePtr type;
  // FunGuard: one entry per case-> branch (a plain function has one).
  struct Branch {
    std::vector<ContractPtr> params;
    ContractPtr result;
  };
  std::vector<Branch> branches;
  ContractPtr elem;                     // VecGuard, ListGuard
  std::vector<ContractPtr> elems;       // ListGuard over a fixed vector
  ContractPtr key, val;                 // HashGuard
  std::vector<std::pair<Symbol, ContractPtr>> fields;  // RecordGuard
  std::vector<std::pair<Shape, ContractPtr>> members;  // UnionPick
  std::string reason;                   // Reject
};

/// Raised by a failed contract; names exactly one boundary and party.
struct ContractViolation {
  BoundaryPtr boundary;
  Symbol blamed;
  std::string expected;
  std::string witness;

  std::string message() const;
};

class ContractFailure : public Error {
 public:
  explicit ContractFailure(ContractViolation v);
  const ContractViolation& violation() const { return v_; }

 private:
  ContractViolation v_;
};

ContractPtr compile_contract(const TypePtr& type);

// True when `v` deeply inhabits the first-order type `t`; counts one
// flat_check per inspected node.
bool deep_check(const Type& t, const Value& v, Heap& heap, CostCounters& counters);

/// Services the contract system needs from the evaluator.
class ContractHost {
 public:
  virtual ~ContractHost() = default;
  virtual Heap& heap() = 0;
  virtual CostCounters& counters() = 0;
  virtual Value call(const Value& fn, std::vector<Value> args) = 0;
};

/// Checks and, for higher-order contracts, wraps. `swapped` exchanges the
/// parties (used for values flowing in argument position).
Value apply_contract(const ContractPtr& c, const Value& v, const BoundaryPtr& b, bool swapped,
                     ContractHost& host);

/// Calls through a FunGuard wrapper: arguments are checked against the
/// negative party, the result against the positive one.
Value call_wrapped(const Value& wrapper, std::vector<Value> args, ContractHost& host);

// vector-ref / vector-set! / hash-ref / hash-set! / field access through
// guards. Each returns the (possibly wrapped) value read or written.
Value guarded_read(const Wrapped& w, const Value& raw, const Contract& part, ContractHost& host);
Value guarded_write(const Wrapped& w, const Value& raw, const Contract& part, ContractHost& host);

}  // namespace gtl
