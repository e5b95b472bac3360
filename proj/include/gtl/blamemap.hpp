#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gtl/source.hpp"
#include "gtl/types.hpp"
#include "gtl/value.hpp"

namespace gtl {

using BlameKey = std::uint64_t;

// Primitive values (numbers, booleans, strings) are untracked.
std::optional<BlameKey> blame_key(const Value& v);

/// How a child value was obtained from its parent.
struct Action {
  enum class Kind { Dom, Cod, ListElem, ListRest, ListElemAt, HashKey, HashValue, RecordField, Noop };
  Kind kind = Kind::Noop;
  std::size_t index = 0;  // Dom, Cod, ListElemAt (zero-based)
  Symbol field;           // RecordField

  static Action dom(std::size_t n) { return {Kind::Dom, n, {}}; }
  static Action cod(std::size_t n) { return {Kind::Cod, n, {}}; }
  static Action list_elem() { return {Kind::ListElem, 0, {}}; }
  static Action list_rest() { return {Kind::ListRest, 0, {}}; }
  static Action list_elem_at(std::size_t n) { return {Kind::ListElemAt, n, {}}; }
  static Action hash_key() { return {Kind::HashKey, 0, {}}; }
  static Action hash_value() { return {Kind::HashValue, 0, {}}; }
  static Action record_field(Symbol f) { return {Kind::RecordField, 0, f}; }
  static Action noop() { return {}; }

  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && a.index == b.index && a.field == b.field;
  }
};

std::string to_string(const Action& a);

/// Which way the value crossed. A value entering typed code can be blamed
/// for what it produces; a typed value leaving can be blamed (on its
/// client) for what it is given.
enum class Direction { IntoTyped, OutOfTyped };

struct BoundaryEntry {
  TypePtr type;
  Direction direction = Direction::OutOfTyped;
  SourceLoc client;
  SourceLoc spec;
  std::uint64_t serial = 0;  // unique per map, in recording order
};

struct LinkEntry {
  BlameKey parent;
  Action action;
};

using BlameEntry = std::variant<BoundaryEntry, LinkEntry>;

// The labeled type: blamable positions carry `@client`, others `@-`.
std::string labeled_type(const BoundaryEntry& e);

struct Gathered {
  BoundaryEntry entry;
  // Actions leading from the entry's type down to the witness position.
  std::vector<Action> path;
};

/// Result of navigating a type along an action path.
struct TypePosition {
  bool ok = false;        // false: an action did not fit the type
  TypePtr type;
  bool blamable = false;  // polarity agrees with the entry's direction
};

TypePosition traverse(const BoundaryEntry& e, const std::vector<Action>& path);

/// Identity-keyed, append-only blame map.
class BlameMap {
 public:
  void add_boundary(BlameKey key, BoundaryEntry e);
  void add_link(BlameKey child, BlameKey parent, Action a);

  const std::vector<BlameEntry>& entries(BlameKey key) const;
  std::size_t size() const { return total_; }
  std::size_t key_count() const { return map_.size(); }

  // Depth-first over link parents, collecting boundary entries in
  // discovery order. Each key is expanded once.
  std::vector<Gathered> gather(BlameKey start) const;
  std::vector<Gathered> gather(BlameKey parent, const Action& first) const;

 private:
  void walk(BlameKey key, std::vector<Action>& rev_path, std::unordered_map<BlameKey, bool>& seen,
            std::vector<Gathered>& out) const;

  std::unordered_map<BlameKey, std::vector<BlameEntry>> map_;
  std::size_t total_ = 0;
  std::uint64_t serial_ = 0;
};

/// Keeps the entries whose expectation at the witness position disagrees
/// with the witness, plus those whose path does not fit their type.
std::vector<Gathered> filter_blame(const Value& witness, const std::vector<Gathered>& entries,
                                   Heap& heap);

}  // namespace gtl
