#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gtl/symbol.hpp"

namespace gtl {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

enum class BaseType { Int, Nat, Real, Bool, Str };

/// Static types of the language. Unions are kept normalized: flat, at least
/// two members, no duplicates.
struct Type {
  struct Base {
    BaseType kind;
  };
  struct Fun {
    std::vector<TypePtr> params;
    TypePtr result;
  };
  struct CaseFun {
    std::vector<TypePtr> branches;  // each a Fun, pairwise distinct arity
  };
  struct List {
    TypePtr elem;
  };
  struct VecFixed {
    std::vector<TypePtr> elems;
  };
  struct VecOf {
    TypePtr elem;
  };
  struct Hash {
    TypePtr key;
    TypePtr val;
  };
  struct Record {
    Symbol tag;
    std::vector<std::pair<Symbol, TypePtr>> fields;
  };
  struct Union {
    std::vector<TypePtr> members;
  };
  struct Forall {
    Symbol var;
    TypePtr body;
  };
  struct TVar {
    Symbol name;
  };

  using Node = std::variant<Base, Fun, CaseFun, List, VecFixed, VecOf, Hash, Record, Union,
                            Forall, TVar>;
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

class TypeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace ty {

TypePtr base(BaseType kind);
TypePtr int_();
TypePtr nat();
TypePtr real();
TypePtr bool_();
TypePtr str();
TypePtr fun(std::vector<TypePtr> params, TypePtr result);
// Throws TypeError when two branches share an arity.
TypePtr case_fun(std::vector<TypePtr> branches);
TypePtr list(TypePtr elem);
TypePtr vec_fixed(std::vector<TypePtr> elems);
TypePtr vec_of(TypePtr elem);
TypePtr hash(TypePtr key, TypePtr val);
// Throws TypeError on duplicate field names.
TypePtr record(Symbol tag, std::vector<std::pair<Symbol, TypePtr>> fields);
// Flattens and deduplicates; a single surviving member is returned as-is.
TypePtr union_(std::vector<TypePtr> members);
TypePtr forall(Symbol var, TypePtr body);
TypePtr tvar(Symbol name);

}  // namespace ty

bool type_equal(const Type& a, const Type& b);
inline bool type_equal(const TypePtr& a, const TypePtr& b) { return type_equal(*a, *b); }

// Concrete syntax, re-readable by the parser.
std::string to_string(const Type& t);
inline std::string to_string(const TypePtr& t) { return to_string(*t); }

/// Structural subtyping with the numeric tower Nat <: Int <: Real, width
/// subtyping on records, contravariant function domains, invariant mutable
/// containers and alpha-equivalent universals.
bool subtype(const TypePtr& a, const TypePtr& b);

// Least common supertype when one side subsumes the other, else a union.
TypePtr join(const TypePtr& a, const TypePtr& b);

TypePtr substitute(const TypePtr& t, Symbol var, const TypePtr& replacement);
bool occurs_free(Symbol var, const Type& t);
bool is_closed(const Type& t);

// True when no function, mutable container, or universal appears anywhere.
// Such types are checkable by a one-shot structural traversal.
bool is_first_order(const Type& t);

// Arity of a Fun, or the arity set of a CaseFun branch list.
std::vector<std::size_t> arities(const Type& t);

}  // namespace gtl
