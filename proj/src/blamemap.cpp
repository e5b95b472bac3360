#include "gtl/blamemap.hpp"

#include <sstream>

#include "gtl/shapes.hpp"

namespace gtl {

std::optional<BlameKey> blame_key(const Value& v) {
  if (const Object* o = v.object_or_null()) return o->id;
  return std::nullopt;
}

std::string to_string(const Action& a) {
  using K = Action::Kind;
  switch (a.kind) {
    case K::Dom: return "(dom " + std::to_string(a.index) + ")";
    case K::Cod: return "(cod " + std::to_string(a.index) + ")";
    case K::ListElem: return "list-elem";
    case K::ListRest: return "list-rest";
    case K::ListElemAt: return "(list-elem " + std::to_string(a.index) + ")";
    case K::HashKey: return "hash-key";
    case K::HashValue: return "hash-value";
    case K::RecordField: return "(record-field " + a.field.str() + ")";
    case K::Noop: return "noop";
  }
  return "?";
}

namespace {

bool blamable(Direction d, bool positive) {
  return d == Direction::IntoTyped ? positive : !positive;
}

void render(std::ostream& out, const Type& t, const BoundaryEntry& e, bool positive) {
  const std::string label = blamable(e.direction, positive) ? "@" + e.client.str() : "@-";
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Type::Fun>) {
          out << "(->";
          for (const auto& p : n.params) {
            out << ' ';
            render(out, *p, e, !positive);
          }
          out << ' ';
          render(out, *n.result, e, positive);
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::CaseFun>) {
          out << "(case->";
          for (const auto& b : n.branches) {
            out << ' ';
            render(out, *b, e, positive);
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::List>) {
          out << "(Listof ";
          render(out, *n.elem, e, positive);
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::VecOf>) {
          out << "(Vectorof ";
          render(out, *n.elem, e, positive);
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::VecFixed>) {
          out << "(Vector";
          for (const auto& x : n.elems) {
            out << ' ';
            render(out, *x, e, positive);
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::Hash>) {
          out << "(HashTable ";
          render(out, *n.key, e, positive);
          out << ' ';
          render(out, *n.val, e, positive);
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::Record>) {
          out << "(Record " << n.tag.str();
          for (const auto& [name, ft] : n.fields) {
            out << " [" << name.str() << ' ';
            render(out, *ft, e, positive);
            out << ']';
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Type::Forall>) {
          out << "(All (" << n.var.str() << ") ";
          render(out, *n.body, e, positive);
          out << ')';
        } else {
          out << to_string(t) << label;
        }
      },
      t.node);
}

// One navigation step; null when the action does not fit.
TypePtr step(const TypePtr& t, const Action& a, bool& positive) {
  using K = Action::Kind;
  if (const auto* fa = t->as<Type::Forall>()) return step(fa->body, a, positive);
  if (const auto* u = t->as<Type::Union>()) {
    TypePtr found;
    for (const auto& m : u->members) {
      bool p = positive;
      if (TypePtr r = step(m, a, p)) {
        if (found) return nullptr;  // ambiguous
        found = r;
        positive = p;
      }
    }
    return found;
  }
  switch (a.kind) {
    case K::Noop: return t;
    case K::Dom: {
      TypePtr found;
      auto consider = [&](const Type::Fun& f) {
        if (a.index >= f.params.size()) return true;
        if (found && !type_equal(found, f.params[a.index])) return false;
        found = f.params[a.index];
        return true;
      };
      if (const auto* f = t->as<Type::Fun>()) {
        consider(*f);
      } else if (const auto* cf = t->as<Type::CaseFun>()) {
        for (const auto& b : cf->branches)
          if (!consider(*b->as<Type::Fun>())) return nullptr;
      }
      if (found) positive = !positive;
      return found;
    }
    case K::Cod: {
      if (a.index != 0) return nullptr;
      if (const auto* f = t->as<Type::Fun>()) return f->result;
      if (const auto* cf = t->as<Type::CaseFun>()) {
        TypePtr r = cf->branches.front()->as<Type::Fun>()->result;
        for (const auto& b : cf->branches)
          if (!type_equal(r, b->as<Type::Fun>()->result)) return nullptr;
        return r;
      }
      return nullptr;
    }
    case K::ListElem:
      if (const auto* l = t->as<Type::List>()) return l->elem;
      if (const auto* v = t->as<Type::VecOf>()) return v->elem;
      if (const auto* v = t->as<Type::VecFixed>(); v && !v->elems.empty()) return ty::union_(v->elems);
      return nullptr;
    case K::ListRest:
      return t->is<Type::List>() ? t : nullptr;
    case K::ListElemAt:
      if (const auto* v = t->as<Type::VecFixed>())
        return a.index < v->elems.size() ? v->elems[a.index] : nullptr;
      if (const auto* l = t->as<Type::List>()) return l->elem;
      if (const auto* v = t->as<Type::VecOf>()) return v->elem;
      return nullptr;
    case K::HashKey:
      if (const auto* h = t->as<Type::Hash>()) return h->key;
      return nullptr;
    case K::HashValue:
      if (const auto* h = t->as<Type::Hash>()) return h->val;
      return nullptr;
    case K::RecordField:
      if (const auto* r = t->as<Type::Record>())
        for (const auto& [name, ft] : r->fields)
          if (name == a.field) return ft;
      return nullptr;
  }
  return nullptr;
}

}  // namespace

std::string labeled_type(const BoundaryEntry& e) {
  std::ostringstream out;
  render(out, *e.type, e, true);
  return out.str();
}

TypePosition traverse(const BoundaryEntry& e, const std::vector<Action>& path) {
  TypePosition pos;
  bool positive = true;
  TypePtr cur = e.type;
  for (const auto& a : path) {
    cur = step(cur, a, positive);
    if (!cur) return pos;
  }
  pos.ok = true;
  pos.type = cur;
  pos.blamable = blamable(e.direction, positive);
  return pos;
}

void BlameMap::add_boundary(BlameKey key, BoundaryEntry e) {
  e.serial = ++serial_;
  map_[key].emplace_back(std::move(e));
  ++total_;
}

void BlameMap::add_link(BlameKey child, BlameKey parent, Action a) {
  map_[child].emplace_back(LinkEntry{parent, std::move(a)});
  ++total_;
}

const std::vector<BlameEntry>& BlameMap::entries(BlameKey key) const {
  static const std::vector<BlameEntry> none;
  auto it = map_.find(key);
  return it == map_.end() ? none : it->second;
}

void BlameMap::walk(BlameKey key, std::vector<Action>& rev_path,
                    std::unordered_map<BlameKey, bool>& seen, std::vector<Gathered>& out) const {
  if (!seen.emplace(key, true).second) return;
  for (const auto& entry : entries(key)) {
    if (const auto* b = std::get_if<BoundaryEntry>(&entry)) {
      out.push_back({*b, std::vector<Action>(rev_path.rbegin(), rev_path.rend())});
    } else {
      const auto& link = std::get<LinkEntry>(entry);
      rev_path.push_back(link.action);
      walk(link.parent, rev_path, seen, out);
      rev_path.pop_back();
    }
  }
}

std::vector<Gathered> BlameMap::gather(BlameKey start) const {
  std::vector<Gathered> out;
  std::vector<Action> path;
  std::unordered_map<BlameKey, bool> seen;
  walk(start, path, seen, out);
  return out;
}

std::vector<Gathered> BlameMap::gather(BlameKey parent, const Action& first) const {
  std::vector<Gathered> out;
  std::vector<Action> path{first};
  std::unordered_map<BlameKey, bool> seen;
  walk(parent, path, seen, out);
  return out;
}

std::vector<Gathered> filter_blame(const Value& witness, const std::vector<Gathered>& entries,
                                   Heap& heap) {
  std::vector<Gathered> out;
  for (const auto& g : entries) {
    TypePosition pos = traverse(g.entry, g.path);
    if (!pos.ok) {
      out.push_back(g);
      continue;
    }
    Shape s = shape_of(pos.type);
    if (!s.supported() || !check_shape(s, witness, heap).pass) out.push_back(g);
  }
  return out;
}

}  // namespace gtl
