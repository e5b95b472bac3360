#include <cmath>
#include <cstdio>
#include <sstream>

#include "gtl/syntax.hpp"

namespace gtl {
namespace {

std::string real_literal(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s = buf;
  if (std::isfinite(d) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string string_literal(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void print_param(std::ostream& out, const Param& p) {
  if (p.type) out << '[' << p.name.str() << " : " << to_string(p.type) << ']';
  else out << p.name.str();
}

void print(std::ostream& out, const Term& t);

void print_lambda_tail(std::ostream& out, const Term::Lambda& l) {
  out << '(';
  for (std::size_t i = 0; i < l.params.size(); ++i) {
    if (i) out << ' ';
    print_param(out, l.params[i]);
  }
  out << ')';
  if (l.result) out << " : " << to_string(l.result);
  out << ' ';
  print(out, *l.body);
}

void print_bindings(std::ostream& out, const std::vector<Binding>& bs) {
  out << '(';
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (i) out << ' ';
    out << '[' << bs[i].name.str();
    if (bs[i].type) out << " : " << to_string(bs[i].type);
    out << ' ';
    print(out, *bs[i].init);
    out << ']';
  }
  out << ')';
}

void print(std::ostream& out, const Term& t) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Term::Literal>) {
          std::visit(
              [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, std::int64_t>) out << v;
                else if constexpr (std::is_same_v<V, double>) out << real_literal(v);
                else if constexpr (std::is_same_v<V, bool>) out << (v ? "#t" : "#f");
                else if constexpr (std::is_same_v<V, std::string>) out << string_literal(v);
                else out << "empty";
              },
              n.value);
        } else if constexpr (std::is_same_v<N, Term::Var>) {
          out << n.name.str();
        } else if constexpr (std::is_same_v<N, Term::Lambda>) {
          out << "(lambda ";
          print_lambda_tail(out, n);
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::CaseLambda>) {
          out << "(case-lambda";
          for (const auto& c : n.clauses) {
            const auto& l = *c->template as<Term::Lambda>();
            out << " [";
            print_lambda_tail(out, l);
            out << ']';
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::App>) {
          out << '(';
          print(out, *n.fn);
          for (const auto& a : n.args) {
            out << ' ';
            print(out, *a);
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::PrimCall>) {
          out << '(' << prim_sig(n.prim).name;
          for (const auto& a : n.args) {
            out << ' ';
            print(out, *a);
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::If>) {
          out << "(if ";
          print(out, *n.test);
          out << ' ';
          print(out, *n.then);
          out << ' ';
          print(out, *n.els);
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::Let> || std::is_same_v<N, Term::Letrec>) {
          out << (std::is_same_v<N, Term::Let> ? "(let " : "(letrec ");
          print_bindings(out, n.bindings);
          out << ' ';
          print(out, *n.body);
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::Begin>) {
          out << "(begin";
          for (const auto& e : n.body) {
            out << ' ';
            print(out, *e);
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::RecordNew>) {
          out << "(record " << n.tag.str();
          for (const auto& [name, e] : n.fields) {
            out << " [" << name.str() << ' ';
            print(out, *e);
            out << ']';
          }
          out << ')';
        } else if constexpr (std::is_same_v<N, Term::FieldRef>) {
          out << "(get ";
          print(out, *n.record);
          out << ' ' << n.field.str() << ')';
        } else if constexpr (std::is_same_v<N, Term::Cast> || std::is_same_v<N, Term::Inst>) {
          out << (std::is_same_v<N, Term::Cast> ? "(cast " : "(inst ");
          print(out, *n.expr);
          out << ' ' << to_string(n.type) << ')';
        } else if constexpr (std::is_same_v<N, Term::ForLoop>) {
          out << (n.skip ? "(for/skip" : "(for/sum");
          if (n.result) out << " : " << to_string(n.result);
          out << " (";
          if (n.var.type)
            out << '[' << n.var.name.str() << " : " << to_string(n.var.type) << ' ';
          else
            out << '[' << n.var.name.str() << ' ';
          print(out, *n.seq);
          out << "]) ";
          print(out, *n.body);
          out << ')';
        }
      },
      t.node);
}

bool types_equal(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return type_equal(*a, *b);
}

bool terms_equal(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool term_lists_equal(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!terms_equal(a[i], b[i])) return false;
  return true;
}

bool params_equal(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !types_equal(a[i].type, b[i].type)) return false;
  return true;
}

bool bindings_equal(const std::vector<Binding>& a, const std::vector<Binding>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !types_equal(a[i].type, b[i].type) ||
        !terms_equal(a[i].init, b[i].init))
      return false;
  return true;
}

bool nodes_equal(const Term::Literal& a, const Term::Literal& b) { return a.value == b.value; }
bool nodes_equal(const Term::Var& a, const Term::Var& b) { return a.name == b.name; }
bool nodes_equal(const Term::Lambda& a, const Term::Lambda& b) {
  return params_equal(a.params, b.params) && types_equal(a.result, b.result) &&
         terms_equal(a.body, b.body) && a.entry_sites == b.entry_sites;
}
bool nodes_equal(const Term::CaseLambda& a, const Term::CaseLambda& b) {
  return term_lists_equal(a.clauses, b.clauses);
}
bool nodes_equal(const Term::App& a, const Term::App& b) {
  return a.site == b.site && terms_equal(a.fn, b.fn) && term_lists_equal(a.args, b.args);
}
bool nodes_equal(const Term::PrimCall& a, const Term::PrimCall& b) {
  return a.prim == b.prim && a.site == b.site && a.bounds_check == b.bounds_check &&
         term_lists_equal(a.args, b.args);
}
bool nodes_equal(const Term::If& a, const Term::If& b) {
  return terms_equal(a.test, b.test) && terms_equal(a.then, b.then) && terms_equal(a.els, b.els);
}
bool nodes_equal(const Term::Let& a, const Term::Let& b) {
  return bindings_equal(a.bindings, b.bindings) && terms_equal(a.body, b.body);
}
bool nodes_equal(const Term::Letrec& a, const Term::Letrec& b) {
  return bindings_equal(a.bindings, b.bindings) && terms_equal(a.body, b.body);
}
bool nodes_equal(const Term::Begin& a, const Term::Begin& b) {
  return term_lists_equal(a.body, b.body);
}
bool nodes_equal(const Term::RecordNew& a, const Term::RecordNew& b) {
  if (a.tag != b.tag || a.fields.size() != b.fields.size()) return false;
  for (std::size_t i = 0; i < a.fields.size(); ++i)
    if (a.fields[i].first != b.fields[i].first || !terms_equal(a.fields[i].second, b.fields[i].second))
      return false;
  return true;
}
bool nodes_equal(const Term::FieldRef& a, const Term::FieldRef& b) {
  return a.field == b.field && a.site == b.site && terms_equal(a.record, b.record);
}
bool nodes_equal(const Term::Cast& a, const Term::Cast& b) {
  return a.site == b.site && types_equal(a.type, b.type) && terms_equal(a.expr, b.expr);
}
bool nodes_equal(const Term::Inst& a, const Term::Inst& b) {
  return a.site == b.site && types_equal(a.type, b.type) && terms_equal(a.expr, b.expr);
}
bool nodes_equal(const Term::ForLoop& a, const Term::ForLoop& b) {
  return a.skip == b.skip && a.var.name == b.var.name && types_equal(a.var.type, b.var.type) &&
         types_equal(a.result, b.result) && terms_equal(a.seq, b.seq) &&
         terms_equal(a.body, b.body);
}

}  // namespace

std::string print_term(const Term& t) {
  std::ostringstream out;
  print(out, t);
  return out.str();
}

std::string print_module(const ModuleDecl& m) {
  std::ostringstream out;
  out << "(module " << m.name.str() << ' ' << lang_name(m.lang);
  // Consecutive imports from one module share a require form.
  for (std::size_t i = 0; i < m.imports.size();) {
    const Symbol source = m.imports[i].source_module;
    out << "\n  (require " << source.str();
    for (; i < m.imports.size() && m.imports[i].source_module == source; ++i) {
      const auto& imp = m.imports[i];
      if (imp.declared_type)
        out << " [" << imp.binding.str() << " : " << to_string(imp.declared_type) << ']';
      else
        out << ' ' << imp.binding.str();
    }
    out << ')';
  }
  for (const auto& def : m.defs) {
    out << "\n  ";
    if (def.is_expression()) {
      print(out, *def.expr);
      continue;
    }
    out << "(define " << def.name.str();
    if (def.declared_type) out << " : " << to_string(def.declared_type);
    out << ' ';
    print(out, *def.expr);
    out << ')';
  }
  out << ")\n";
  return out.str();
}

std::string print_program(const std::vector<ModuleDecl>& modules) {
  std::string out;
  for (std::size_t i = 0; i < modules.size(); ++i) {
    if (i) out += '\n';
    out += print_module(modules[i]);
  }
  return out;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using N = std::decay_t<decltype(x)>;
        return nodes_equal(x, std::get<N>(b.node));
      },
      a.node);
}

bool structurally_equal(const ModuleDecl& a, const ModuleDecl& b) {
  if (a.name != b.name || a.lang != b.lang || a.imports.size() != b.imports.size() ||
      a.defs.size() != b.defs.size())
    return false;
  for (std::size_t i = 0; i < a.imports.size(); ++i) {
    const auto& x = a.imports[i];
    const auto& y = b.imports[i];
    if (x.source_module != y.source_module || x.binding != y.binding ||
        !types_equal(x.declared_type, y.declared_type))
      return false;
  }
  for (std::size_t i = 0; i < a.defs.size(); ++i) {
    const auto& x = a.defs[i];
    const auto& y = b.defs[i];
    if (x.name != y.name || !types_equal(x.declared_type, y.declared_type) ||
        !terms_equal(x.expr, y.expr))
      return false;
  }
  return true;
}

void visit_children(const Term& t, const std::function<void(const Term&)>& f) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Term::Lambda>) {
          f(*n.body);
        } else if constexpr (std::is_same_v<N, Term::CaseLambda>) {
          for (const auto& c : n.clauses) f(*c);
        } else if constexpr (std::is_same_v<N, Term::App>) {
          f(*n.fn);
          for (const auto& a : n.args) f(*a);
        } else if constexpr (std::is_same_v<N, Term::PrimCall>) {
          for (const auto& a : n.args) f(*a);
        } else if constexpr (std::is_same_v<N, Term::If>) {
          f(*n.test);
          f(*n.then);
          f(*n.els);
        } else if constexpr (std::is_same_v<N, Term::Let> || std::is_same_v<N, Term::Letrec>) {
          for (const auto& b : n.bindings) f(*b.init);
          f(*n.body);
        } else if constexpr (std::is_same_v<N, Term::Begin>) {
          for (const auto& e : n.body) f(*e);
        } else if constexpr (std::is_same_v<N, Term::RecordNew>) {
          for (const auto& fe : n.fields) f(*fe.second);
        } else if constexpr (std::is_same_v<N, Term::FieldRef>) {
          f(*n.record);
        } else if constexpr (std::is_same_v<N, Term::Cast> || std::is_same_v<N, Term::Inst>) {
          f(*n.expr);
        } else if constexpr (std::is_same_v<N, Term::ForLoop>) {
          f(*n.seq);
          f(*n.body);
        }
      },
      t.node);
}

}  // namespace gtl
