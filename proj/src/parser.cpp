#include <atomic>
#include <cctype>
#include <charconv>
#include <unordered_set>

#include "gtl/syntax.hpp"

namespace gtl {

NodeId fresh_node_id() {
  static std::atomic<NodeId> next{1};
  return next.fetch_add(1, std::memory_order_relaxed);
}

TermPtr make_term(SourceLoc loc, Term::Node node) {
  return std::make_shared<const Term>(Term{fresh_node_id(), std::move(loc), std::move(node)});
}

std::string_view lang_name(Lang lang) {
  switch (lang) {
    case Lang::Typed: return "typed";
    case Lang::Untyped: return "untyped";
    case Lang::Configurable: return "configurable";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Reader

struct Datum {
  enum class Kind { List, Symbol, Int, Real, Bool, Str };
  Kind kind = Kind::List;
  Span span;
  char open = '(';
  std::vector<Datum> items;
  std::string text;
  std::int64_t int_value = 0;
  double real_value = 0;
  bool bool_value = false;

  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  bool is_list() const { return kind == Kind::List; }
};

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
         c == ']' || c == '"' || c == ';';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Datum> read_all() {
    std::vector<Datum> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
    throw ParseError(msg, offset, line_column(text_, offset));
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  Datum read() {
    skip_space();
    if (pos_ >= text_.size()) fail(pos_, "unexpected end of input, expected a datum");
    char c = text_[pos_];
    if (c == '(' || c == '[') return read_list(c);
    if (c == ')' || c == ']') fail(pos_, std::string("unexpected '") + c + "'");
    if (c == '"') return read_string();
    return read_atom();
  }

  Datum read_list(char open) {
    Datum d;
    d.kind = Datum::Kind::List;
    d.open = open;
    d.span.start = pos_;
    const char close = open == '(' ? ')' : ']';
    ++pos_;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size())
        fail(d.span.start, std::string("unbalanced '") + open + "', expected '" + close + "'");
      char c = text_[pos_];
      if (c == ')' || c == ']') {
        if (c != close)
          fail(pos_, std::string("mismatched '") + c + "', expected '" + close + "'");
        ++pos_;
        d.span.end = pos_;
        return d;
      }
      d.items.push_back(read());
    }
  }

  Datum read_string() {
    Datum d;
    d.kind = Datum::Kind::Str;
    d.span.start = pos_;
    ++pos_;
    for (;;) {
      if (pos_ >= text_.size()) fail(d.span.start, "unterminated string, expected '\"'");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail(d.span.start, "unterminated string, expected '\"'");
        char e = text_[pos_++];
        if (e != '"' && e != '\\') fail(pos_ - 2, "unsupported string escape");
        d.text.push_back(e);
      } else {
        d.text.push_back(c);
      }
    }
    d.span.end = pos_;
    return d;
  }

  Datum read_atom() {
    Datum d;
    d.span.start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    d.span.end = pos_;
    d.text = std::string(text_.substr(d.span.start, pos_ - d.span.start));
    const std::string& t = d.text;
    if (t[0] == '#') {
      if (t == "#t" || t == "#true") {
        d.kind = Datum::Kind::Bool;
        d.bool_value = true;
      } else if (t == "#f" || t == "#false") {
        d.kind = Datum::Kind::Bool;
        d.bool_value = false;
      } else {
        fail(d.span.start, "bad '#' syntax, expected #t or #f");
      }
      return d;
    }
    if (looks_numeric(t)) {
      const char* first = t.data();
      const char* last = t.data() + t.size();
      if (t.find_first_of(".eE") == std::string::npos) {
        auto [ptr, ec] = std::from_chars(first, last, d.int_value);
        if (ec == std::errc() && ptr == last) {
          d.kind = Datum::Kind::Int;
          return d;
        }
        fail(d.span.start, "integer literal out of range");
      }
      auto [ptr, ec] = std::from_chars(first, last, d.real_value);
      if (ec == std::errc() && ptr == last) {
        d.kind = Datum::Kind::Real;
        return d;
      }
      fail(d.span.start, "malformed number");
    }
    d.kind = Datum::Kind::Symbol;
    return d;
  }

  static bool looks_numeric(const std::string& t) {
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    return i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> k = {
      "module", "require", "define", "lambda", "if", "let", "letrec", "begin", "cast", "inst",
      "case-lambda", "for/sum", "for/skip", "record", "get", ":"};
  return k;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<ModuleDecl> program() {
    std::vector<ModuleDecl> out;
    for (const Datum& d : Reader(text_).read_all()) out.push_back(module(d));
    return out;
  }

  TypePtr type_only() {
    auto data = Reader(text_).read_all();
    if (data.size() != 1)
      throw ParseError("expected exactly one type", 0, line_column(text_, 0));
    return type(data.front());
  }

 private:
  [[noreturn]] void fail(const Datum& d, const std::string& msg) const {
    throw ParseError(msg, d.span.start, line_column(text_, d.span.start));
  }

  SourceLoc loc(const Datum& d) const { return SourceLoc{module_, d.span, Origin::User}; }

  Symbol identifier(const Datum& d, const char* what) const {
    if (d.kind != Datum::Kind::Symbol) fail(d, std::string("expected ") + what);
    if (keywords().count(d.text)) fail(d, "keyword '" + d.text + "' used as " + what);
    return Symbol(d.text);
  }

  ModuleDecl module(const Datum& d) {
    if (!d.is_list() || d.items.empty() || !d.items[0].is_symbol("module"))
      fail(d, "expected (module name lang form ...)");
    if (d.items.size() < 3) fail(d, "expected (module name lang form ...)");
    ModuleDecl m;
    module_ = identifier(d.items[1], "module name");
    m.name = module_;
    m.loc = loc(d);
    const Datum& lang = d.items[2];
    if (lang.is_symbol("typed")) m.lang = Lang::Typed;
    else if (lang.is_symbol("untyped")) m.lang = Lang::Untyped;
    else if (lang.is_symbol("configurable")) m.lang = Lang::Configurable;
    else fail(lang, "expected typed, untyped, or configurable");

    module_scope_.clear();
    scopes_.clear();
    // Module-level names are in scope everywhere in the module.
    for (std::size_t i = 3; i < d.items.size(); ++i) {
      const Datum& f = d.items[i];
      if (!f.is_list() || f.items.empty()) continue;
      if (f.items[0].is_symbol("define") && f.items.size() >= 2) {
        const Datum& target = f.items[1];
        if (target.kind == Datum::Kind::Symbol) module_scope_.insert(Symbol(target.text));
        else if (target.is_list() && !target.items.empty() &&
                 target.items[0].kind == Datum::Kind::Symbol)
          module_scope_.insert(Symbol(target.items[0].text));
      } else if (f.items[0].is_symbol("require")) {
        for (std::size_t j = 2; j < f.items.size(); ++j) {
          const Datum& spec = f.items[j];
          if (spec.kind == Datum::Kind::Symbol) module_scope_.insert(Symbol(spec.text));
          else if (spec.is_list() && !spec.items.empty() &&
                   spec.items[0].kind == Datum::Kind::Symbol)
            module_scope_.insert(Symbol(spec.items[0].text));
        }
      }
    }

    std::unordered_set<Symbol> imported;
    for (std::size_t i = 3; i < d.items.size(); ++i) {
      const Datum& f = d.items[i];
      if (f.is_list() && !f.items.empty() && f.items[0].is_symbol("require")) {
        require(f, m, imported);
      } else if (f.is_list() && !f.items.empty() && f.items[0].is_symbol("define")) {
        m.defs.push_back(define(f));
      } else {
        m.defs.push_back(Definition{Symbol(), nullptr, expr(f), loc(f)});
      }
    }
    return m;
  }

  void require(const Datum& f, ModuleDecl& m, std::unordered_set<Symbol>& seen) {
    if (f.items.size() < 2) fail(f, "expected (require module binding ...)");
    Symbol source = identifier(f.items[1], "module name");
    if (source == m.name) fail(f.items[1], "module cannot require itself");
    for (std::size_t j = 2; j < f.items.size(); ++j) {
      const Datum& spec = f.items[j];
      Import imp;
      imp.source_module = source;
      imp.loc = loc(spec);
      if (spec.kind == Datum::Kind::Symbol) {
        imp.binding = identifier(spec, "imported name");
      } else if (spec.is_list() && spec.items.size() == 3 && spec.items[1].is_symbol(":")) {
        imp.binding = identifier(spec.items[0], "imported name");
        imp.declared_type = type(spec.items[2]);
      } else {
        fail(spec, "expected name or [name : type]");
      }
      if (!seen.insert(imp.binding).second) fail(spec, "duplicate import " + imp.binding.str());
      m.imports.push_back(std::move(imp));
    }
  }

  Definition define(const Datum& f) {
    const auto& it = f.items;
    if (it.size() < 3) fail(f, "expected (define name expr)");
    Definition def;
    def.loc = loc(f);
    if (it[1].kind == Datum::Kind::Symbol) {
      def.name = identifier(it[1], "definition name");
      if (it.size() == 3) {
        def.expr = expr(it[2]);
      } else if (it.size() == 5 && it[2].is_symbol(":")) {
        def.declared_type = type(it[3]);
        def.expr = expr(it[4]);
      } else {
        fail(f, "expected (define name expr) or (define name : type expr)");
      }
      return def;
    }
    if (!it[1].is_list() || it[1].items.empty()) fail(it[1], "expected (name param ...)");
    const Datum& header = it[1];
    def.name = identifier(header.items[0], "function name");
    std::vector<Param> params;
    for (std::size_t i = 1; i < header.items.size(); ++i) params.push_back(param(header.items[i]));
    std::size_t body_at = 2;
    TypePtr result;
    if (it.size() > 3 && it[2].is_symbol(":")) {
      result = type(it[3]);
      body_at = 4;
    }
    if (body_at >= it.size()) fail(f, "function definition needs a body");
    TermPtr fn = lambda_from(f, std::move(params), result, it, body_at);
    const auto& lam = *fn->as<Term::Lambda>();
    bool annotated = result != nullptr;
    for (const auto& p : lam.params) annotated = annotated && p.type != nullptr;
    if (annotated) {
      std::vector<TypePtr> ps;
      for (const auto& p : lam.params) ps.push_back(p.type);
      def.declared_type = ty::fun(std::move(ps), result);
    }
    def.expr = std::move(fn);
    return def;
  }

  Param param(const Datum& d) {
    if (d.kind == Datum::Kind::Symbol) return Param{identifier(d, "parameter"), nullptr, loc(d)};
    if (d.is_list() && d.items.size() == 3 && d.items[1].is_symbol(":"))
      return Param{identifier(d.items[0], "parameter"), type(d.items[2]), loc(d)};
    fail(d, "expected parameter name or [name : type]");
  }

  TermPtr lambda_from(const Datum& whole, std::vector<Param> params, TypePtr result,
                      const std::vector<Datum>& items, std::size_t body_at) {
    std::vector<Symbol> names;
    for (const auto& p : params) {
      for (const auto& n : names)
        if (n == p.name) fail(whole, "duplicate parameter " + p.name.str());
      names.push_back(p.name);
    }
    scopes_.push_back(names);
    TermPtr body = body_of(whole, items, body_at);
    scopes_.pop_back();
    return make_term(loc(whole), Term::Lambda{std::move(params), std::move(result), std::move(body), {}});
  }

  TermPtr body_of(const Datum& whole, const std::vector<Datum>& items, std::size_t from) {
    if (from >= items.size()) fail(whole, "expected a body expression");
    if (from + 1 == items.size()) return expr(items[from]);
    std::vector<TermPtr> body;
    for (std::size_t i = from; i < items.size(); ++i) body.push_back(expr(items[i]));
    return make_term(loc(whole), Term::Begin{std::move(body)});
  }

  bool bound(Symbol s) const {
    for (const auto& scope : scopes_)
      for (const auto& n : scope)
        if (n == s) return true;
    return module_scope_.count(s) > 0;
  }

  TermPtr expr(const Datum& d) {
    switch (d.kind) {
      case Datum::Kind::Int: return make_term(loc(d), Term::Literal{d.int_value});
      case Datum::Kind::Real: return make_term(loc(d), Term::Literal{d.real_value});
      case Datum::Kind::Bool: return make_term(loc(d), Term::Literal{d.bool_value});
      case Datum::Kind::Str: return make_term(loc(d), Term::Literal{d.text});
      case Datum::Kind::Symbol: {
        Symbol name = identifier(d, "expression");
        if ((d.text == "empty" || d.text == "null") && !bound(name))
          return make_term(loc(d), Term::Literal{EmptyListLit{}});
        return make_term(loc(d), Term::Var{name});
      }
      case Datum::Kind::List: break;
    }
    if (d.items.empty()) fail(d, "empty application");
    const Datum& head = d.items[0];
    const auto& it = d.items;
    if (head.kind == Datum::Kind::Symbol && keywords().count(head.text)) {
      const std::string& k = head.text;
      if (k == "lambda") {
        if (it.size() < 3 || !it[1].is_list()) fail(d, "expected (lambda (param ...) body ...)");
        std::vector<Param> params;
        for (const auto& p : it[1].items) params.push_back(param(p));
        std::size_t body_at = 2;
        TypePtr result;
        if (it.size() > 3 && it[2].is_symbol(":")) {
          result = type(it[3]);
          body_at = 4;
        }
        return lambda_from(d, std::move(params), std::move(result), it, body_at);
      }
      if (k == "case-lambda") {
        std::vector<TermPtr> clauses;
        for (std::size_t i = 1; i < it.size(); ++i) {
          const Datum& c = it[i];
          if (!c.is_list() || c.items.size() < 2 || !c.items[0].is_list())
            fail(c, "expected [(param ...) body ...]");
          std::vector<Param> params;
          for (const auto& p : c.items[0].items) params.push_back(param(p));
          std::size_t body_at = 1;
          TypePtr result;
          if (c.items.size() > 2 && c.items[1].is_symbol(":")) {
            result = type(c.items[2]);
            body_at = 3;
          }
          clauses.push_back(lambda_from(c, std::move(params), std::move(result), c.items, body_at));
        }
        if (clauses.empty()) fail(d, "case-lambda needs at least one clause");
        return make_term(loc(d), Term::CaseLambda{std::move(clauses)});
      }
      if (k == "if") {
        if (it.size() != 4) fail(d, "expected (if test then else)");
        return make_term(loc(d), Term::If{expr(it[1]), expr(it[2]), expr(it[3])});
      }
      if (k == "let" || k == "letrec") {
        if (it.size() < 3 || !it[1].is_list()) fail(d, "expected (" + k + " ([name expr] ...) body ...)");
        const bool rec = k == "letrec";
        std::vector<Binding> bindings;
        std::vector<Symbol> names;
        for (const auto& b : it[1].items) {
          if (!b.is_list() || (b.items.size() != 2 && b.items.size() != 4))
            fail(b, "expected [name expr] or [name : type expr]");
          Binding bind;
          bind.name = identifier(b.items[0], "binding name");
          bind.loc = loc(b);
          if (b.items.size() == 4) {
            if (!b.items[1].is_symbol(":")) fail(b.items[1], "expected ':'");
            bind.type = type(b.items[2]);
          }
          for (const auto& n : names)
            if (n == bind.name) fail(b, "duplicate binding " + bind.name.str());
          names.push_back(bind.name);
          bindings.push_back(std::move(bind));
        }
        if (rec) scopes_.push_back(names);
        for (std::size_t i = 0; i < bindings.size(); ++i) {
          const Datum& b = it[1].items[i];
          bindings[i].init = expr(b.items.back());
        }
        if (!rec) scopes_.push_back(names);
        TermPtr body = body_of(d, it, 2);
        scopes_.pop_back();
        if (rec) return make_term(loc(d), Term::Letrec{std::move(bindings), std::move(body)});
        return make_term(loc(d), Term::Let{std::move(bindings), std::move(body)});
      }
      if (k == "begin") {
        if (it.size() < 2) fail(d, "expected (begin expr ...)");
        std::vector<TermPtr> body;
        for (std::size_t i = 1; i < it.size(); ++i) body.push_back(expr(it[i]));
        return make_term(loc(d), Term::Begin{std::move(body)});
      }
      if (k == "cast" || k == "inst") {
        if (it.size() != 3) fail(d, "expected (" + k + " expr type)");
        if (k == "cast") return make_term(loc(d), Term::Cast{expr(it[1]), type(it[2])});
        return make_term(loc(d), Term::Inst{expr(it[1]), type(it[2])});
      }
      if (k == "record") {
        if (it.size() < 2) fail(d, "expected (record Tag [field expr] ...)");
        Symbol tag = identifier(it[1], "record tag");
        std::vector<std::pair<Symbol, TermPtr>> fields;
        for (std::size_t i = 2; i < it.size(); ++i) {
          const Datum& f = it[i];
          if (!f.is_list() || f.items.size() != 2) fail(f, "expected [field expr]");
          Symbol name = identifier(f.items[0], "field name");
          for (const auto& [n, _] : fields)
            if (n == name) fail(f, "duplicate field " + name.str());
          fields.emplace_back(name, expr(f.items[1]));
        }
        return make_term(loc(d), Term::RecordNew{tag, std::move(fields)});
      }
      if (k == "get") {
        if (it.size() != 3) fail(d, "expected (get expr field)");
        return make_term(loc(d), Term::FieldRef{expr(it[1]), identifier(it[2], "field name")});
      }
      if (k == "for/sum" || k == "for/skip") return loop(d, k == "for/skip");
      fail(head, "misplaced keyword '" + k + "'");
    }

    std::vector<TermPtr> args;
    for (std::size_t i = 1; i < it.size(); ++i) args.push_back(expr(it[i]));
    if (head.kind == Datum::Kind::Symbol) {
      Symbol name(head.text);
      if (!bound(name)) {
        if (auto p = prim_by_name(head.text))
          return make_term(loc(d), Term::PrimCall{*p, std::move(args)});
      }
    }
    return make_term(loc(d), Term::App{expr(head), std::move(args)});
  }

  // (for/sum [: R] ([x [: T] seq]) body ...)
  TermPtr loop(const Datum& d, bool skip) {
    const auto& it = d.items;
    std::size_t at = 1;
    TypePtr result;
    if (it.size() > 2 && it[1].is_symbol(":")) {
      result = type(it[2]);
      at = 3;
    }
    if (at >= it.size() || !it[at].is_list() || it[at].items.size() != 1)
      fail(d, "expected one loop clause ([name seq])");
    const Datum& clause = it[at].items[0];
    if (!clause.is_list() || (clause.items.size() != 2 && clause.items.size() != 4))
      fail(clause, "expected [name seq] or [name : type seq]");
    Param var{identifier(clause.items[0], "loop variable"), nullptr, loc(clause)};
    if (clause.items.size() == 4) {
      if (!clause.items[1].is_symbol(":")) fail(clause.items[1], "expected ':'");
      var.type = type(clause.items[2]);
    }
    TermPtr seq = expr(clause.items.back());
    scopes_.push_back({var.name});
    TermPtr body = body_of(d, it, at + 1);
    scopes_.pop_back();
    return make_term(loc(d), Term::ForLoop{skip, std::move(var), std::move(seq), std::move(result), std::move(body)});
  }

  TypePtr type(const Datum& d) {
    try {
      return type_inner(d);
    } catch (const TypeError& e) {
      fail(d, e.what());
    }
  }

  TypePtr type_inner(const Datum& d) {
    if (d.kind == Datum::Kind::Symbol) {
      const std::string& t = d.text;
      if (t == "Int" || t == "Integer") return ty::int_();
      if (t == "Nat" || t == "Natural") return ty::nat();
      if (t == "Real") return ty::real();
      if (t == "Bool" || t == "Boolean") return ty::bool_();
      if (t == "Str" || t == "String") return ty::str();
      if (keywords().count(t) || t == "->") fail(d, "expected a type");
      return ty::tvar(Symbol(t));
    }
    if (!d.is_list() || d.items.empty() || d.items[0].kind != Datum::Kind::Symbol)
      fail(d, "expected a type");
    const std::string& k = d.items[0].text;
    const auto& it = d.items;
    auto rest = [&](std::size_t from) {
      std::vector<TypePtr> out;
      for (std::size_t i = from; i < it.size(); ++i) out.push_back(type_inner(it[i]));
      return out;
    };
    auto arity = [&](std::size_t n) {
      if (it.size() != n + 1) fail(d, "wrong number of arguments to type constructor " + k);
    };
    if (k == "->") {
      if (it.size() < 2) fail(d, "expected (-> param ... result)");
      auto ts = rest(1);
      TypePtr result = ts.back();
      ts.pop_back();
      return ty::fun(std::move(ts), std::move(result));
    }
    if (k == "case->") {
      if (it.size() < 2) fail(d, "expected (case-> fun-type ...)");
      return ty::case_fun(rest(1));
    }
    if (k == "Listof") { arity(1); return ty::list(type_inner(it[1])); }
    if (k == "Vectorof") { arity(1); return ty::vec_of(type_inner(it[1])); }
    if (k == "Vector") return ty::vec_fixed(rest(1));
    if (k == "HashTable") { arity(2); return ty::hash(type_inner(it[1]), type_inner(it[2])); }
    if (k == "U") {
      if (it.size() < 3) fail(d, "a union needs at least two members");
      auto u = ty::union_(rest(1));
      if (!u->is<Type::Union>()) fail(d, "a union needs at least two distinct members");
      return u;
    }
    if (k == "Record") {
      if (it.size() < 2) fail(d, "expected (Record Tag [field type] ...)");
      Symbol tag = identifier(it[1], "record tag");
      std::vector<std::pair<Symbol, TypePtr>> fields;
      for (std::size_t i = 2; i < it.size(); ++i) {
        const Datum& f = it[i];
        if (!f.is_list() || f.items.size() != 2) fail(f, "expected [field type]");
        fields.emplace_back(identifier(f.items[0], "field name"), type_inner(f.items[1]));
      }
      return ty::record(tag, std::move(fields));
    }
    if (k == "All") {
      if (it.size() != 3 || !it[1].is_list() || it[1].items.empty())
        fail(d, "expected (All (var ...) type)");
      TypePtr body = type_inner(it[2]);
      for (std::size_t i = it[1].items.size(); i-- > 0;)
        body = ty::forall(identifier(it[1].items[i], "type variable"), body);
      return body;
    }
    fail(d, "unknown type constructor " + k);
  }

  std::string_view text_;
  Symbol module_;
  std::unordered_set<Symbol> module_scope_;
  std::vector<std::vector<Symbol>> scopes_;
};

}  // namespace

std::vector<ModuleDecl> parse(std::string_view text) { return Parser(text).program(); }

TypePtr parse_type(std::string_view text) { return Parser(text).type_only(); }

}  // namespace gtl
