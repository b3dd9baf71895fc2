#include "zground/parse.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace zground {

namespace {

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

struct Sexp {
  bool is_atom = true;
  std::string atom;
  std::vector<Sexp> items;
  int line = 1, col = 1;

  const Sexp& at(std::size_t i, const std::string& what) const {
    if (is_atom || i >= items.size())
      throw ParseError("expected " + what, line, col);
    return items[i];
  }
  const std::string& sym(const std::string& what) const {
    if (!is_atom) throw ParseError("expected " + what, line, col);
    return atom;
  }
  std::string head() const {
    if (is_atom || items.empty() || !items[0].is_atom) return "";
    return items[0].atom;
  }
  void expect_len(std::size_t n, const std::string& what) const {
    if (is_atom || items.size() != n)
      throw ParseError("malformed " + what, line, col);
  }
};

struct Reader {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Reader(const std::string& t) : text(t) {}

  int peek() const {
    return pos < text.size() ? static_cast<unsigned char>(text[pos]) : -1;
  }
  int get() {
    if (pos >= text.size()) return -1;
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return static_cast<unsigned char>(c);
  }
  void skip_blank() {
    for (;;) {
      int c = peek();
      if (c == ';') {
        while (c != -1 && c != '\n') c = get();
      } else if (c != -1 && std::isspace(c)) {
        get();
      } else {
        return;
      }
    }
  }

  std::optional<Sexp> read() {
    skip_blank();
    int c = peek();
    if (c == -1) return std::nullopt;
    Sexp s;
    s.line = line;
    s.col = col;
    if (c == '(') {
      get();
      s.is_atom = false;
      for (;;) {
        skip_blank();
        c = peek();
        if (c == -1) throw ParseError("unbalanced '('", s.line, s.col);
        if (c == ')') {
          get();
          return s;
        }
        auto item = read();
        if (!item) throw ParseError("unbalanced '('", s.line, s.col);
        s.items.push_back(std::move(*item));
      }
    }
    if (c == ')') throw ParseError("unmatched ')'", line, col);
    if (c == '|') {  // SMT-LIB quoted symbol
      get();
      for (;;) {
        c = get();
        if (c == -1) throw ParseError("unterminated '|' symbol", s.line, s.col);
        if (c == '|') break;
        s.atom.push_back(static_cast<char>(c));
      }
      return s;
    }
    while (c != -1 && !std::isspace(c) && c != '(' && c != ')' && c != ';') {
      s.atom.push_back(static_cast<char>(get()));
      c = peek();
    }
    return s;
  }

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    while (auto s = read()) out.push_back(std::move(*s));
    return out;
  }
};

bool is_numeral(const std::string& s) {
  std::size_t i = s.size() > 1 && s[0] == '-' ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Shared parsing machinery
// ---------------------------------------------------------------------------

struct ProblemBuilder {
  Problem prob;
  FreshNames fresh;
  int clause_index = 0;

  SortId sort_ref(const Sexp& s) const {
    const std::string& name = s.sym("a sort name");
    if (name == "Int") return Signature::kInt;
    if (!prob.sig.has_sort(name))
      throw ParseError("undeclared sort '" + name + "'", s.line, s.col);
    return prob.sig.sort_id(name);
  }

  Term parse_term(const Sexp& s, const std::map<std::string, SortId>& vars) {
    if (s.is_atom) {
      if (is_numeral(s.atom)) return Term::num(Int(s.atom));
      auto v = vars.find(s.atom);
      if (v != vars.end()) return Term::var(v->first, v->second);
      const FunDecl* f = prob.sig.function(s.atom);
      if (f && f->args.empty()) return Term::constant(f->name, f->range);
      throw ParseError(f ? "function '" + s.atom + "' used without arguments"
                         : "undeclared symbol '" + s.atom + "'",
                       s.line, s.col);
    }
    if (s.items.empty() || !s.items[0].is_atom)
      throw ParseError("expected a term", s.line, s.col);
    const std::string& op = s.items[0].atom;
    auto int_arg = [&](const Sexp& x) {
      Term t = parse_term(x, vars);
      if (t.sort() != Signature::kInt)
        throw ParseError("expected an integer term", x.line, x.col);
      return t;
    };
    if (op == "+") {
      if (s.items.size() < 3)
        throw ParseError("'+' needs at least two arguments", s.line, s.col);
      std::vector<Term> args;
      for (std::size_t i = 1; i < s.items.size(); ++i)
        args.push_back(int_arg(s.items[i]));
      return Term::app("+", std::move(args), Signature::kInt);
    }
    if (op == "-") {
      if (s.items.size() == 2)
        return negate_term(int_arg(s.items[1]));
      if (s.items.size() >= 3) {  // SMT-LIB subtraction (- a b c...)
        std::vector<Term> args{int_arg(s.items[1])};
        for (std::size_t i = 2; i < s.items.size(); ++i)
          args.push_back(negate_term(int_arg(s.items[i])));
        return Term::app("+", std::move(args), Signature::kInt);
      }
      throw ParseError("'-' needs arguments", s.line, s.col);
    }
    const FunDecl* f = prob.sig.function(op);
    if (!f)
      throw ParseError("undeclared function '" + op + "'", s.items[0].line,
                       s.items[0].col);
    if (s.items.size() - 1 != f->args.size())
      throw ParseError("'" + op + "' expects " +
                           std::to_string(f->args.size()) + " arguments, got " +
                           std::to_string(s.items.size() - 1),
                       s.line, s.col);
    std::vector<Term> args;
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      Term t = parse_term(s.items[i], vars);
      if (t.sort() != f->args[i - 1])
        throw ParseError("argument " + std::to_string(i) + " of '" + op +
                             "' has sort " + sort_name(t.sort()) +
                             ", expected " + sort_name(f->args[i - 1]),
                         s.items[i].line, s.items[i].col);
      args.push_back(std::move(t));
    }
    return Term::app(f->name, std::move(args), f->range);
  }

  std::string sort_name(SortId id) const {
    return id == Signature::kInt ? "Int" : prob.sig.sort_name(id);
  }

  Literal parse_literal(const Sexp& s,
                        const std::map<std::string, SortId>& vars) {
    if (s.head() == "not") {
      s.expect_len(2, "(not ...)");
      Literal l = parse_literal(s.items[1], vars);
      if (l.negated)
        throw ParseError("doubly negated literal", s.line, s.col);
      l.negated = true;
      return l;
    }
    const std::string& op = s.head();
    if (op == "le" || op == "eq") {
      s.expect_len(3, "(" + op + " t s)");
      Term l = parse_term(s.items[1], vars);
      Term r = parse_term(s.items[2], vars);
      if (op == "le") {
        if (l.sort() != Signature::kInt || r.sort() != Signature::kInt)
          throw ParseError("'le' needs integer sides", s.line, s.col);
        return {Atom::leq(std::move(l), std::move(r)), false};
      }
      if (l.sort() != r.sort())
        throw ParseError("equality between sorts " + sort_name(l.sort()) +
                             " and " + sort_name(r.sort()),
                         s.line, s.col);
      return {Atom::eq(std::move(l), std::move(r)), false};
    }
    if (op == "in-image") {
      s.expect_len(3, "(in-image t f)");
      Term t = parse_term(s.items[1], vars);
      const std::string& fname = s.items[2].sym("a function name");
      const FunDecl* f = prob.sig.function(fname);
      if (!f)
        throw ParseError("undeclared function '" + fname + "'",
                         s.items[2].line, s.items[2].col);
      if (f->range != t.sort())
        throw ParseError("image atom sort mismatch: term has sort " +
                             sort_name(t.sort()) + ", '" + fname +
                             "' ranges over " + sort_name(f->range),
                         s.line, s.col);
      if (f->range == Signature::kInt)
        throw ParseError("image atoms over the integer sort are not allowed",
                         s.line, s.col);
      return {Atom::in_image(std::move(t), fname), false};
    }
    throw ParseError("expected an atom (le / eq / in-image)", s.line, s.col);
  }

  /// Normalizes, records unit equalities, purifies, appends.
  void add_clause(const std::map<std::string, SortId>& vars,
                  const std::vector<Literal>& cons,
                  const std::vector<Literal>& ante,
                  const std::vector<Literal>& succ, bool do_purify) {
    std::optional<std::pair<Term, Term>> unit;
    auto cs = normalize_into_zclauses(vars, cons, ante, succ, prob.sig,
                                      "input:" + std::to_string(clause_index++),
                                      &unit);
    if (unit) prob.unit_int_equalities.push_back(*unit);
    for (ZClause& c : cs) {
      if (do_purify) purify(c, prob.sig, fresh);
      prob.clauses.push_back(std::move(c));
    }
  }
};

// ---------------------------------------------------------------------------
// Native format
// ---------------------------------------------------------------------------

Problem parse_native(const std::vector<Sexp>& forms) {
  ProblemBuilder b;
  bool saw_sorts = false, saw_functions = false, saw_theory = false,
       saw_clause = false;
  auto section_guard = [&](const Sexp& s, bool& seen, const char* what) {
    if (seen)
      throw ParseError(std::string("duplicate (") + what + " ...) section",
                       s.line, s.col);
    if (saw_clause)
      throw ParseError(std::string("(") + what +
                           " ...) must come before the clauses",
                       s.line, s.col);
    seen = true;
  };
  for (const Sexp& s : forms) {
    const std::string h = s.head();
    if (h == "sorts") {
      section_guard(s, saw_sorts, "sorts");
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const std::string& name = s.items[i].sym("a sort name");
        try {
          b.prob.sig.add_sort(name);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), s.items[i].line, s.items[i].col);
        }
      }
    } else if (h == "functions") {
      section_guard(s, saw_functions, "functions");
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const Sexp& f = s.items[i];
        if (f.is_atom || f.items.size() < 2)
          throw ParseError("expected (name arg-sorts... range)", f.line, f.col);
        FunDecl decl;
        decl.name = f.items[0].sym("a function name");
        for (std::size_t j = 1; j + 1 < f.items.size(); ++j)
          decl.args.push_back(b.sort_ref(f.items[j]));
        decl.range = b.sort_ref(f.items.back());
        try {
          b.prob.sig.add_function(std::move(decl));
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), f.line, f.col);
        }
      }
    } else if (h == "theory") {
      section_guard(s, saw_theory, "theory");
      s.expect_len(2, "(theory name)");
      const std::string& name = s.items[1].sym("a theory name");
      auto tag = theory_tag_from_name(name);
      if (!tag)
        throw ParseError("unknown theory '" + name +
                             "' (expected arrays-int, stratified, st2 or "
                             "generic)",
                         s.items[1].line, s.items[1].col);
      b.prob.theory = *tag;
    } else if (h == "zclause") {
      saw_clause = true;
      std::map<std::string, SortId> vars;
      std::vector<Literal> cons, ante, succ;
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const Sexp& sec = s.items[i];
        const std::string sh = sec.head();
        if (sh == "vars") {
          for (std::size_t j = 1; j < sec.items.size(); ++j) {
            const Sexp& v = sec.items[j];
            v.expect_len(2, "(name sort) variable declaration");
            const std::string& name = v.items[0].sym("a variable name");
            if (vars.count(name))
              throw ParseError("duplicate variable '" + name + "'",
                               v.line, v.col);
            if (b.prob.sig.has_function(name))
              throw ParseError("variable '" + name +
                                   "' shadows a declared function",
                               v.line, v.col);
            vars.emplace(name, b.sort_ref(v.items[1]));
          }
        } else if (sh == "constraints" || sh == "ante" || sh == "succ") {
          auto& dst = sh == "constraints" ? cons : (sh == "ante" ? ante : succ);
          for (std::size_t j = 1; j < sec.items.size(); ++j)
            dst.push_back(b.parse_literal(sec.items[j], vars));
        } else {
          throw ParseError(
              "expected (vars ...), (constraints ...), (ante ...) or "
              "(succ ...)",
              sec.line, sec.col);
        }
      }
      // Variables declared but not used would fail validation downstream;
      // drop them here so declarations can be generous.
      std::set<std::string> used;
      auto collect = [&](const Term& t, auto&& self) -> void {
        if (t.is_var()) used.insert(t.head());
        if (t.is_app())
          for (const Term& a : t.args()) self(a, self);
      };
      for (const auto* lits : {&cons, &ante, &succ})
        for (const Literal& l : *lits) {
          collect(l.atom.lhs, collect);
          if (l.atom.kind != AtomKind::InImage) collect(l.atom.rhs, collect);
        }
      for (auto it = vars.begin(); it != vars.end();)
        it = used.count(it->first) ? std::next(it) : vars.erase(it);
      try {
        b.add_clause(vars, cons, ante, succ, /*do_purify=*/true);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), s.line, s.col);
      }
    } else {
      throw ParseError(
          "expected (sorts ...), (functions ...), (theory ...) or "
          "(zclause ...)",
          s.line, s.col);
    }
  }
  return std::move(b.prob);
}

// ---------------------------------------------------------------------------
// SMT-LIB2 subset
// ---------------------------------------------------------------------------

const std::set<std::string>& smtlib_heads() {
  static const std::set<std::string> heads = {
      "set-logic",    "set-info", "set-option", "declare-sort",
      "declare-fun",  "declare-const", "assert", "check-sat",
      "get-model",    "exit"};
  return heads;
}

struct SmtParser {
  ProblemBuilder b;
  SortId array_sort = Signature::kInt;  // kInt = "none yet"
  SortId elem_sort = Signature::kInt;

  SortId sort_ref(const Sexp& s) {
    if (s.is_atom) {
      if (s.atom == "Int") return Signature::kInt;
      if (!b.prob.sig.has_sort(s.atom))
        throw ParseError("undeclared sort '" + s.atom + "'", s.line, s.col);
      return b.prob.sig.sort_id(s.atom);
    }
    if (s.head() == "Array") {
      s.expect_len(3, "(Array Int sort)");
      if (!s.items[1].is_atom || s.items[1].atom != "Int")
        throw ParseError("only integer-indexed arrays are supported",
                         s.items[1].line, s.items[1].col);
      SortId elem = sort_ref(s.items[2]);
      if (elem == Signature::kInt)
        throw ParseError("integer-valued arrays are not supported",
                         s.items[2].line, s.items[2].col);
      std::string name = "(Array Int " + b.prob.sig.sort_name(elem) + ")";
      if (array_sort != Signature::kInt) {
        if (b.prob.sig.sort_name(array_sort) != name)
          throw ParseError("only one array sort is supported", s.line, s.col);
        return array_sort;
      }
      array_sort = b.prob.sig.add_sort(name);
      elem_sort = elem;
      b.prob.sig.add_function(
          {"select", {array_sort, Signature::kInt}, elem_sort});
      b.prob.sig.add_function(
          {"store", {array_sort, Signature::kInt, elem_sort}, array_sort});
      b.prob.theory = TheoryTag::ArraysInt;
      return array_sort;
    }
    throw ParseError("unsupported sort", s.line, s.col);
  }

  Literal parse_smt_literal(const Sexp& s) {
    if (s.head() == "not") {
      s.expect_len(2, "(not ...)");
      Literal l = parse_smt_literal(s.items[1]);
      if (l.negated) throw ParseError("doubly negated literal", s.line, s.col);
      l.negated = true;
      return l;
    }
    const std::string op = s.head();
    static const std::map<std::string, int> rel = {
        {"<=", 0}, {"<", 1}, {">=", 2}, {">", 3}, {"=", 4}};
    auto r = rel.find(op);
    if (r == rel.end())
      throw ParseError("expected a literal ((=, <=, <, >=, > ...) or its "
                       "negation)",
                       s.line, s.col);
    s.expect_len(3, "(" + op + " a b)");
    static const std::map<std::string, SortId> no_vars;
    Term a = b.parse_term(s.items[1], no_vars);
    Term c = b.parse_term(s.items[2], no_vars);
    if (r->second == 4) {
      if (a.sort() != c.sort())
        throw ParseError("equality between different sorts", s.line, s.col);
      return {Atom::eq(std::move(a), std::move(c)), false};
    }
    if (a.sort() != Signature::kInt || c.sort() != Signature::kInt)
      throw ParseError("'" + op + "' needs integer sides", s.line, s.col);
    switch (r->second) {
      case 0: return {Atom::leq(std::move(a), std::move(c)), false};
      case 1: return {Atom::leq(std::move(a), add_offset(c, -1)), false};
      case 2: return {Atom::leq(std::move(c), std::move(a)), false};
      default: return {Atom::leq(std::move(c), add_offset(a, -1)), false};
    }
  }

  void parse_assert(const Sexp& body) {
    std::vector<Literal> ante, succ;
    auto add_lit = [&](const Sexp& s) {
      if (s.is_atom && s.atom == "false") return;  // neutral disjunct
      Literal l = parse_smt_literal(s);
      (l.negated ? ante : succ).push_back({l.atom, false});
    };
    if (body.is_atom && body.atom == "true") return;
    if (body.is_atom && body.atom == "false") {
      b.add_clause({}, {}, {}, {}, false);  // the empty clause
      return;
    }
    if (body.head() == "or") {
      bool tautology = false;
      for (std::size_t i = 1; i < body.items.size(); ++i)
        if (body.items[i].is_atom && body.items[i].atom == "true")
          tautology = true;
      if (tautology) return;
      for (std::size_t i = 1; i < body.items.size(); ++i)
        add_lit(body.items[i]);
    } else {
      add_lit(body);
    }
    b.add_clause({}, {}, ante, succ, /*do_purify=*/false);
  }

  Problem run(const std::vector<Sexp>& forms) {
    for (const Sexp& s : forms) {
      const std::string h = s.head();
      if (h == "set-logic" || h == "set-info" || h == "set-option" ||
          h == "check-sat" || h == "get-model" || h == "exit") {
        continue;
      } else if (h == "declare-sort") {
        if (s.items.size() < 2)
          throw ParseError("malformed declare-sort", s.line, s.col);
        if (s.items.size() >= 3 && s.items[2].sym("an arity") != "0")
          throw ParseError("only zero-arity sorts are supported",
                           s.items[2].line, s.items[2].col);
        try {
          b.prob.sig.add_sort(s.items[1].sym("a sort name"));
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), s.line, s.col);
        }
      } else if (h == "declare-fun" || h == "declare-const") {
        FunDecl decl;
        decl.name = s.at(1, "a name").sym("a name");
        std::size_t range_at;
        if (h == "declare-fun") {
          const Sexp& args = s.at(2, "an argument sort list");
          if (args.is_atom)
            throw ParseError("expected an argument sort list", args.line,
                             args.col);
          for (const Sexp& a : args.items) decl.args.push_back(sort_ref(a));
          range_at = 3;
        } else {
          range_at = 2;
        }
        decl.range = sort_ref(s.at(range_at, "a range sort"));
        try {
          b.prob.sig.add_function(std::move(decl));
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), s.line, s.col);
        }
      } else if (h == "assert") {
        s.expect_len(2, "(assert formula)");
        try {
          parse_assert(s.items[1]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), s.line, s.col);
        }
      } else {
        throw ParseError("unsupported SMT-LIB command", s.line, s.col);
      }
    }
    return std::move(b.prob);
  }
};

}  // namespace

Problem parse_problem(const std::string& text) {
  Reader reader(text);
  std::vector<Sexp> forms = reader.read_all();
  if (!forms.empty() && smtlib_heads().count(forms[0].head()))
    return SmtParser{}.run(forms);
  return parse_native(forms);
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

namespace {

void collect_vars(const Term& t, const std::map<std::string, SortId>& declared,
                  std::map<std::string, SortId>& out) {
  if (t.is_var()) {
    auto it = declared.find(t.head());
    if (it != declared.end()) out.insert(*it);
    return;
  }
  if (t.is_app())
    for (const Term& a : t.args()) collect_vars(a, declared, out);
}

}  // namespace

std::string print_problem(const Problem& p) {
  std::string out;
  const Signature& sig = p.sig;
  if (sig.sort_count() > 1) {
    out += "(sorts";
    for (SortId s = 1; s < sig.sort_count(); ++s)
      out += ' ' + sig.sort_name(s);
    out += ")\n";
  }
  if (!sig.functions().empty()) {
    out += "(functions";
    for (const auto& [name, decl] : sig.functions()) {
      out += "\n  (" + name;
      for (SortId a : decl.args)
        out += ' ' + (a == Signature::kInt ? "Int" : sig.sort_name(a));
      out += ' ' + (decl.range == Signature::kInt ? "Int"
                                                  : sig.sort_name(decl.range));
      out += ')';
    }
    out += ")\n";
  }
  out += "(theory " + theory_tag_name(p.theory) + ")\n";
  for (const ZClause& c : p.clauses) {
    out += "(zclause";
    std::map<std::string, SortId> used;
    for (const Atom* a : c.all_atoms()) {
      collect_vars(a->lhs, c.vars, used);
      if (a->kind != AtomKind::InImage) collect_vars(a->rhs, c.vars, used);
    }
    if (!used.empty()) {
      out += " (vars";
      for (const auto& [name, sort] : used)
        out += " (" + name + ' ' +
               (sort == Signature::kInt ? "Int" : sig.sort_name(sort)) + ')';
      out += ')';
    }
    auto section = [&out](const char* tag, const std::vector<Atom>& atoms) {
      if (atoms.empty()) return;
      out += " (";
      out += tag;
      for (const Atom& a : atoms) out += ' ' + a.str();
      out += ')';
    };
    section("constraints", c.constraints);
    section("ante", c.antecedent);
    section("succ", c.succedent);
    out += ")\n";
  }
  return out;
}

}  // namespace zground
