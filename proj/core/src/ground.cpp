#include "zground/ground.hpp"

#include <set>
#include <stdexcept>

namespace zground {

namespace {

bool term_contains(const Term& haystack, const Term& needle) {
  if (haystack == needle) return true;
  if (!haystack.is_app()) return false;
  for (const Term& a : haystack.args())
    if (term_contains(a, needle)) return true;
  return false;
}

bool uses_array_ops(const Term& t) {
  if (!t.is_app()) return false;
  if ((t.head() == "select" && t.args().size() == 2) ||
      (t.head() == "store" && t.args().size() == 3))
    return true;
  for (const Term& a : t.args())
    if (uses_array_ops(a)) return true;
  return false;
}

}  // namespace

GroundProblem build_ground_problem(const Problem& problem,
                                   const std::optional<Term>& escape) {
  GroundProblem g;
  g.sig = problem.sig;
  g.has_arrays = problem.theory == TheoryTag::ArraysInt;

  for (std::size_t ci = 0; ci < problem.clauses.size(); ++ci) {
    ZClause c = inline_grounding_atoms(problem.clauses[ci]);
    std::string where = "clause " + std::to_string(ci);
    if (!c.is_ground())
      throw std::invalid_argument(
          where + " is not ground after inlining grounding atoms: " + c.str());

    // Trivial evaluation mirroring the simplification pass.
    ZClause out;
    out.origin = c.origin;
    bool tautology = false;
    bool constraints_false = false;
    for (const Atom& a : c.constraints) {
      if (a.kind == AtomKind::InImage)
        throw std::invalid_argument(where + ": image atom survived: " +
                                    a.str());
      if (escape &&
          (term_contains(a.lhs, *escape) || term_contains(a.rhs, *escape)))
        throw std::invalid_argument(
            where + ": escape constant in a constraint: " + a.str());
      if (a.lhs == a.rhs) continue;  // reflexive
      if (a.lhs.is_num() && a.rhs.is_num()) {
        bool truth = a.kind == AtomKind::Leq ? a.lhs.value() <= a.rhs.value()
                                             : a.lhs.value() == a.rhs.value();
        if (truth) continue;
        constraints_false = true;
        break;
      }
      out.constraints.push_back(a);
    }
    if (constraints_false) continue;  // guard false: clause trivially true
    for (const Atom& a : c.antecedent) {
      if (a.kind == AtomKind::InImage)
        throw std::invalid_argument(where + ": image atom survived: " +
                                    a.str());
      if (a.kind == AtomKind::Eq && a.lhs == a.rhs) continue;
      out.antecedent.push_back(a);
    }
    for (const Atom& a : c.succedent) {
      if (a.kind == AtomKind::InImage)
        throw std::invalid_argument(where + ": image atom survived: " +
                                    a.str());
      if (a.kind == AtomKind::Eq && a.lhs == a.rhs) {
        tautology = true;
        break;
      }
      out.succedent.push_back(a);
    }
    if (tautology) continue;
    for (const Atom* a : out.all_atoms()) {
      if (uses_array_ops(a->lhs) ||
          (a->kind != AtomKind::InImage && uses_array_ops(a->rhs)))
        g.has_arrays = true;
    }
    g.clauses.push_back(std::move(out));
  }
  return g;
}

namespace {

const std::set<std::string>& smt_reserved() {
  static const std::set<std::string> words = {
      "assert", "let",   "as",    "par",   "and",      "or",
      "not",    "ite",   "true",  "false", "distinct", "select",
      "store",  "div",   "mod",   "abs",   "Int",      "Bool",
      "Array",  "exists", "forall", "xor",  "implies",  "_"};
  return words;
}

/// Quotes symbols clashing with reserved words. Parser-produced names are
/// identifier-shaped, so only whole-word clashes need the |...| form.
std::string smt_sym(const std::string& name, bool native_arrays) {
  if (native_arrays && (name == "select" || name == "store")) return name;
  if (smt_reserved().count(name)) return "|" + name + "|";
  return name;
}

struct Emitter {
  const GroundProblem& g;
  SortId array_sort = 0;
  SortId elem_sort = 0;
  bool native_arrays = false;

  std::string sort_ref(SortId s) const {
    if (s == Signature::kInt) return "Int";
    if (native_arrays && s == array_sort)
      return "(Array Int " + sort_ref(elem_sort) + ")";
    return smt_sym(g.sig.sort_name(s), native_arrays);
  }

  std::string num(const Int& v) const {
    if (v < 0) return "(- " + Int(-v).str() + ")";
    return v.str();
  }

  std::string term(const Term& t) const {
    switch (t.kind()) {
      case Term::Kind::Num:
        return num(t.value());
      case Term::Kind::Var:
        throw std::logic_error("variable in ground emission: " + t.head());
      case Term::Kind::App: {
        if (t.head() == "+" && t.args().size() >= 2) return sum(t);
        if (t.head() == "-" && t.args().size() == 1)
          return "(- " + term(t.args()[0]) + ")";
        if (t.args().empty()) return smt_sym(t.head(), native_arrays);
        std::string out = "(" + smt_sym(t.head(), native_arrays);
        for (const Term& a : t.args()) {
          out += ' ';
          out += term(a);
        }
        out += ')';
        return out;
      }
    }
    return "?";
  }

  /// Sums render subtraction-style so no negative numeral literals appear:
  /// (+ a b), (- a 1), (- (+ a b) 2), (- 0 c 1).
  std::string sum(const Term& t) const {
    std::vector<std::string> pos, neg;
    for (const Term& a : t.args()) {
      if (a.is_num()) {
        if (a.value() < 0)
          neg.push_back(Int(-a.value()).str());
        else
          pos.push_back(a.value().str());
      } else if (a.is_app() && a.head() == "-" && a.args().size() == 1) {
        neg.push_back(term(a.args()[0]));
      } else {
        pos.push_back(term(a));
      }
    }
    std::string head;
    if (pos.empty())
      head = "0";
    else if (pos.size() == 1)
      head = pos[0];
    else {
      head = "(+";
      for (const std::string& p : pos) head += ' ' + p;
      head += ')';
    }
    if (neg.empty()) return head;
    std::string out = "(- " + head;
    for (const std::string& n : neg) out += ' ' + n;
    out += ')';
    return out;
  }

  std::string atom(const Atom& a) const {
    if (a.kind == AtomKind::InImage)
      throw std::logic_error("image atom in ground emission");
    const char* op = a.kind == AtomKind::Eq ? "=" : "<=";
    return std::string("(") + op + ' ' + term(a.lhs) + ' ' + term(a.rhs) + ')';
  }

  std::string clause(const ZClause& c) const {
    std::vector<std::string> lits;
    for (const Atom& a : c.constraints) lits.push_back("(not " + atom(a) + ')');
    for (const Atom& a : c.antecedent) lits.push_back("(not " + atom(a) + ')');
    for (const Atom& a : c.succedent) lits.push_back(atom(a));
    if (lits.empty()) return "false";
    if (lits.size() == 1) return lits[0];
    std::string out = "(or";
    for (const std::string& l : lits) out += ' ' + l;
    out += ')';
    return out;
  }
};

}  // namespace

std::string emit_smtlib(const GroundProblem& g) {
  Emitter em{g};
  const FunDecl* sel = g.sig.function("select");
  if (g.has_arrays && sel && sel->args.size() == 2) {
    em.native_arrays = true;
    em.array_sort = sel->args[0];
    em.elem_sort = sel->range;
  }

  std::string out;
  out += "(set-logic ";
  out += em.native_arrays ? "QF_AUFLIA" : "QF_UFLIA";
  out += ")\n";

  for (SortId s = 1; s < g.sig.sort_count(); ++s) {
    if (em.native_arrays && s == em.array_sort) continue;
    out += "(declare-sort " + smt_sym(g.sig.sort_name(s), em.native_arrays) +
           " 0)\n";
  }
  for (const auto& [name, decl] : g.sig.functions()) {
    if (em.native_arrays && (name == "select" || name == "store")) continue;
    out += "(declare-fun " + smt_sym(name, em.native_arrays) + " (";
    for (std::size_t i = 0; i < decl.args.size(); ++i) {
      if (i) out += ' ';
      out += em.sort_ref(decl.args[i]);
    }
    out += ") " + em.sort_ref(decl.range) + ")\n";
  }
  for (const ZClause& c : g.clauses)
    out += "(assert " + em.clause(c) + ")\n";
  out += "(check-sat)\n";
  return out;
}

}  // namespace zground
