#include "zground/zclause.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <stdexcept>

namespace zground {

std::string theory_tag_name(TheoryTag t) {
  switch (t) {
    case TheoryTag::ArraysInt: return "arrays-int";
    case TheoryTag::Stratified: return "stratified";
    case TheoryTag::St2: return "st2";
    case TheoryTag::Generic: return "generic";
  }
  return "?";
}

std::optional<TheoryTag> theory_tag_from_name(const std::string& s) {
  if (s == "arrays-int") return TheoryTag::ArraysInt;
  if (s == "stratified") return TheoryTag::Stratified;
  if (s == "st2") return TheoryTag::St2;
  if (s == "generic") return TheoryTag::Generic;
  return std::nullopt;
}

namespace {

void collect_vars_of_term(const Term& t,
                          std::map<std::string, SortId>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    out.emplace(t.head(), t.sort());
    return;
  }
  for (const Term& a : t.args()) collect_vars_of_term(a, out);
}

void collect_vars_of_atom(const Atom& a, std::map<std::string, SortId>& out) {
  collect_vars_of_term(a.lhs, out);
  if (a.kind != AtomKind::InImage) collect_vars_of_term(a.rhs, out);
}

std::map<std::string, SortId> occurring_vars(const ZClause& c) {
  std::map<std::string, SortId> out;
  for (const Atom* a : c.all_atoms()) collect_vars_of_atom(*a, out);
  return out;
}

}  // namespace

bool ZClause::is_ground() const {
  for (const Atom* a : all_atoms())
    if (!a->is_ground()) return false;
  return true;
}

std::vector<std::string> ZClause::integer_vars() const {
  std::vector<std::string> out;
  for (const auto& [name, sort] : occurring_vars(*this))
    if (sort == Signature::kInt) out.push_back(name);
  return out;
}

std::vector<const Atom*> ZClause::all_atoms() const {
  std::vector<const Atom*> out;
  out.reserve(constraints.size() + antecedent.size() + succedent.size());
  for (const Atom& a : constraints) out.push_back(&a);
  for (const Atom& a : antecedent) out.push_back(&a);
  for (const Atom& a : succedent) out.push_back(&a);
  return out;
}

std::string ZClause::str() const {
  std::string out = "(zclause";
  auto occ = occurring_vars(*this);
  if (!occ.empty()) {
    out += " (vars";
    for (const auto& [name, sort] : occ) {
      out += " (" + name + ' ';
      out += (sort == Signature::kInt) ? "Int" : ("#" + std::to_string(sort));
      out += ')';
    }
    out += ')';
  }
  auto section = [&](const char* tag, const std::vector<Atom>& atoms) {
    if (atoms.empty()) return;
    out += " (";
    out += tag;
    for (const Atom& a : atoms) {
      out += ' ';
      out += a.str();
    }
    out += ')';
  };
  section("constraints", constraints);
  section("ante", antecedent);
  section("succ", succedent);
  out += ')';
  return out;
}

FreshNames::FreshNames() : FreshNames(seed_from_env()) {}
FreshNames::FreshNames(unsigned start) : seed_(start), var_counter_(start) {}

unsigned FreshNames::seed_from_env() {
  const char* env = std::getenv("Z_GROUNDER_SEED");
  if (!env) return 0;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || (end && *end != '\0')) return 0;
  return static_cast<unsigned>(v);
}

std::string FreshNames::fresh_var(const ZClause& clause, const Signature& sig,
                                  const std::string& stem) {
  while (true) {
    std::string cand = stem + std::to_string(var_counter_++);
    if (!clause.has_var(cand) && !sig.has_function(cand) &&
        !sig.has_sort(cand) && !Signature::is_reserved(cand))
      return cand;
  }
}

std::string FreshNames::fresh_const(const Signature& sig,
                                    const std::string& stem) {
  auto [it, inserted] = const_counters_.emplace(stem, seed_);
  unsigned& n = it->second;
  while (true) {
    std::string cand = (n == 0) ? stem : stem + std::to_string(n);
    ++n;
    if (!sig.has_function(cand) && !sig.has_sort(cand) &&
        !Signature::is_reserved(cand))
      return cand;
  }
}

namespace {

/// x <= t - 1, the integer negation of t <= x; both sides normalized.
Atom negated_leq(const Term& t, const Term& s) {
  return Atom::leq(normalize_numerals(s), add_offset(t, -1));
}

void orient_constraint_equalities(ZClause& c) {
  for (Atom& a : c.constraints) {
    if (a.kind != AtomKind::Eq) continue;
    if (!a.lhs.is_var() && a.rhs.is_var()) std::swap(a.lhs, a.rhs);
  }
}

}  // namespace

std::vector<ZClause> normalize_into_zclauses(
    const std::map<std::string, SortId>& vars,
    const std::vector<Literal>& constraints, const std::vector<Literal>& ante,
    const std::vector<Literal>& succ, const Signature& /*sig*/,
    const std::string& origin,
    std::optional<std::pair<Term, Term>>* unit_int_equality) {
  ZClause seed;
  seed.vars = vars;
  seed.origin = origin;
  std::vector<ZClause> working = {seed};

  auto to_all = [&](auto&& fn) {
    for (ZClause& c : working) fn(c);
  };
  // Duplicates the working set and applies one alternative to each half.
  auto split = [&](const Atom& alt1, const Atom& alt2) {
    std::vector<ZClause> next;
    next.reserve(working.size() * 2);
    for (const ZClause& c : working) {
      ZClause a = c;
      a.constraints.push_back(alt1);
      next.push_back(std::move(a));
    }
    for (const ZClause& c : working) {
      ZClause b = c;
      b.constraints.push_back(alt2);
      next.push_back(std::move(b));
    }
    working = std::move(next);
  };
  // Adds the negation of an arithmetic atom to the constraint part.
  auto add_negated_arith = [&](const Atom& a) {
    if (a.kind == AtomKind::Leq) {
      Atom na = negated_leq(a.lhs, a.rhs);
      to_all([&](ZClause& c) { c.constraints.push_back(na); });
    } else {  // Eq: t = s is false iff t <= s-1 or s <= t-1
      split(negated_leq(a.rhs, a.lhs), negated_leq(a.lhs, a.rhs));
    }
  };

  for (const Literal& lit : constraints) {
    if (!is_arith_atom(lit.atom))
      throw std::invalid_argument(
          "constraint part holds a non-arithmetic atom: " + lit.atom.str());
    if (!lit.negated) {
      Atom a = normalize_numerals(lit.atom);
      to_all([&](ZClause& c) { c.constraints.push_back(a); });
    } else {
      add_negated_arith(normalize_numerals(lit.atom));
    }
  }
  for (const Literal& lit : ante) {
    Atom a = normalize_numerals(lit.atom);
    if (is_arith_atom(a)) {
      if (!lit.negated) {
        to_all([&](ZClause& c) { c.constraints.push_back(a); });
      } else {
        add_negated_arith(a);
      }
    } else {
      if (!lit.negated) {
        to_all([&](ZClause& c) { c.antecedent.push_back(a); });
      } else {
        to_all([&](ZClause& c) { c.succedent.push_back(a); });
      }
    }
  }
  for (const Literal& lit : succ) {
    Atom a = normalize_numerals(lit.atom);
    if (is_arith_atom(a)) {
      if (!lit.negated) {
        add_negated_arith(a);
      } else {
        to_all([&](ZClause& c) { c.constraints.push_back(a); });
      }
    } else {
      if (!lit.negated) {
        to_all([&](ZClause& c) { c.succedent.push_back(a); });
      } else {
        to_all([&](ZClause& c) { c.antecedent.push_back(a); });
      }
    }
  }

  if (unit_int_equality && vars.empty() && constraints.empty() &&
      ante.empty() && succ.size() == 1 && !succ[0].negated &&
      succ[0].atom.kind == AtomKind::Eq && is_arith_atom(succ[0].atom) &&
      succ[0].atom.is_ground()) {
    *unit_int_equality = std::make_pair(normalize_numerals(succ[0].atom.lhs),
                                        normalize_numerals(succ[0].atom.rhs));
  }

  for (std::size_t i = 0; i < working.size(); ++i) {
    orient_constraint_equalities(working[i]);
    if (working.size() > 1)
      working[i].origin = origin + "#" + std::to_string(i);
  }
  return working;
}

void purify(ZClause& clause, const Signature& sig, FreshNames& fresh) {
  for (const Atom& a : clause.antecedent)
    if (is_arith_atom(a))
      throw std::invalid_argument(
          "purify requires arithmetic atoms in the constraint part, found: " +
          a.str());
  for (const Atom& a : clause.succedent)
    if (is_arith_atom(a))
      throw std::invalid_argument(
          "purify requires arithmetic atoms in the constraint part, found: " +
          a.str());

  std::map<Term, std::string, TermLess> cache;
  std::vector<Atom> new_constraints;

  // Replaces maximal non-variable integer subterms by shared fresh variables.
  auto purify_term = [&](auto&& self, const Term& t) -> Term {
    if (t.is_var()) return t;
    if (t.sort() == Signature::kInt) {
      Term n = normalize_numerals(t);
      auto it = cache.find(n);
      std::string name;
      if (it != cache.end()) {
        name = it->second;
      } else {
        name = fresh.fresh_var(clause, sig);
        clause.vars[name] = Signature::kInt;
        cache.emplace(n, name);
        new_constraints.push_back(
            Atom::eq(Term::var(name, Signature::kInt), n));
      }
      return Term::var(name, Signature::kInt);
    }
    if (!t.is_app() || t.args().empty()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    bool changed = false;
    for (const Term& a : t.args()) {
      Term na = self(self, a);
      changed = changed || !(na == a);
      args.push_back(std::move(na));
    }
    return changed ? Term::app(t.head(), std::move(args), t.sort()) : t;
  };

  auto purify_atom = [&](Atom& a) {
    a.lhs = purify_term(purify_term, a.lhs);
    if (a.kind != AtomKind::InImage) a.rhs = purify_term(purify_term, a.rhs);
  };
  for (Atom& a : clause.antecedent) purify_atom(a);
  for (Atom& a : clause.succedent) purify_atom(a);
  for (Atom& a : new_constraints) clause.constraints.push_back(std::move(a));
}

void flatten(Problem& problem, FreshNames& fresh) {
  std::map<Term, std::string, TermLess> cache;
  std::vector<ZClause> definitions;

  // Bottom-up: nested ground non-integer applications become constants whose
  // definition bodies are themselves depth-one.
  auto flatten_term = [&](auto&& self, const Term& t, bool nested) -> Term {
    if (!t.is_app()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    bool changed = false;
    for (const Term& a : t.args()) {
      Term na = self(self, a, true);
      changed = changed || !(na == a);
      args.push_back(std::move(na));
    }
    Term flat = changed ? Term::app(t.head(), std::move(args), t.sort()) : t;
    if (!nested || flat.args().empty() || !flat.is_ground() ||
        flat.sort() == Signature::kInt)
      return flat;
    auto it = cache.find(flat);
    if (it != cache.end()) return Term::constant(it->second, flat.sort());
    std::string name = fresh.fresh_const(problem.sig, "t");
    problem.sig.add_function({name, {}, flat.sort()});
    cache.emplace(flat, name);
    Term c = Term::constant(name, flat.sort());
    ZClause def;
    def.succedent.push_back(Atom::eq(c, flat));
    def.origin = "flatten:" + name;
    definitions.push_back(std::move(def));
    return c;
  };

  for (ZClause& clause : problem.clauses) {
    auto do_atom = [&](Atom& a) {
      a.lhs = flatten_term(flatten_term, a.lhs, false);
      if (a.kind != AtomKind::InImage)
        a.rhs = flatten_term(flatten_term, a.rhs, false);
    };
    for (Atom& a : clause.antecedent) do_atom(a);
    for (Atom& a : clause.succedent) do_atom(a);
  }
  for (ZClause& def : definitions)
    problem.clauses.push_back(std::move(def));
}

VarClassification classify_and_complete(ZClause& clause) {
  orient_constraint_equalities(clause);
  VarClassification cls;
  for (const Atom& a : clause.constraints) {
    if (a.kind == AtomKind::Eq && a.lhs.is_var())
      cls.abstraction.insert(a.lhs.head());
    if (a.kind == AtomKind::Leq) {
      if (a.lhs.is_var()) cls.inequality.insert(a.lhs.head());
      if (a.rhs.is_var()) cls.inequality.insert(a.rhs.head());
    }
  }
  for (const auto& [name, sort] : occurring_vars(clause)) {
    if (sort != Signature::kInt) continue;
    if (cls.abstraction.count(name) || cls.inequality.count(name)) continue;
    Term v = Term::var(name, Signature::kInt);
    clause.constraints.push_back(Atom::leq(v, v));
    cls.inequality.insert(name);
    cls.completed.push_back(name);
  }
  return cls;
}

bool is_grounding_abstraction_atom(const Atom& a) {
  return a.kind == AtomKind::Eq && a.lhs.is_var() && a.rhs.valid() &&
         a.rhs.is_ground();
}

PreconstrainedCheck is_preconstrained(const ZClause& clause,
                                      const VarClassification& cls) {
  auto vars_in_abstraction = [&](const Term& t) {
    std::map<std::string, SortId> vs;
    collect_vars_of_term(t, vs);
    return std::all_of(vs.begin(), vs.end(), [&](const auto& kv) {
      return cls.abstraction.count(kv.first) != 0;
    });
  };
  for (const Atom& a : clause.constraints) {
    if (is_grounding_abstraction_atom(a)) continue;
    bool all_abs = vars_in_abstraction(a.lhs) &&
                   (a.kind == AtomKind::InImage || vars_in_abstraction(a.rhs));
    if (all_abs) continue;
    if (a.kind == AtomKind::Leq) {
      bool ok = false;
      if (a.lhs.is_var())
        ok = a.rhs.is_var() || vars_in_abstraction(a.rhs);
      if (!ok && a.rhs.is_var())
        ok = a.lhs.is_var() || vars_in_abstraction(a.lhs);
      if (ok) continue;
    }
    return {false, a};
  }
  return {true, std::nullopt};
}

std::map<std::string, std::vector<Term>> grounding_targets(const ZClause& c) {
  std::map<std::string, std::vector<Term>> out;
  for (const Atom& a : c.constraints)
    if (is_grounding_abstraction_atom(a))
      out[a.lhs.head()].push_back(normalize_numerals(a.rhs));
  return out;
}

VarClassification classify(const ZClause& clause) {
  VarClassification cls;
  for (const Atom& a : clause.constraints) {
    if (a.kind == AtomKind::Eq) {
      if (a.lhs.is_var()) cls.abstraction.insert(a.lhs.head());
      else if (a.rhs.is_var()) cls.abstraction.insert(a.rhs.head());
    }
    if (a.kind == AtomKind::Leq) {
      if (a.lhs.is_var()) cls.inequality.insert(a.lhs.head());
      if (a.rhs.is_var()) cls.inequality.insert(a.rhs.head());
    }
  }
  return cls;
}

namespace {

/// All ways of making `t` ground when every variable occurrence may pick any
/// of that variable's grounding targets independently. Appends to `out`
/// (unnormalized), up to `cap` terms; returns false when a variable has no
/// targets (its name goes to `missing`) or the cap is hit.
bool occurrence_completions(const Term& t,
                            const std::map<std::string, std::vector<Term>>&
                                targets,
                            std::size_t cap, std::vector<Term>& out,
                            std::string* missing) {
  if (t.is_ground()) {
    out.push_back(t);
    return true;
  }
  if (t.is_var()) {
    auto it = targets.find(t.head());
    if (it == targets.end() || it->second.empty()) {
      if (missing) *missing = t.head();
      return false;
    }
    for (const Term& s : it->second) {
      if (out.size() >= cap) return false;
      out.push_back(s);
    }
    return true;
  }
  std::vector<std::vector<Term>> arg_options;
  for (const Term& a : t.args()) {
    arg_options.emplace_back();
    if (!occurrence_completions(a, targets, cap, arg_options.back(), missing))
      return false;
  }
  std::vector<std::size_t> idx(arg_options.size(), 0);
  bool done = false;
  while (!done) {
    if (out.size() >= cap) return false;
    std::vector<Term> args;
    for (std::size_t i = 0; i < idx.size(); ++i)
      args.push_back(arg_options[i][idx[i]]);
    out.push_back(Term::app(t.head(), std::move(args), t.sort()));
    done = true;
    for (std::size_t pos = idx.size(); pos-- > 0;) {
      if (++idx[pos] < arg_options[pos].size()) {
        done = false;
        break;
      }
      idx[pos] = 0;
    }
  }
  return true;
}

}  // namespace

SpsubResult spsub_check(const ZClause& clause, const std::vector<Term>& base) {
  SpsubResult res;
  std::set<Term, TermLess> bset;
  for (const Term& b : base) bset.insert(normalize_numerals(b));

  ZClause copy = clause;
  VarClassification cls = classify_and_complete(copy);
  auto targets = grounding_targets(copy);

  for (const Atom& a : copy.constraints) {
    if (a.kind != AtomKind::Leq) continue;
    if (!a.lhs.is_var() || !cls.inequality.count(a.lhs.head())) continue;
    const Term& bound = a.rhs;
    if (bound.is_var()) {
      res.witnesses.push_back({a, Term(), "variable bound"});
      continue;
    }
    if (bound.is_ground()) {
      Term n = normalize_numerals(bound);
      if (!bset.count(n)) {
        res.contained = false;
        res.offender = a;
        res.detail = "ground bound " + n.str() + " not in base set";
        return res;
      }
      res.witnesses.push_back({a, n, "ground bound"});
      continue;
    }
    // Compound bound: each variable occurrence may independently pick any of
    // that variable's grounding targets; the atom is covered as soon as one
    // completed term lands in the base set.
    constexpr std::size_t kCompletionCap = 65536;
    std::vector<Term> completions;
    std::string missing;
    if (!occurrence_completions(bound, targets, kCompletionCap, completions,
                                &missing)) {
      res.contained = false;
      res.offender = a;
      res.detail = missing.empty()
                       ? "completion set of " + bound.str() + " is too large"
                       : "variable " + missing +
                             " in bound has no grounding abstraction atom";
      return res;
    }
    bool found = false;
    for (const Term& cand : completions) {
      Term g = normalize_numerals(cand);
      if (bset.count(g)) {
        res.witnesses.push_back({a, g, "completed bound"});
        found = true;
        break;
      }
    }
    if (!found) {
      res.contained = false;
      res.offender = a;
      res.detail = "no completion of " + bound.str() + " is in the base set";
      return res;
    }
  }
  return res;
}

namespace {

void walk_subterms(const Term& t, const std::function<void(const Term&)>& fn);

}  // namespace

ValidationReport validate_zproblem(const Problem& problem) {
  ValidationReport report;
  for (std::size_t ci = 0; ci < problem.clauses.size(); ++ci) {
    const ZClause& c = problem.clauses[ci];
    std::string where = "clause " + std::to_string(ci);
    for (const Atom& a : c.constraints)
      if (!is_arith_atom(a))
        report.add("nonarith-constraint",
                   where + ": constraint atom is not arithmetic: " + a.str());
    for (const Atom& a : c.antecedent)
      if (is_arith_atom(a))
        report.add("misplaced-arith",
                   where + ": antecedent holds arithmetic atom: " + a.str());
    for (const Atom& a : c.succedent)
      if (is_arith_atom(a))
        report.add("misplaced-arith",
                   where + ": succedent holds arithmetic atom: " + a.str());
    // Integer-variable closure: every integer variable of the clause body
    // must occur in the constraint part.
    std::map<std::string, SortId> in_constraints;
    for (const Atom& a : c.constraints) collect_vars_of_atom(a, in_constraints);
    std::map<std::string, SortId> in_body;
    for (const Atom& a : c.antecedent) collect_vars_of_atom(a, in_body);
    for (const Atom& a : c.succedent) collect_vars_of_atom(a, in_body);
    for (const auto& [name, sort] : in_body)
      if (sort == Signature::kInt && !in_constraints.count(name))
        report.add("not-z-closed", where + ": integer variable " + name +
                                       " does not occur in the constraints");
  }
  return report;
}

ValidationReport validate_az_problem(const Problem& problem) {
  ValidationReport report = validate_zproblem(problem);
  const Signature& sig = problem.sig;
  const FunDecl* sel = sig.function("select");
  const FunDecl* sto = sig.function("store");
  if (problem.theory == TheoryTag::ArraysInt && (!sel || !sto)) {
    report.add("array-ops-missing",
               "theory arrays-int requires select and store declarations");
  }
  if (sel && sto) {
    bool ok = sel->args.size() == 2 && sto->args.size() == 3 &&
              sel->args[1] == Signature::kInt &&
              sto->args[1] == Signature::kInt &&
              sto->args[0] == sel->args[0] && sto->range == sel->args[0] &&
              sto->args[2] == sel->range &&
              sel->args[0] != Signature::kInt &&
              sel->range != Signature::kInt;
    if (!ok)
      report.add("array-profile",
                 "select/store profiles are inconsistent: need "
                 "select(A,Int)->E and store(A,Int,E)->A with A,E distinct "
                 "from Int");
  }

  for (std::size_t ci = 0; ci < problem.clauses.size(); ++ci) {
    const ZClause& c = problem.clauses[ci];
    std::string where = "clause " + std::to_string(ci);
    std::map<std::string, std::vector<Term>> targets = grounding_targets(c);
    for (const Atom& a : c.constraints) {
      if (a.kind == AtomKind::Eq) {
        bool abstraction = a.lhs.is_var() || a.rhs.is_var();
        if (!abstraction)
          report.add("constraint-eq-shape",
                     where +
                         ": constraint equality has no variable side: " +
                         a.str());
      } else if (a.kind == AtomKind::Leq) {
        auto side_ok = [](const Term& t) {
          return t.is_var() || t.is_ground();
        };
        if (!side_ok(a.lhs) || !side_ok(a.rhs))
          report.add("constraint-ineq-shape",
                     where +
                         ": inequality side is neither a variable nor "
                         "ground: " +
                         a.str());
      }
    }
    auto check_term = [&](const Term& root) {
      walk_subterms(root, [&](const Term& t) {
        if (!t.is_app()) return;
        if (t.head() == "store" && t.args().size() == 3) {
          const Term& idx = t.args()[1];
          if (idx.is_var()) {
            if (!targets.count(idx.head()))
              report.add("store-index-ungrounded",
                         where + ": store index variable " + idx.head() +
                             " has no grounding abstraction atom");
          } else if (!idx.is_ground()) {
            report.add("store-index-shape",
                       where + ": store index is a non-ground compound: " +
                           idx.str());
          }
        }
      });
    };
    for (const Atom& a : c.antecedent) {
      if (a.kind == AtomKind::InImage)
        report.add("image-atom",
                   where + ": image atom in an array problem: " + a.str());
      check_term(a.lhs);
      if (a.kind != AtomKind::InImage) check_term(a.rhs);
    }
    for (const Atom& a : c.succedent) {
      if (a.kind == AtomKind::InImage)
        report.add("image-atom",
                   where + ": image atom in an array problem: " + a.str());
      check_term(a.lhs);
      if (a.kind != AtomKind::InImage) check_term(a.rhs);
    }
  }
  return report;
}

namespace {

void walk_subterms(const Term& t, const std::function<void(const Term&)>& fn) {
  fn(t);
  if (t.is_app())
    for (const Term& a : t.args()) walk_subterms(a, fn);
}

}  // namespace

ZClause add_constraints(const std::vector<Atom>& extra, const ZClause& clause) {
  ZClause out = clause;
  out.constraints.clear();
  out.constraints.reserve(extra.size() + clause.constraints.size());
  for (const Atom& a : extra) out.constraints.push_back(normalize_numerals(a));
  for (const Atom& a : clause.constraints) out.constraints.push_back(a);
  return out;
}

ZClause inline_grounding_atoms(const ZClause& clause) {
  Substitution s;
  for (const Atom& a : clause.constraints)
    if (is_grounding_abstraction_atom(a) && !s.find(a.lhs.head()))
      s.set(a.lhs.head(), normalize_numerals(a.rhs));
  if (s.empty()) return clause;

  ZClause out;
  out.origin = clause.origin;
  for (const auto& [name, sort] : clause.vars)
    if (!s.find(name)) out.vars.emplace(name, sort);
  for (const Atom& a : clause.constraints) {
    Atom na = normalize_numerals(apply_substitution(a, s));
    if (na.kind == AtomKind::Eq && na.lhs == na.rhs) continue;
    out.constraints.push_back(std::move(na));
  }
  for (const Atom& a : clause.antecedent)
    out.antecedent.push_back(normalize_numerals(apply_substitution(a, s)));
  for (const Atom& a : clause.succedent)
    out.succedent.push_back(normalize_numerals(apply_substitution(a, s)));
  return out;
}

}  // namespace zground
