#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zground/signature.hpp"
#include "zground/term.hpp"

namespace zground {

/// Which background reasoning the pipeline applies after integer grounding.
enum class TheoryTag { ArraysInt, Stratified, St2, Generic };

std::string theory_tag_name(TheoryTag t);
std::optional<TheoryTag> theory_tag_from_name(const std::string& s);

/// A constrained clause  constraints || antecedent -> succedent, read as:
/// the conjunction of the (arithmetic) constraints implies the ordinary
/// clause "antecedent atoms conjointly imply some succedent atom".
/// Variables are clause-scoped and listed with their sorts in `vars`.
struct ZClause {
  std::map<std::string, SortId> vars;
  std::vector<Atom> constraints;  ///< arithmetic atoms only (after normalization)
  std::vector<Atom> antecedent;
  std::vector<Atom> succedent;
  std::string origin;  ///< provenance note, e.g. "input:3" or "input:3/inst:7"

  bool has_var(const std::string& name) const { return vars.count(name) != 0; }
  bool is_ground() const;
  /// Variables of integer sort declared on the clause.
  std::vector<std::string> integer_vars() const;
  /// Canonical parseable rendering; lists only variables that still occur.
  std::string str() const;
  /// All atoms in part order (constraints, antecedent, succedent).
  std::vector<const Atom*> all_atoms() const;
};

/// A clause set with its signature and theory tag.
struct Problem {
  Signature sig;
  TheoryTag theory = TheoryTag::Generic;
  std::vector<ZClause> clauses;
  /// Ground unit integer equalities seen in the input before clause
  /// splitting; used only by bound minimization.
  std::vector<std::pair<Term, Term>> unit_int_equalities;
};

/// Deterministic fresh-name source. The environment variable
/// Z_GROUNDER_SEED (an unsigned integer) offsets the starting counters so
/// reruns can reproduce or deliberately shift generated names.
class FreshNames {
 public:
  FreshNames();  ///< counters start at the environment seed (default 0)
  explicit FreshNames(unsigned start);

  /// Next variable name "x<N>" avoiding the clause's variables and the
  /// signature's symbols.
  std::string fresh_var(const ZClause& clause, const Signature& sig,
                        const std::string& stem = "x");
  /// Next constant name "<stem><N>" (bare stem first) avoiding the signature.
  std::string fresh_const(const Signature& sig, const std::string& stem);

  static unsigned seed_from_env();

 private:
  unsigned seed_;
  unsigned var_counter_;
  std::map<std::string, unsigned> const_counters_;  // per stem
};

/// One literal of an unnormalized clause body: an atom with a polarity.
struct Literal {
  Atom atom;
  bool negated = false;
};

/// Builds normalized clauses from raw parts:
///  - arithmetic atoms move into the constraint part (an arithmetic atom in
///    the antecedent joins positively; in the succedent it joins negated,
///    '<='-negation rewriting to the reversed strict bound, '='-negation
///    splitting the clause in two);
///  - negated non-arithmetic literals swap sides;
///  - constraint-part literals must be arithmetic (negation allowed);
///  - constraint equalities with exactly one variable side are oriented
///    variable-left;
///  - all terms are numeral-normalized.
/// Ground unit integer equalities among the raw succedents are reported via
/// `unit_int_equality` (set at most once per call) for bound minimization.
std::vector<ZClause> normalize_into_zclauses(
    const std::map<std::string, SortId>& vars,
    const std::vector<Literal>& constraints, const std::vector<Literal>& ante,
    const std::vector<Literal>& succ, const Signature& sig,
    const std::string& origin,
    std::optional<std::pair<Term, Term>>* unit_int_equality = nullptr);

/// Replaces every maximal non-variable integer subterm occurring inside a
/// non-arithmetic atom by a fresh integer variable, adding the defining
/// equality (variable = term) to the constraint part. Equal subterms within
/// one clause share their variable. Requires arithmetic atoms to already sit
/// in the constraint part; throws std::invalid_argument otherwise.
void purify(ZClause& clause, const Signature& sig, FreshNames& fresh);

/// Extracts nested ground non-integer applications into fresh constants with
/// defining unit clauses (constant = term), bottom-up, problem-wide sharing.
/// Top-level equation sides stay in place. Extends the signature.
void flatten(Problem& problem, FreshNames& fresh);

/// How each integer variable of a clause participates in the constraints.
struct VarClassification {
  std::set<std::string> abstraction;  ///< left side of an equality constraint
  std::set<std::string> inequality;   ///< side of an inequality constraint
  std::vector<std::string> completed; ///< got the trivial bound x <= x here
};

/// Orients single-variable constraint equalities variable-left, classifies
/// the clause's integer variables, and appends the trivial self-bound
/// "x <= x" for any integer variable not yet classified (making it an
/// inequality variable). Idempotent.
VarClassification classify_and_complete(ZClause& clause);

/// Classification without mutation: no orientation, no completion. A
/// constraint equality with at least one variable side counts as an
/// abstraction atom for each of its variable sides.
VarClassification classify(const ZClause& clause);

/// Ground targets per variable from the clause's grounding abstraction
/// atoms, in constraint order, normalized.
std::map<std::string, std::vector<Term>> grounding_targets(const ZClause& c);

/// An abstraction constraint "x = t" with ground t.
bool is_grounding_abstraction_atom(const Atom& a);

struct PreconstrainedCheck {
  bool ok = true;
  std::optional<Atom> offender;
};

/// Checks the shape guarantee the instantiation argument relies on: every
/// constraint atom either (a) is a grounding abstraction atom, (b) has all
/// its variables among the clause's abstraction variables, or (c) is an
/// inequality with a variable on one side whose other side is a variable or
/// has all its variables among the abstraction variables.
PreconstrainedCheck is_preconstrained(const ZClause& clause,
                                      const VarClassification& cls);

/// One checked upper-bound atom: which ground completion of the bound side
/// was found in the base set (or why the atom needed none).
struct SpsubWitness {
  Atom atom;
  Term grounded;  ///< invalid() when the check was vacuous
  std::string note;
};

struct SpsubResult {
  bool contained = true;
  std::vector<SpsubWitness> witnesses;
  std::optional<Atom> offender;
  std::string detail;
};

/// Containment of a clause's upper bounds in a ground base set: for every
/// constraint atom "x <= t" with x one of the clause's inequality variables,
/// some ground completion of t — substituting each variable occurrence of t
/// independently through the clause's grounding abstraction atoms — must be
/// in `base`. Variable bounds need no membership; lower bounds "t <= x" are
/// exempt (the escape constant covers them). Terms are compared normalized.
SpsubResult spsub_check(const ZClause& clause, const std::vector<Term>& base);

/// Membership checks for the array+integer input class:
///  - select/store declared with consistent profiles when present;
///  - constraint atoms are abstraction equalities or inequalities whose
///    sides are variables or ground;
///  - every integer variable occurs in the constraint part;
///  - store-index variables have grounding abstraction atoms;
///  - antecedent/succedent hold no arithmetic atoms and no image atoms.
ValidationReport validate_az_problem(const Problem& problem);

/// The subset of the checks above that every theory shares (constraint
/// placement and integer-variable closure).
ValidationReport validate_zproblem(const Problem& problem);

/// Returns the clause with `extra` constraint atoms prepended (normalized).
ZClause add_constraints(const std::vector<Atom>& extra, const ZClause& clause);

/// Substitutes every variable that has a grounding abstraction atom by that
/// atom's term (first such atom in constraint order wins), drops constraints
/// that become reflexive equalities, and normalizes. Variables without
/// grounding atoms remain declared.
ZClause inline_grounding_atoms(const ZClause& clause);

}  // namespace zground
