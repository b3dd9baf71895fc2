#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zground/bound.hpp"
#include "zground/zclause.hpp"

namespace zground {

/// Ground instances of the read-over-write array axioms.
///
/// For every store(a, x, e) occurring in an antecedent/succedent atom, with
/// the index x grounded (directly or through a grounding abstraction atom
/// x = t), and for the extended base set B' = base + escape, emits per
/// context (a, t, e):
///  - hit:   <x = t || -> select(store(a,x,e), x) = e>
///  - low,   for each s in B':  <x = t, s <= x-1 || -> select(store(a,x,e), s) = select(a, s)>
///  - high,  for each s in B':  <x = t, x+1 <= s || -> select(store(a,x,e), s) = select(a, s)>
/// Escape-constant simplification is applied: the low clause for s = escape
/// disappears (its constraints are unsatisfiable), the high clause keeps the
/// clause and drops the bound atom. Contexts are deduplicated and processed
/// in canonical term order; each surviving clause totals 2|base|+2 per
/// context. Throws std::invalid_argument for a store with an ungroundable
/// index or a non-ground array/element argument.
std::vector<ZClause> ground_array_axioms(const Problem& problem,
                                         const BoundSet& bound);

/// Enumerative grounding for stratified signatures: every remaining variable
/// of every clause is replaced by every ground term of its sort (integer
/// variables range over the declared integer constants). Sorts whose ground
/// term set is empty get a fresh witness constant declared into the
/// problem's signature. Variables are enumerated in name order, the last one
/// cycling fastest; instance origins append "/enum:<k>". Throws
/// std::invalid_argument on a non-stratified signature and std::runtime_error
/// when the instance count exceeds `instance_cap`.
std::vector<ZClause> ground_stratified(Problem& problem, FreshNames& fresh,
                                       std::size_t instance_cap = 2'000'000);

/// Eliminates image atoms:
///  - an antecedent atom "t in-image f" becomes the antecedent equality
///    t = f(x1..xn) with fresh variables;
///  - a succedent atom "x in-image f" with x a variable branches the clause
///    over every g with f's exact profile: antecedent gains x = g(y1..yn),
///    the image atom becomes g(y1..yn) = f(y1..yn);
///  - a succedent atom "g(args) in-image f" (g with f's profile) becomes the
///    equality g(args) = f(args).
/// Branches whose new succedent equality is reflexive (g = f) are tautologies
/// and are dropped. Succedent branching iterates profile-mates in name
/// order; fresh variables are drawn per atom occurrence. Throws
/// std::invalid_argument when an image function is undeclared or
/// integer-ranged, or when the image argument's head does not share f's
/// profile (class side condition).
Problem transform_st2(const Problem& problem, FreshNames& fresh);

/// The function-congruence side condition as clauses, for every pair (f, g)
/// of declared functions with f's profile where f appears in an image atom:
/// f(x1..xn) = g(y1..yn) -> xi = yi, one clause per argument position (built
/// through the standard normalization, so integer argument positions split
/// into bound clauses). Added on request ahead of the integer stage.
std::vector<ZClause> st2_injectivity_axioms(const Problem& problem,
                                            FreshNames& fresh);

/// The comparison baseline's instantiation set: ground bounds (both
/// polarities) of variables that occur as select/store indices, ground
/// select indices (read through grounding abstraction atoms), write indices
/// t with their neighbours t-1 and t+1, and the successor u+1 of each upper
/// bound u whose successor occurs in the problem. Canonically ordered,
/// deduplicated, normalized. Empty when nothing qualifies.
std::vector<Term> bradley_index_set(const Problem& problem);

/// Instance bookkeeping for the comparison between the two methods.
struct InstanceStats {
  std::size_t input_clauses = 0;
  std::size_t bound_size = 0;          ///< |base|
  std::size_t extended_size = 0;       ///< |base| + 1
  std::size_t baseline_index_size = 0; ///< |I|
  Int ours_total = 0;      ///< sum over clauses of |extended|^(inequality vars)
  Int baseline_total = 0;  ///< sum over clauses of |I|^(integer vars)
  std::vector<std::pair<std::string, Int>> per_clause_ours;      // origin, count
  std::vector<std::pair<std::string, Int>> per_clause_baseline;  // origin, count
};

/// Exact instance counts (no materialization): our method instantiates each
/// clause's inequality variables over base+escape; the baseline instantiates
/// every integer variable over its index set. Deterministic.
InstanceStats count_instances(const Problem& problem, const BoundSet& bound,
                              const std::vector<Term>& baseline_index);

/// A stage-2 grounding function under probe: problem in, clause list out.
using SchemeFn = std::function<std::vector<ZClause>(const Problem&)>;

enum class SchemeKind { Stratified, Arrays };

struct AdmissibilityResult {
  bool pass = true;
  std::string detail;  ///< counterexample clause / failed check when !pass
};

/// Property probe for a grounding scheme:
///  - outputs must be ground once grounding abstraction atoms are folded in
///    (flags identity-like schemes);
///  - monotonicity: every clause of gamma(S) reappears in gamma(S + extra)
///    when an extra clause is supplied;
///  - equation transparency: gamma(S + {-> t = s}) equals gamma(S) plus that
///    unit, for ground non-integer t, s that are "disconnected" from S — no
///    non-variable term of S (nor of the array axiom patterns, for the array
///    scheme) matches t or s unless syntactically equal. The disconnection
///    precondition is checked; violations throw std::invalid_argument.
AdmissibilityResult admissibility_probe(const SchemeFn& gamma,
                                        const Problem& sample, const Term& t,
                                        const Term& s,
                                        const ZClause* extra_clause = nullptr,
                                        bool arrays_patterns = false);

/// The shipped schemes wrapped for the probe: Stratified enumerates over the
/// sample's signature; Arrays returns the sample's clauses plus its ground
/// axiom instances (bound computed per call).
AdmissibilityResult admissibility_probe(SchemeKind scheme,
                                        const Problem& sample, const Term& t,
                                        const Term& s,
                                        const ZClause* extra_clause = nullptr);

}  // namespace zground
