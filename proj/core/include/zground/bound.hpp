#pragma once

#include "zground/zclause.hpp"

namespace zground {

/// Which collection rules compute_bound applies.
enum class BoundMode { Arrays, Generic };

/// The finite ground base set for integer instantiation, plus the escape
/// constant adjoined to it.
struct BoundSet {
  std::vector<Term> base;  ///< normalized, deduplicated, canonical order
  Term escape;             ///< distinguished fresh integer constant
  /// Which collection rules produced each base term.
  std::map<Term, std::string, TermLess> provenance;

  /// base followed by the escape constant.
  std::vector<Term> extended() const;
  /// Normalized membership in base (the escape constant is not a member).
  bool contains(const Term& t) const;
};

/// Computes the instantiation base.
///
/// Arrays mode, per clause:
///  - upper bounds: for "x <= t" with x a variable, a ground t joins the
///    base (a variable t contributes nothing; a compound non-ground t is
///    rejected in this mode);
///  - read indices: every select index joins, reading a variable index
///    through the clause's grounding abstraction atoms;
///  - write indices: for antecedent/succedent equality atoms with a
///    store-headed side, the grounded write index t joins along with t-1.
///
/// Generic mode applies only the upper-bound rule, completing compound
/// bounds through grounding abstraction atoms (positions independently);
/// bounds with ungroundable variables contribute nothing.
///
/// The escape constant is freshly named and declared in the problem's
/// signature (hence the mutable reference).
BoundSet compute_bound(Problem& problem, BoundMode mode, FreshNames& fresh);

/// Merges base terms equated by the problem's recorded ground unit integer
/// equalities, keeping each class's canonical (smallest) representative.
BoundSet minimize_bound(const BoundSet& b, const Problem& problem);

}  // namespace zground
