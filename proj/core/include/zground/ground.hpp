#pragma once

#include <optional>
#include <string>

#include "zground/zclause.hpp"

namespace zground {

/// A fully ground clause set ready for emission: no variables anywhere, no
/// image atoms, and the escape constant absent from all constraint parts.
struct GroundProblem {
  Signature sig;
  bool has_arrays = false;  ///< emit select/store as native array operations
  std::vector<ZClause> clauses;
};

/// Inlines every grounding abstraction atom, drops reflexive equalities and
/// tautologous clauses, and checks the ground invariants. `escape` (when
/// given) must not survive in any constraint part. Throws
/// std::invalid_argument on residual variables or image atoms.
GroundProblem build_ground_problem(const Problem& problem,
                                   const std::optional<Term>& escape);

/// Renders the problem as SMT-LIB2 text:
///  - logic QF_AUFLIA when array operations are present, QF_UFLIA otherwise;
///  - array-theory problems map their array sort to (Array Int Elem) and use
///    the native select/store symbols;
///  - declarations in name order, one assert per clause in clause order,
///    each an (or ...) of negated constraint/antecedent atoms and positive
///    succedent atoms, then (check-sat).
/// The output is a pure function of the input: byte-identical across runs.
std::string emit_smtlib(const GroundProblem& g);

}  // namespace zground
