#pragma once

#include "zground/bound.hpp"
#include "zground/zclause.hpp"

namespace zground {

/// One materialized substitution of a source clause.
struct InstantiationRecord {
  std::size_t source_index = 0;  ///< clause index in the input problem
  std::string source_origin;
  Substitution substitution;  ///< inequality variable -> base term
  bool kept = true;           ///< false when simplification removed it
  /// Index in the output clause list; meaningful only when kept.
  std::size_t output_index = 0;
  std::string drop_reason;  ///< when !kept
};

struct InstantiationTrace {
  std::vector<InstantiationRecord> records;
  std::size_t input_clauses = 0;
  std::size_t raw_instances = 0;   ///< records produced
  std::size_t kept_instances = 0;  ///< records with kept == true
};

struct InstantiationResult {
  Problem problem;
  InstantiationTrace trace;
  std::vector<std::string> warnings;
};

/// Materializes every substitution of each clause's inequality variables
/// over the extended base set (base order, escape constant last; variables
/// in name order, the last variable cycling fastest), prefixing the defining
/// equalities "x = b" to the constraints. No simplification: each clause
/// yields exactly |extended base|^|inequality variables| instances.
/// Throws std::invalid_argument when a clause has an unclassified integer
/// variable (run classify_and_complete first).
InstantiationResult instantiate_integer_vars(const Problem& problem,
                                             const BoundSet& bound);

/// Instantiation fused with escape simplification: semantically equal to
/// instantiate_integer_vars followed by simplify_escape, but instances whose
/// constraints would acquire an unsatisfiable escape comparison are skipped
/// cheaply and only surviving clauses are constructed. `jobs` > 1 splits the
/// clause list across threads; the output is identical for any job count.
InstantiationResult instantiate_and_simplify(const Problem& problem,
                                             const BoundSet& bound,
                                             unsigned jobs = 1);

/// Result of simplifying one clause.
struct SimplifiedClause {
  bool kept = true;
  ZClause clause;         ///< meaningful only when kept
  std::string drop_reason;
  std::vector<std::string> warnings;
};

/// Escape-constant and trivial-comparison simplification:
///  - a variable equated to the escape constant is replaced by it (a second,
///    escape-free grounding atom contradicts that and deletes the clause);
///  - "escape <= t" (t not the escape) falsifies the constraints: clause
///    deleted; "t <= escape" is true: atom dropped; same for equalities;
///  - reflexive atoms and numeral-vs-numeral comparisons evaluate;
///  - a reflexive succedent equality makes the clause a tautology: deleted;
///    a reflexive antecedent equality is dropped as trivially true;
///  - duplicate constraint atoms collapse (first occurrence stays).
/// The escape constant ending up strictly inside a compound constraint term
/// is reported as a warning and kept (outside the guaranteed fragments).
SimplifiedClause simplify_clause(const ZClause& clause, const Term& escape);

/// Applies simplify_clause to every clause, dropping deleted ones.
Problem simplify_escape(const Problem& problem, const BoundSet& bound);

/// Re-applies each record's substitution to its source clause (B-definition
/// prefix plus, when `simplified`, the simplification pass) and checks the
/// result matches the output problem exactly, clause for clause. Returns
/// false with a message on the first mismatch.
bool replay_trace(const Problem& input, const BoundSet& bound,
                  const InstantiationTrace& trace, const Problem& output,
                  bool simplified, std::string* error);

}  // namespace zground
