#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zground/ground.hpp"
#include "zground/zclause.hpp"

namespace zground {

enum class BoundedVerdict { Sat, UnsatWithinBound, Unknown };
std::string verdict_name(BoundedVerdict v);

/// A finite model found by the bounded search.
///
/// Integer constants map to values in [-radius, radius]. Non-integer sorts
/// carry finite carriers of named elements (canonical ground-term names).
/// Function tables are partial: they cover every application the clause
/// instances needed (select tables are totalized over the box for array
/// problems). Integer table arguments and results appear as decimal strings.
struct BoundedModel {
  long long radius = 0;
  std::map<std::string, long long> integer_constants;
  std::map<std::string, std::vector<std::string>> carriers;
  std::map<std::string, std::map<std::vector<std::string>, std::string>>
      tables;
};

struct OracleOptions {
  long long radius = 4;            ///< box half-width for constants and variables
  long long budget = 10'000'000;   ///< search-step allowance before Unknown
  /// Overrides read-over-write reasoning (default: on for arrays problems).
  std::optional<bool> arrays_semantics;
};

struct OracleResult {
  BoundedVerdict verdict = BoundedVerdict::Unknown;
  std::optional<BoundedModel> model;  ///< present for Sat
  long long evaluations = 0;
  std::string note;  ///< reason for Unknown; diagnostics otherwise
};

/// Exhaustive bounded search: every integer constant and every quantified
/// integer variable ranges over [-radius, radius] (term values evaluate
/// exactly and may leave the box); non-integer variables range over the
/// carrier of ground terms occurring in the problem (a fresh witness element
/// is injected for otherwise-empty carriers). Search order: integer
/// constants first (depth-first with interval propagation from unit ground
/// constraint clauses), then congruence reasoning over the clause instances.
///
/// Sat verdicts carry a model that has been re-checked by the independent
/// evaluator; UnsatWithinBound means no model exists within the box — not a
/// proof of unsatisfiability; Unknown reports exhausted budget or an
/// unsupported construct (e.g. non-constant integer-valued functions).
OracleResult bounded_decide(const Problem& problem,
                            const OracleOptions& opt = {});
OracleResult bounded_decide(const GroundProblem& g,
                            const OracleOptions& opt = {});

/// Independent model check: evaluates every clause instance over the model's
/// tables (no congruence engine involved) and, for array problems, verifies
/// read-over-write consistency of the select/store tables across the box.
bool check_model(const Problem& problem, const BoundedModel& model,
                 bool arrays_semantics, std::string* error);

/// Parameters for the random array+integer problem generator.
struct RandomAzParams {
  int segments = 2;       ///< bounded read clauses  l <= x <= u -> select(a,x)=e
  int relations = 2;      ///< unit clauses relating the bound constants
  int writes = 1;         ///< store equations through a written array constant
  int queries = 1;        ///< ground select facts / goals
  int elem_count = 2;     ///< element constants to draw from
  int numeral_range = 2;  ///< magnitude of numerals in relation offsets
  unsigned unit_equalities = 1;  ///< ground unit integer equalities
};

/// Deterministic random problem in the array+integer input class (already
/// normalized and purified, ready for the pipeline or the bounded search).
Problem generate_random_az(unsigned seed, const RandomAzParams& params = {});

}  // namespace zground
