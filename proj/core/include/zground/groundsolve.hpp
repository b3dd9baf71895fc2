#pragma once

#include <string>

#include "zground/ground.hpp"

namespace zground {

enum class GroundVerdict { Sat, Unsat, Unknown };
std::string ground_verdict_name(GroundVerdict v);

struct GroundSolveOptions {
  long long budget = 50'000'000;  ///< decision/propagation allowance
};

struct GroundSolveResult {
  GroundVerdict verdict = GroundVerdict::Unknown;
  std::string note;        ///< reason for Unknown
  long long decisions = 0;  ///< propositional decisions taken
};

/// Complete decision procedure for ground clause sets over linear integer
/// difference constraints and uninterpreted functions, with read-over-write
/// reasoning when the problem carries array operations (no extensionality:
/// arrays agreeing on every index may still differ).
///
/// The search is propositional over the clause atoms. Integer equalities are
/// compiled into conjunctions of bounds; assigned bounds feed a
/// difference-constraint solver (negative-cycle detection), assigned
/// equality literals feed a congruence engine over symbolic integer leaves.
/// A fully assigned, theory-consistent branch is certified by re-checking
/// against one concrete integer solution; when that certification fails only
/// because two integer terms happened to receive equal values without being
/// forced equal, an order-split lemma over that pair is added and the search
/// restarts, which makes the procedure terminating and complete.
///
/// Unknown is returned only on budget exhaustion or on terms outside the
/// supported fragment (e.g. integer-valued non-constant functions).
GroundSolveResult decide_ground(const GroundProblem& g,
                                const GroundSolveOptions& opt = {});

}  // namespace zground
