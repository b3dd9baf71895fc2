#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zground/bound.hpp"
#include "zground/ground.hpp"
#include "zground/instantiate.hpp"
#include "zground/schemes.hpp"

namespace zground {

struct PipelineOptions {
  bool minimize_bound = false;   ///< merge bound terms through unit equalities
  unsigned jobs = 1;             ///< instantiation worker threads
  bool flatten = false;          ///< pre-extract nested ground applications
  bool add_injectivity = false;  ///< st2: add function-congruence clauses
  bool baseline = false;         ///< also compute the index-set baseline counts
  std::size_t stratified_cap = 2'000'000;  ///< enumeration safety limit
};

struct StageTiming {
  std::string name;
  double ms = 0;
};

struct PipelineReport {
  std::vector<StageTiming> stages;
  std::vector<std::string> warnings;
  std::size_t input_clauses = 0;
  std::vector<std::string> bound_base;  ///< B, rendered
  std::string escape;
  std::size_t raw_instances = 0;
  std::size_t kept_instances = 0;
  std::size_t stage2_clauses = 0;
  std::size_t ground_clauses = 0;
  std::vector<std::string> baseline_index;    ///< I, rendered (baseline only)
  std::optional<InstanceStats> counts;        ///< baseline only
  std::string solver_verdict;                 ///< filled by the caller

  /// Line-oriented key=value rendering (order fixed; timings last).
  std::string text() const;
  /// The same content as a JSON object.
  std::string json() const;
};

struct PipelineResult {
  GroundProblem ground;
  PipelineReport report;
  InstantiationTrace trace;
};

/// The full grounding pipeline over an already-parsed problem:
/// classify -> validate -> bound -> integer instantiation -> theory stage 2
/// (arrays: ground read-over-write axioms; stratified: enumerate; st2:
/// image-atom elimination then enumerate; generic: none) -> ground problem.
///
/// Validation failures throw std::invalid_argument with the diagnostics,
/// except under the generic tag where they are demoted to report warnings.
PipelineResult run_pipeline(Problem problem, const PipelineOptions& opt = {});

struct SolveOutcome {
  std::string verdict;  ///< "sat", "unsat" or "unknown"
  std::string detail;   ///< set when unknown: timeout / malformed output / ...
};

/// Runs `command` through /bin/sh with the problem's SMT-LIB2 text on stdin
/// and extracts the first sat/unsat/unknown line from its stdout.
/// timeout_ms == 0 means no deadline; on expiry the process group is killed
/// and the verdict is unknown. Output with no verdict line is reported as
/// unknown with a "malformed" detail.
SolveOutcome solve_external(const GroundProblem& g, const std::string& command,
                            int timeout_ms = 0);

}  // namespace zground
