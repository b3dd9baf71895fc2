// Command-line driver for the grounding pipeline: reads a problem, runs the
// integer-variable instantiation and the theory-specific second stage, and
// emits the resulting ground problem (optionally handing it to an external
// solver or to the built-in bounded model search).
//
// Exit codes: 0 done, 1 usage, 2 parse error, 3 validation error;
// with --solver-cmd or --oracle-bound: 10 sat, 20 unsat, 30 unknown.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "zground/oracle.hpp"
#include "zground/parse.hpp"
#include "zground/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kParse = 2;
constexpr int kValidation = 3;
constexpr int kSat = 10;
constexpr int kUnsat = 20;
constexpr int kUnknown = 30;

int verdict_exit(const std::string& v) {
  if (v == "sat") return kSat;
  if (v == "unsat") return kUnsat;
  return kUnknown;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ground: eliminate variables from clause sets over integers plus a "
      "second theory, producing an equisatisfiable ground problem"};
  app.get_formatter()->column_width(30);

  std::string in_path;
  std::string theory;
  std::string emit = "smtlib";
  std::string out_path;
  std::string baseline;
  std::string solver_cmd;
  bool stats = false;
  bool minimize = false;
  bool add_injectivity = false;
  int timeout_ms = 0;
  std::optional<int> oracle_bound;

  app.add_option("--in", in_path, "input problem file")->required();
  app.add_option("--theory", theory,
                 "theory tag: arrays-int, stratified, st2 or generic "
                 "(overrides the file's own tag)")
      ->check(CLI::IsMember({"arrays-int", "stratified", "st2", "generic"}));
  app.add_option("--emit", emit, "output format (default smtlib)")
      ->check(CLI::IsMember({"smtlib", "native"}));
  app.add_option("--out", out_path, "write the output here instead of stdout");
  app.add_option("--baseline", baseline,
                 "also count instances for a baseline method (only: bradley)")
      ->check(CLI::IsMember({"bradley"}));
  app.add_flag("--stats", stats, "print the pipeline report to stderr");
  app.add_flag("--minimize-bound", minimize,
               "merge bound terms equal under unit integer equalities");
  app.add_flag("--add-injectivity", add_injectivity,
               "st2 only: add the function-congruence side-condition clauses");
  app.add_option("--solver-cmd", solver_cmd,
                 "shell command fed the SMT-LIB2 text on stdin; its verdict "
                 "sets the exit code (10 sat / 20 unsat / 30 unknown)");
  app.add_option("--timeout", timeout_ms, "solver timeout in milliseconds");
  app.add_option("--oracle-bound", oracle_bound,
                 "run the built-in bounded model search on the output with "
                 "this radius (10 sat / 30 otherwise; a bounded search "
                 "cannot prove unsatisfiability)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  std::ifstream in(in_path);
  if (!in) {
    std::fprintf(stderr, "ground: cannot read '%s'\n", in_path.c_str());
    return kParse;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  zground::Problem problem;
  try {
    problem = zground::parse_problem(buf.str());
  } catch (const zground::ParseError& e) {
    std::fprintf(stderr, "ground: %s: %s\n", in_path.c_str(), e.what());
    return kParse;
  }
  if (!theory.empty()) {
    auto tag = zground::theory_tag_from_name(theory);
    problem.theory = *tag;  // membership already checked by CLI11
  }

  zground::PipelineOptions opt;
  opt.minimize_bound = minimize;
  opt.baseline = baseline == "bradley";
  opt.add_injectivity = add_injectivity;

  zground::PipelineResult result;
  try {
    result = zground::run_pipeline(problem, opt);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "ground: validation failed: %s\n", e.what());
    return kValidation;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "ground: %s\n", e.what());
    return kValidation;
  }

  const std::string text = emit == "native"
                               ? zground::print_problem(zground::Problem{
                                     result.ground.sig,
                                     problem.theory,
                                     result.ground.clauses,
                                     {}})
                               : zground::emit_smtlib(result.ground);
  const bool solving = !solver_cmd.empty() || oracle_bound.has_value();
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::fprintf(stderr, "ground: cannot write '%s'\n", out_path.c_str());
      return kUsage;
    }
    out << text;
  } else if (!solving) {
    std::cout << text;
  }

  int exit_code = kOk;
  if (!solver_cmd.empty()) {
    auto outcome = zground::solve_external(result.ground, solver_cmd,
                                           timeout_ms);
    result.report.solver_verdict = outcome.verdict;
    if (!outcome.detail.empty())
      std::fprintf(stderr, "ground: solver: %s\n", outcome.detail.c_str());
    std::printf("%s\n", outcome.verdict.c_str());
    exit_code = verdict_exit(outcome.verdict);
  }
  if (oracle_bound) {
    zground::OracleOptions oo;
    oo.radius = *oracle_bound;
    auto r = zground::bounded_decide(result.ground, oo);
    // A bounded search can witness satisfiability but never refute: the
    // absence of a model inside the box proves nothing about larger ones.
    if (r.verdict == zground::BoundedVerdict::Sat)
      std::printf("sat\n");
    else if (r.verdict == zground::BoundedVerdict::UnsatWithinBound)
      std::printf("unknown (no model within radius %d)\n", *oracle_bound);
    else
      std::printf("unknown\n");
    if (!r.note.empty())
      std::fprintf(stderr, "ground: oracle: %s\n", r.note.c_str());
    if (solver_cmd.empty())
      exit_code = r.verdict == zground::BoundedVerdict::Sat ? kSat : kUnknown;
  }
  if (stats) std::fputs(result.report.text().c_str(), stderr);
  return exit_code;
}
