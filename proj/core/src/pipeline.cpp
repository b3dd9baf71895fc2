#include "zground/pipeline.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zground {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct StageTimer {
  PipelineReport& report;
  std::string name;
  Clock::time_point t0 = Clock::now();
  StageTimer(PipelineReport& r, std::string n) : report(r), name(std::move(n)) {}
  ~StageTimer() { report.stages.push_back({name, ms_since(t0)}); }
};

void fail_or_warn(bool generic, PipelineReport& report,
                  const std::string& message) {
  if (!generic) throw std::invalid_argument(message);
  report.warnings.push_back(message);
}

}  // namespace

PipelineResult run_pipeline(Problem problem, const PipelineOptions& opt) {
  PipelineResult result;
  PipelineReport& report = result.report;
  const bool generic = problem.theory == TheoryTag::Generic;
  const bool arrays = problem.theory == TheoryTag::ArraysInt;
  FreshNames fresh;

  if (opt.flatten) {
    StageTimer t(report, "flatten");
    flatten(problem, fresh);
  }
  if (opt.add_injectivity && problem.theory == TheoryTag::St2) {
    StageTimer t(report, "injectivity");
    auto axioms = st2_injectivity_axioms(problem, fresh);
    for (ZClause& c : axioms) problem.clauses.push_back(std::move(c));
  }
  report.input_clauses = problem.clauses.size();

  {
    StageTimer t(report, "classify");
    for (ZClause& c : problem.clauses) classify_and_complete(c);
  }

  {
    StageTimer t(report, "validate");
    ValidationReport sig_rep = validate_signature(problem.sig);
    ValidationReport rep = arrays ? validate_az_problem(problem)
                                  : validate_zproblem(problem);
    for (const Diagnostic& d : sig_rep.issues)
      fail_or_warn(generic, report, "signature: " + d.code + ": " + d.message);
    for (const Diagnostic& d : rep.issues)
      fail_or_warn(generic, report, d.code + ": " + d.message);
    if (problem.theory == TheoryTag::Stratified ||
        problem.theory == TheoryTag::St2) {
      auto strat = stratification_levels(problem.sig);
      if (!strat.ok) {
        std::string cyc;
        for (SortId s : strat.cycle) {
          if (!cyc.empty()) cyc += " -> ";
          cyc += problem.sig.sort_name(s);
        }
        fail_or_warn(generic, report,
                     "signature is not stratified (sort cycle: " + cyc + ")");
      }
    }
  }

  BoundSet bound;
  {
    StageTimer t(report, "bound");
    bound = compute_bound(problem,
                          arrays ? BoundMode::Arrays : BoundMode::Generic,
                          fresh);
    if (opt.minimize_bound) bound = minimize_bound(bound, problem);
    for (const Term& b : bound.base) report.bound_base.push_back(b.str());
    report.escape = bound.escape.str();
  }

  {
    StageTimer t(report, "precheck");
    bool warned_scope = false;
    for (const ZClause& c : problem.clauses) {
      auto pre = is_preconstrained(c, classify(c));
      if (!pre.ok)
        fail_or_warn(generic, report,
                     "clause " + c.origin + " is not preconstrained (atom " +
                         (pre.offender ? pre.offender->str() : "?") + ")");
      auto sp = spsub_check(c, bound.base);
      if (!sp.contained)
        fail_or_warn(generic, report,
                     "clause " + c.origin +
                         " has an upper bound outside the base set: " +
                         sp.detail);
      if (!arrays && !warned_scope && pre.ok && sp.contained) {
        report.warnings.push_back(
            "instantiation completeness checked on input clauses only; no "
            "theory-level guarantee for derived clauses under tag '" +
            theory_tag_name(problem.theory) + "'");
        warned_scope = true;
      }
    }
  }

  if (opt.baseline) {
    StageTimer t(report, "baseline");
    std::vector<Term> index = bradley_index_set(problem);
    for (const Term& term : index)
      report.baseline_index.push_back(term.str());
    report.counts = count_instances(problem, bound, index);
  }

  InstantiationResult inst;
  {
    StageTimer t(report, "instantiate");
    inst = instantiate_and_simplify(problem, bound, opt.jobs);
    for (const std::string& w : inst.warnings) report.warnings.push_back(w);
    report.raw_instances = inst.trace.raw_instances;
    report.kept_instances = inst.trace.kept_instances;
  }
  result.trace = std::move(inst.trace);

  Problem staged = std::move(inst.problem);
  {
    StageTimer t(report, "stage2");
    switch (problem.theory) {
      case TheoryTag::ArraysInt: {
        auto axioms = ground_array_axioms(staged, bound);
        report.stage2_clauses = axioms.size();
        for (ZClause& c : axioms) staged.clauses.push_back(std::move(c));
        break;
      }
      case TheoryTag::Stratified:
      case TheoryTag::St2: {
        for (ZClause& c : staged.clauses) c = inline_grounding_atoms(c);
        if (problem.theory == TheoryTag::St2)
          staged = transform_st2(staged, fresh);
        auto grounded = ground_stratified(staged, fresh, opt.stratified_cap);
        report.stage2_clauses = grounded.size();
        staged.clauses = std::move(grounded);
        break;
      }
      case TheoryTag::Generic:
        break;
    }
  }

  {
    StageTimer t(report, "ground");
    result.ground = build_ground_problem(staged, bound.escape);
    report.ground_clauses = result.ground.clauses.size();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (const std::string& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

std::string PipelineReport::text() const {
  std::ostringstream out;
  out << "input_clauses=" << input_clauses << '\n';
  out << "bound.base.size=" << bound_base.size() << '\n';
  out << "bound.base=" << join(bound_base, ";") << '\n';
  out << "bound.escape=" << escape << '\n';
  out << "instances.raw=" << raw_instances << '\n';
  out << "instances.kept=" << kept_instances << '\n';
  out << "stage2.clauses=" << stage2_clauses << '\n';
  out << "ground.clauses=" << ground_clauses << '\n';
  if (counts) {
    out << "baseline.index.size=" << baseline_index.size() << '\n';
    out << "baseline.index=" << join(baseline_index, ";") << '\n';
    out << "count.ours=" << counts->ours_total.str() << '\n';
    out << "count.baseline=" << counts->baseline_total.str() << '\n';
  }
  if (!solver_verdict.empty()) out << "solver.verdict=" << solver_verdict << '\n';
  for (const std::string& w : warnings) out << "warning=" << w << '\n';
  for (const StageTiming& s : stages)
    out << "stage." << s.name << ".ms=" << s.ms << '\n';
  return out.str();
}

std::string PipelineReport::json() const {
  nlohmann::json j;
  j["input_clauses"] = input_clauses;
  j["bound"]["base"] = bound_base;
  j["bound"]["escape"] = escape;
  j["instances"]["raw"] = raw_instances;
  j["instances"]["kept"] = kept_instances;
  j["stage2_clauses"] = stage2_clauses;
  j["ground_clauses"] = ground_clauses;
  if (counts) {
    j["baseline"]["index"] = baseline_index;
    j["baseline"]["ours_total"] = counts->ours_total.str();
    j["baseline"]["baseline_total"] = counts->baseline_total.str();
  }
  if (!solver_verdict.empty()) j["solver_verdict"] = solver_verdict;
  j["warnings"] = warnings;
  for (const StageTiming& s : stages)
    j["stages"].push_back({{"name", s.name}, {"ms", s.ms}});
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// External solver
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> scan_verdict(const std::string& output) {
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string word = line.substr(b, e - b + 1);
    if (word == "sat" || word == "unsat" || word == "unknown") return word;
  }
  return std::nullopt;
}

}  // namespace

SolveOutcome solve_external(const GroundProblem& g, const std::string& command,
                            int timeout_ms) {
  const std::string input = emit_smtlib(g);

  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw std::runtime_error("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(to_child[0], 0);
    dup2(from_child[1], 1);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
    _exit(127);
  }
  setpgid(pid, pid);  // best effort; the child does the same
  close(to_child[0]);
  close(from_child[1]);
  int in_fd = to_child[1];
  int out_fd = from_child[0];
  fcntl(in_fd, F_SETFL, O_NONBLOCK);
  fcntl(out_fd, F_SETFL, O_NONBLOCK);
  signal(SIGPIPE, SIG_IGN);

  const auto deadline =
      Clock::now() + std::chrono::milliseconds(timeout_ms > 0 ? timeout_ms : 0);
  std::size_t written = 0;
  bool in_open = true;
  bool timed_out = false;
  std::string output;
  char buf[4096];

  for (;;) {
    struct pollfd fds[2];
    int n = 0;
    fds[n++] = {out_fd, POLLIN, 0};
    if (in_open) fds[n++] = {in_fd, POLLOUT, 0};
    int wait = -1;
    if (timeout_ms > 0) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                      deadline - Clock::now())
                      .count();
      if (left <= 0) {
        timed_out = true;
        break;
      }
      wait = static_cast<int>(left);
    }
    int rc = poll(fds, static_cast<nfds_t>(n), wait);
    if (rc == 0) {
      timed_out = true;
      break;
    }
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t got = read(out_fd, buf, sizeof buf);
      if (got > 0) {
        output.append(buf, static_cast<std::size_t>(got));
      } else if (got == 0) {
        break;  // child closed stdout: it is done talking
      } else if (errno != EAGAIN && errno != EINTR) {
        break;
      }
    }
    if (in_open && n > 1 && (fds[1].revents & (POLLOUT | POLLHUP | POLLERR))) {
      ssize_t put = write(in_fd, input.data() + written,
                          std::min<std::size_t>(input.size() - written, 65536));
      if (put > 0) written += static_cast<std::size_t>(put);
      if ((put < 0 && errno != EAGAIN && errno != EINTR) ||
          written == input.size()) {
        close(in_fd);
        in_open = false;
      }
    }
  }
  if (in_open) close(in_fd);
  close(out_fd);

  if (timed_out) kill(-pid, SIGKILL);
  int status = 0;
  if (!timed_out && timeout_ms > 0) {
    // The child closed stdout but might linger; grant a short grace period.
    auto grace = Clock::now() + std::chrono::milliseconds(timeout_ms);
    while (waitpid(pid, &status, WNOHANG) == 0) {
      if (Clock::now() >= grace) {
        kill(-pid, SIGKILL);
        waitpid(pid, &status, 0);
        break;
      }
      usleep(2000);
    }
  } else {
    waitpid(pid, &status, 0);
  }

  if (timed_out) return {"unknown", "timeout"};
  if (auto v = scan_verdict(output)) return {*v, ""};
  std::string head = output.substr(0, 120);
  for (char& c : head)
    if (c == '\n') c = ' ';
  return {"unknown", "malformed solver output: \"" + head + "\""};
}

}  // namespace zground
