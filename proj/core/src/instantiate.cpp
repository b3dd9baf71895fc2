#include "zground/instantiate.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace zground {

namespace {

bool contains_term(const Term& haystack, const Term& needle) {
  if (haystack == needle) return true;
  if (!haystack.is_app()) return false;
  for (const Term& a : haystack.args())
    if (contains_term(a, needle)) return true;
  return false;
}

/// Sorted inequality-variable names; throws on unclassified integer vars.
std::vector<std::string> ineq_vars_checked(const ZClause& c,
                                           std::size_t index) {
  VarClassification cls = classify(c);
  for (const std::string& v : c.integer_vars()) {
    if (!cls.abstraction.count(v) && !cls.inequality.count(v))
      throw std::invalid_argument(
          "clause " + std::to_string(index) + ": integer variable " + v +
          " is unclassified; run classify_and_complete first");
  }
  return {cls.inequality.begin(), cls.inequality.end()};
}

/// The per-clause instantiation state: one odometer over the extended base.
struct ClauseInstantiator {
  const ZClause* clause;
  std::size_t index;
  std::vector<std::string> vars;  // sorted
  std::vector<Term> ext;

  std::size_t count() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) n *= ext.size();
    return n;
  }

  Substitution substitution_at(std::size_t ordinal) const {
    Substitution s;
    std::size_t rem = ordinal;
    // Last variable cycles fastest: decode ordinal in base |ext| with the
    // most significant digit on the first variable.
    for (std::size_t i = vars.size(); i-- > 0;) {
      s.set(vars[i], ext[rem % ext.size()]);
      rem /= ext.size();
    }
    return s;
  }

  ZClause materialize(const Substitution& s, std::size_t ordinal) const {
    std::vector<Atom> defs;
    defs.reserve(vars.size());
    for (const std::string& v : vars)
      defs.push_back(
          Atom::eq(Term::var(v, Signature::kInt), *s.find(v)));
    ZClause out = add_constraints(defs, *clause);
    out.origin = clause->origin + "/inst:" + std::to_string(ordinal);
    return out;
  }
};

/// True when some constraint "x <= t" with sigma(x) = escape and ground
/// t != escape makes the instance trivially deletable; used to skip
/// construction in the fused pass.
bool dies_on_escape_upper_bound(const ZClause& c, const Substitution& s,
                                const Term& escape) {
  for (const Atom& a : c.constraints) {
    if (a.kind != AtomKind::Leq || !a.lhs.is_var()) continue;
    const Term* img = s.find(a.lhs.head());
    if (!img || !(*img == escape)) continue;
    if (a.rhs.is_ground() && !(normalize_numerals(a.rhs) == escape))
      return true;
  }
  return false;
}

struct PerClauseOutput {
  std::vector<InstantiationRecord> records;
  std::vector<ZClause> clauses;  // kept instances, in ordinal order
  std::vector<std::string> warnings;
};

PerClauseOutput instantiate_one_clause(const ClauseInstantiator& ci,
                                       const Term& escape, bool fused) {
  PerClauseOutput out;
  const std::size_t total = ci.count();
  for (std::size_t ordinal = 0; ordinal < total; ++ordinal) {
    Substitution s = ci.substitution_at(ordinal);
    InstantiationRecord rec;
    rec.source_index = ci.index;
    rec.source_origin = ci.clause->origin;
    rec.substitution = s;
    if (fused && dies_on_escape_upper_bound(*ci.clause, s, escape)) {
      rec.kept = false;
      rec.drop_reason = "escape exceeds an upper bound";
      out.records.push_back(std::move(rec));
      continue;
    }
    ZClause inst = ci.materialize(s, ordinal);
    if (!fused) {
      rec.kept = true;
      out.clauses.push_back(std::move(inst));
      out.records.push_back(std::move(rec));
      continue;
    }
    SimplifiedClause simp = simplify_clause(inst, escape);
    for (std::string& w : simp.warnings) out.warnings.push_back(std::move(w));
    if (!simp.kept) {
      rec.kept = false;
      rec.drop_reason = simp.drop_reason;
      out.records.push_back(std::move(rec));
      continue;
    }
    rec.kept = true;
    out.clauses.push_back(std::move(simp.clause));
    out.records.push_back(std::move(rec));
  }
  return out;
}

InstantiationResult run_instantiation(const Problem& problem,
                                      const BoundSet& bound, bool fused,
                                      unsigned jobs) {
  InstantiationResult res;
  res.problem.sig = problem.sig;
  res.problem.theory = problem.theory;
  res.problem.unit_int_equalities = problem.unit_int_equalities;
  res.trace.input_clauses = problem.clauses.size();

  std::vector<ClauseInstantiator> cis;
  cis.reserve(problem.clauses.size());
  for (std::size_t i = 0; i < problem.clauses.size(); ++i)
    cis.push_back({&problem.clauses[i], i,
                   ineq_vars_checked(problem.clauses[i], i),
                   bound.extended()});

  std::vector<PerClauseOutput> outputs(cis.size());
  if (jobs <= 1 || cis.size() <= 1) {
    for (std::size_t i = 0; i < cis.size(); ++i)
      outputs[i] = instantiate_one_clause(cis[i], bound.escape, fused);
  } else {
    // Split the clause list into contiguous chunks; the merge below keeps
    // clause order, so the result is independent of the job count.
    unsigned workers = std::min<unsigned>(jobs, cis.size());
    std::vector<std::future<void>> futs;
    std::size_t chunk = (cis.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(cis.size(), lo + chunk);
      if (lo >= hi) break;
      futs.push_back(std::async(std::launch::async, [&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          outputs[i] = instantiate_one_clause(cis[i], bound.escape, fused);
      }));
    }
    for (auto& f : futs) f.get();
  }

  for (PerClauseOutput& po : outputs) {
    for (InstantiationRecord& rec : po.records)
      res.trace.records.push_back(std::move(rec));
    for (ZClause& c : po.clauses) res.problem.clauses.push_back(std::move(c));
    for (std::string& w : po.warnings) res.warnings.push_back(std::move(w));
  }
  // Assign output indices in record order (clause-major, ordinal-minor).
  std::size_t next_out = 0;
  for (InstantiationRecord& rec : res.trace.records)
    if (rec.kept) rec.output_index = next_out++;
  res.trace.raw_instances = res.trace.records.size();
  res.trace.kept_instances = next_out;
  return res;
}

}  // namespace

InstantiationResult instantiate_integer_vars(const Problem& problem,
                                             const BoundSet& bound) {
  return run_instantiation(problem, bound, /*fused=*/false, /*jobs=*/1);
}

InstantiationResult instantiate_and_simplify(const Problem& problem,
                                             const BoundSet& bound,
                                             unsigned jobs) {
  return run_instantiation(problem, bound, /*fused=*/true, jobs);
}

SimplifiedClause simplify_clause(const ZClause& clause, const Term& escape) {
  SimplifiedClause out;

  // Variables pinned to the escape constant by a grounding atom.
  std::set<std::string> escaped;
  for (const Atom& a : clause.constraints)
    if (is_grounding_abstraction_atom(a) &&
        normalize_numerals(a.rhs) == escape)
      escaped.insert(a.lhs.head());
  for (const std::string& v : escaped) {
    for (const Atom& a : clause.constraints) {
      if (is_grounding_abstraction_atom(a) && a.lhs.head() == v &&
          !(normalize_numerals(a.rhs) == escape)) {
        out.kept = false;
        out.drop_reason =
            "escape assignment conflicts with grounding atom " + a.str();
        return out;
      }
    }
  }
  Substitution sub;
  for (const std::string& v : escaped)
    sub.set(v, escape);

  ZClause c;
  c.origin = clause.origin;
  for (const auto& [name, sort] : clause.vars)
    if (!escaped.count(name)) c.vars.emplace(name, sort);

  std::set<std::string> seen_constraints;
  for (const Atom& raw : clause.constraints) {
    Atom a = normalize_numerals(apply_substitution(raw, sub));
    if (a.kind == AtomKind::Eq) {
      if (a.lhs == a.rhs) continue;  // reflexive: true
      bool l_esc = a.lhs == escape, r_esc = a.rhs == escape;
      if (l_esc || r_esc) {
        // The escape constant differs from every other relevant value.
        out.kept = false;
        out.drop_reason = "escape equality is false: " + a.str();
        return out;
      }
      if (a.lhs.is_num() && a.rhs.is_num()) {
        // Distinct numerals (equal ones were reflexive above).
        out.kept = false;
        out.drop_reason = "numeral equality is false: " + a.str();
        return out;
      }
    } else if (a.kind == AtomKind::Leq) {
      if (a.lhs == a.rhs) continue;  // reflexive: true
      bool l_esc = a.lhs == escape, r_esc = a.rhs == escape;
      if (r_esc) continue;  // anything <= escape: true
      if (l_esc) {
        out.kept = false;
        out.drop_reason = "escape exceeds an upper bound: " + a.str();
        return out;
      }
      if (a.lhs.is_num() && a.rhs.is_num()) {
        if (a.lhs.value() <= a.rhs.value()) continue;  // true
        out.kept = false;
        out.drop_reason = "numeral inequality is false: " + a.str();
        return out;
      }
    }
    if (contains_term(a.lhs, escape) ||
        (a.kind != AtomKind::InImage && contains_term(a.rhs, escape))) {
      bool at_root = a.lhs == escape ||
                     (a.kind != AtomKind::InImage && a.rhs == escape);
      if (!at_root)
        out.warnings.push_back(
            "escape constant nested inside a constraint term, kept: " +
            a.str());
    }
    std::string key = a.str();
    if (seen_constraints.insert(key).second)
      c.constraints.push_back(std::move(a));
  }

  for (const Atom& raw : clause.antecedent) {
    Atom a = normalize_numerals(apply_substitution(raw, sub));
    if (a.kind == AtomKind::Eq && a.lhs == a.rhs) continue;  // trivially true
    c.antecedent.push_back(std::move(a));
  }
  for (const Atom& raw : clause.succedent) {
    Atom a = normalize_numerals(apply_substitution(raw, sub));
    if (a.kind == AtomKind::Eq && a.lhs == a.rhs) {
      out.kept = false;
      out.drop_reason = "tautologous succedent equality: " + a.str();
      return out;
    }
    c.succedent.push_back(std::move(a));
  }

  out.clause = std::move(c);
  return out;
}

Problem simplify_escape(const Problem& problem, const BoundSet& bound) {
  Problem out;
  out.sig = problem.sig;
  out.theory = problem.theory;
  out.unit_int_equalities = problem.unit_int_equalities;
  for (const ZClause& c : problem.clauses) {
    SimplifiedClause s = simplify_clause(c, bound.escape);
    if (s.kept) out.clauses.push_back(std::move(s.clause));
  }
  return out;
}

bool replay_trace(const Problem& input, const BoundSet& bound,
                  const InstantiationTrace& trace, const Problem& output,
                  bool simplified, std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  std::size_t kept_seen = 0;
  for (std::size_t ri = 0; ri < trace.records.size(); ++ri) {
    const InstantiationRecord& rec = trace.records[ri];
    if (rec.source_index >= input.clauses.size())
      return fail("record " + std::to_string(ri) +
                  ": source index out of range");
    const ZClause& src = input.clauses[rec.source_index];
    std::vector<Atom> defs;
    for (const auto& [v, t] : rec.substitution.entries())
      defs.push_back(Atom::eq(Term::var(v, Signature::kInt), t));
    ZClause inst = add_constraints(defs, src);
    if (simplified) {
      SimplifiedClause simp = simplify_clause(inst, bound.escape);
      if (simp.kept != rec.kept)
        return fail("record " + std::to_string(ri) +
                    ": kept flag mismatch on replay");
      if (!simp.kept) continue;
      inst = std::move(simp.clause);
    } else if (!rec.kept) {
      return fail("record " + std::to_string(ri) +
                  ": unsimplified trace cannot drop instances");
    }
    if (rec.output_index != kept_seen)
      return fail("record " + std::to_string(ri) +
                  ": output index out of order");
    if (rec.output_index >= output.clauses.size())
      return fail("record " + std::to_string(ri) +
                  ": output index out of range");
    const ZClause& got = output.clauses[rec.output_index];
    // Compare everything except the origin note.
    ZClause a = inst, b = got;
    a.origin.clear();
    b.origin.clear();
    if (a.str() != b.str())
      return fail("record " + std::to_string(ri) + ": replay mismatch\n  " +
                  a.str() + "\n  " + b.str());
    ++kept_seen;
  }
  if (kept_seen != output.clauses.size())
    return fail("trace covers " + std::to_string(kept_seen) +
                " clauses but output has " +
                std::to_string(output.clauses.size()));
  return true;
}

}  // namespace zground
