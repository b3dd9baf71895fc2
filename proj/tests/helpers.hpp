// Shared builders for the test suite: the bounded-segments problem family,
// the chained-reads family, and small utilities for reading corpus files.
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zground/zclause.hpp"

namespace testutil {

inline std::string corpus_path(const std::string& name) {
#ifdef ZGROUND_CORPUS_DIR
  return std::string(ZGROUND_CORPUS_DIR) + "/" + name;
#else
  return "tests/corpus/" + name;
#endif
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline zground::ZClause zc(std::vector<zground::Atom> cons,
                           std::vector<zground::Atom> ante,
                           std::vector<zground::Atom> succ) {
  zground::ZClause c;
  c.constraints = std::move(cons);
  c.antecedent = std::move(ante);
  c.succedent = std::move(succ);
  return c;
}

/// n bounded constant segments of an array `a`, ordered and non-empty, then
/// a write one past the last segment into `b` and a read of `b` strictly
/// below every segment claiming the first segment's value. Unsatisfiable;
/// dropping the final read (with_query = false) makes it satisfiable.
inline zground::Problem segments_problem(int n, bool with_query = true) {
  using namespace zground;
  Problem prob;
  prob.theory = TheoryTag::ArraysInt;
  Signature& sig = prob.sig;
  SortId arr = sig.add_sort("array");
  SortId elem = sig.add_sort("elem");
  sig.add_function({"select", {arr, Signature::kInt}, elem});
  sig.add_function({"store", {arr, Signature::kInt, elem}, arr});
  sig.add_function({"a", {}, arr});
  sig.add_function({"b", {}, arr});
  std::vector<Term> e, l, u;
  for (int i = 1; i <= n; ++i) {
    sig.add_function({"e" + std::to_string(i), {}, elem});
    e.push_back(Term::constant("e" + std::to_string(i), elem));
  }
  for (int i = 1; i <= n; ++i) {
    sig.add_function({"l" + std::to_string(i), {}, Signature::kInt});
    l.push_back(Term::constant("l" + std::to_string(i), Signature::kInt));
  }
  for (int i = 1; i <= n + 1; ++i) {
    sig.add_function({"u" + std::to_string(i), {}, Signature::kInt});
    u.push_back(Term::constant("u" + std::to_string(i), Signature::kInt));
  }
  sig.add_function({"k", {}, Signature::kInt});
  sig.add_function({"uprime", {}, Signature::kInt});
  Term a = Term::constant("a", arr), bq = Term::constant("b", arr);
  Term k = Term::constant("k", Signature::kInt);
  Term uprime = Term::constant("uprime", Signature::kInt);

  FreshNames fresh;
  int orig = 0;
  auto add = [&](const std::map<std::string, SortId>& vars,
                 std::vector<Literal> cons, std::vector<Literal> ante,
                 std::vector<Literal> succ) {
    std::optional<std::pair<Term, Term>> unit;
    auto cs = normalize_into_zclauses(vars, cons, ante, succ, sig,
                                      "input:" + std::to_string(orig++), &unit);
    if (unit) prob.unit_int_equalities.push_back(*unit);
    for (ZClause& c : cs) {
      purify(c, sig, fresh);
      prob.clauses.push_back(std::move(c));
    }
  };
  auto L = [](Atom at) { return Literal{at, false}; };

  for (int i = 0; i < n; ++i) {  // segment i holds e_i on [l_i, u_i]
    Term x = Term::var("x", Signature::kInt);
    add({{"x", Signature::kInt}},
        {L(Atom::leq(l[i], x)), L(Atom::leq(x, u[i]))}, {},
        {L(Atom::eq(Term::app("select", {a, x}, elem), e[i]))});
  }
  for (int i = 0; i < n; ++i)  // each segment is non-empty
    add({}, {L(Atom::leq(u[i], add_offset(l[i], -1)))}, {}, {});
  for (int i = 0; i + 1 < n; ++i)  // segments sit strictly below each other
    add({}, {L(Atom::leq(u[i], add_offset(l[i + 1], -1)))}, {}, {});
  {  // write one past the last segment
    Term x = Term::var("x", Signature::kInt);
    add({{"x", Signature::kInt}}, {L(Atom::eq(x, u[n]))}, {},
        {L(Atom::eq(bq, Term::app("store", {a, x, e[0]}, arr)))});
  }
  add({}, {}, {}, {L(Atom::eq(uprime, add_offset(u[n - 1], 1)))});
  add({}, {L(Atom::leq(k, add_offset(l[0], -1)))}, {}, {});
  add({}, {L(Atom::leq(u[n - 1], add_offset(k, -1)))}, {}, {});
  if (with_query)
    add({}, {}, {L(Atom::eq(Term::app("select", {bq, k}, elem), e[0]))}, {});
  return prob;
}

/// One clause chaining n select reads whose index variables carry only lower
/// bounds: the upper-bound base set stays empty while index-set methods
/// instantiate every variable at both bound constants.
inline zground::Problem chained_reads_problem(int n) {
  using namespace zground;
  Problem prob;
  prob.theory = TheoryTag::ArraysInt;
  Signature& sig = prob.sig;
  SortId arr = sig.add_sort("array");
  SortId elem = sig.add_sort("elem");
  sig.add_function({"select", {arr, Signature::kInt}, elem});
  sig.add_function({"store", {arr, Signature::kInt, elem}, arr});
  sig.add_function({"a", {}, arr});
  sig.add_function({"i", {}, Signature::kInt});
  sig.add_function({"j", {}, Signature::kInt});
  sig.add_function({"e", {}, elem});
  for (int c = 1; c < n; ++c)
    sig.add_function({"c" + std::to_string(c), {}, elem});
  Term a = Term::constant("a", arr);
  Term iC = Term::constant("i", Signature::kInt);
  Term jC = Term::constant("j", Signature::kInt);

  std::map<std::string, SortId> vars;
  std::vector<Literal> cons, ante, succ;
  std::vector<Term> xs;
  for (int v = 1; v <= n; ++v) {
    std::string nm = "x" + std::to_string(v);
    vars.emplace(nm, Signature::kInt);
    xs.push_back(Term::var(nm, Signature::kInt));
    cons.push_back(Literal{Atom::leq(iC, xs.back()), false});
  }
  cons.push_back(Literal{Atom::leq(jC, xs.back()), false});
  for (int v = 0; v + 1 < n; ++v)
    ante.push_back(Literal{
        Atom::eq(Term::app("select", {a, xs[v]}, elem),
                 Term::constant("c" + std::to_string(v + 1), elem)),
        false});
  succ.push_back(Literal{
      Atom::eq(Term::app("select", {a, xs.back()}, elem),
               Term::constant("e", elem)),
      false});

  FreshNames fresh;
  auto cs = normalize_into_zclauses(vars, cons, ante, succ, sig, "input:0",
                                    nullptr);
  for (ZClause& c : cs) {
    purify(c, sig, fresh);
    prob.clauses.push_back(std::move(c));
  }
  return prob;
}

}  // namespace testutil
