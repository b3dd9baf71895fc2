// Stage-2 grounding schemes: array axiom instantiation, enumerative
// grounding for stratified signatures, image-atom elimination, the
// index-set comparison baseline, and the scheme admissibility probe.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "zground/bound.hpp"
#include "zground/schemes.hpp"
#include "zground/zclause.hpp"

using namespace zground;
using testutil::zc;

namespace {

/// Minimal arrays problem: one store(a, i, e) under an equality, with `extra`
/// upper-bound clauses to populate the base set.
struct StoreWorld {
  Problem p;
  SortId array, elem;
  Term a, b, e, i, k;

  StoreWorld() {
    p.theory = TheoryTag::ArraysInt;
    array = p.sig.add_sort("array");
    elem = p.sig.add_sort("elem");
    p.sig.add_function({"select", {array, Signature::kInt}, elem});
    p.sig.add_function({"store", {array, Signature::kInt, elem}, array});
    p.sig.add_function({"a", {}, array});
    p.sig.add_function({"b", {}, array});
    p.sig.add_function({"e", {}, elem});
    p.sig.add_function({"i", {}, Signature::kInt});
    p.sig.add_function({"k", {}, Signature::kInt});
    a = Term::constant("a", array);
    b = Term::constant("b", array);
    e = Term::constant("e", elem);
    i = Term::constant("i", Signature::kInt);
    k = Term::constant("k", Signature::kInt);
  }

  Term store(Term arr, Term idx, Term el) {
    return Term::app("store", {arr, idx, el}, array);
  }
  Term select(Term arr, Term idx) {
    return Term::app("select", {arr, idx}, elem);
  }

  /// b = store(a, x, e) with grounding atom x = i, plus y <= k
  void add_write_and_bound() {
    Term x = Term::var("x", Signature::kInt);
    ZClause w = zc({Atom::eq(x, i)}, {}, {Atom::eq(b, store(a, x, e))});
    w.vars = {{"x", Signature::kInt}};
    w.origin = "input:0";
    p.clauses.push_back(w);
    Term y = Term::var("y", Signature::kInt);
    ZClause u = zc({Atom::leq(y, k)}, {}, {});
    u.vars = {{"y", Signature::kInt}};
    u.origin = "input:1";
    p.clauses.push_back(u);
    for (ZClause& c : p.clauses) classify_and_complete(c);
  }
};

Problem stratified_sample() {
  // probe : Int -> reading, two readings, two integer constants
  Problem p;
  p.theory = TheoryTag::Generic;
  SortId reading = p.sig.add_sort("reading");
  p.sig.add_function({"probe", {Signature::kInt}, reading});
  p.sig.add_function({"idle", {}, reading});
  p.sig.add_function({"lo", {}, Signature::kInt});
  p.sig.add_function({"hi", {}, Signature::kInt});
  Term x = Term::var("x", Signature::kInt);
  Term r = Term::var("r", reading);
  ZClause c1 = zc({}, {},
                  {Atom::eq(Term::app("probe", {x}, reading),
                            Term::constant("idle", reading))});
  c1.vars = {{"x", Signature::kInt}};
  c1.origin = "input:0";
  ZClause c2 = zc({}, {Atom::eq(r, Term::constant("idle", reading))}, {});
  c2.vars = {{"r", reading}};
  c2.origin = "input:1";
  p.clauses = {c1, c2};
  return p;
}

}  // namespace

TEST_CASE("array axiom grounding emits hit, low and high instances per "
          "context") {
  StoreWorld w;
  w.add_write_and_bound();
  FreshNames fresh;
  BoundSet bound = compute_bound(w.p, BoundMode::Arrays, fresh);
  // base: k (upper bound), i and i-1 (write index and neighbour)
  REQUIRE(bound.base.size() == 3);

  auto axioms = ground_array_axioms(w.p, bound);
  // one context, 2|base|+2 clauses: hit, |base| low, |base| high, plus the
  // escape's high clause (its low clause is deleted by simplification)
  CHECK(axioms.size() == 2 * bound.base.size() + 2);

  std::size_t hits = 0, selects_on_escape = 0;
  for (const ZClause& c : axioms) {
    REQUIRE(c.succedent.size() == 1);
    CHECK(c.antecedent.empty());
    const Atom& at = c.succedent[0];
    CHECK(at.kind == AtomKind::Eq);
    // left side is always a select on the store term
    REQUIRE(at.lhs.is_app());
    CHECK(at.lhs.head() == "select");
    CHECK(at.lhs.args()[0].head() == "store");
    if (at.rhs == w.e) {
      ++hits;
      // the hit instance reads back the written index itself
      CHECK(at.lhs.args()[1] == at.lhs.args()[0].args()[1]);
    } else {
      // low/high instances read some other position from the old array
      REQUIRE(at.rhs.is_app());
      CHECK(at.rhs.head() == "select");
      CHECK(at.rhs.args()[0] == w.a);
      if (at.rhs.args()[1] == bound.escape) ++selects_on_escape;
    }
  }
  CHECK(hits == 1);
  // exactly one escape read survives (the high side), with its constraint
  // dropped rather than kept
  CHECK(selects_on_escape == 1);
  for (const ZClause& c : axioms)
    for (const Atom& at : c.constraints) {
      CHECK(at.lhs != bound.escape);
      CHECK(at.rhs != bound.escape);
    }
}

TEST_CASE("problems without store terms produce no array axioms") {
  StoreWorld w;
  Term y = Term::var("y", Signature::kInt);
  ZClause u = zc({Atom::leq(y, w.k)}, {},
                 {Atom::eq(w.select(w.a, y), w.e)});
  u.vars = {{"y", Signature::kInt}};
  w.p.clauses.push_back(u);
  for (ZClause& c : w.p.clauses) classify_and_complete(c);
  FreshNames fresh;
  BoundSet bound = compute_bound(w.p, BoundMode::Arrays, fresh);
  CHECK(ground_array_axioms(w.p, bound).empty());
}

TEST_CASE("array axiom grounding rejects an ungroundable write index") {
  StoreWorld w;
  Term x = Term::var("x", Signature::kInt);
  ZClause c = zc({Atom::leq(x, w.k)}, {},
                 {Atom::eq(w.b, w.store(w.a, x, w.e))});
  c.vars = {{"x", Signature::kInt}};
  w.p.clauses.push_back(c);
  for (ZClause& cl : w.p.clauses) classify_and_complete(cl);
  FreshNames fresh;
  BoundSet bound = compute_bound(w.p, BoundMode::Arrays, fresh);
  CHECK_THROWS_AS(ground_array_axioms(w.p, bound), std::invalid_argument);
}

TEST_CASE("duplicate store contexts are grounded once") {
  StoreWorld w;
  w.add_write_and_bound();
  // a second clause mentioning the same write
  Term x = Term::var("x", Signature::kInt);
  ZClause again = zc({Atom::eq(x, w.i)}, {},
                     {Atom::eq(w.b, w.store(w.a, x, w.e))});
  again.vars = {{"x", Signature::kInt}};
  w.p.clauses.push_back(again);
  for (ZClause& c : w.p.clauses) classify_and_complete(c);
  FreshNames fresh;
  BoundSet bound = compute_bound(w.p, BoundMode::Arrays, fresh);
  auto axioms = ground_array_axioms(w.p, bound);
  CHECK(axioms.size() == 2 * bound.base.size() + 2);
}

TEST_CASE("stratified enumeration counts follow the sort universes") {
  Problem p = stratified_sample();
  FreshNames fresh;
  auto ground = ground_stratified(p, fresh);
  // integer universe {lo, hi} for clause 0; reading universe
  // {idle, probe(lo), probe(hi)} for clause 1 -> 2 + 3 instances
  CHECK(ground.size() == 5);
  for (const ZClause& c : ground) CHECK(c.is_ground());
  std::size_t enum_tagged = 0;
  for (const ZClause& c : ground)
    if (c.origin.find("/enum:") != std::string::npos) ++enum_tagged;
  CHECK(enum_tagged == ground.size());
}

TEST_CASE("stratified enumeration declares a witness for empty sorts") {
  Problem p;
  p.theory = TheoryTag::Generic;
  SortId ghost = p.sig.add_sort("ghost");  // no constructors at all
  Term v = Term::var("v", ghost);
  ZClause c = zc({}, {Atom::eq(v, v)}, {});
  c.vars = {{"v", ghost}};
  p.clauses.push_back(c);
  FreshNames fresh;
  auto ground = ground_stratified(p, fresh);
  REQUIRE(ground.size() == 1);
  CHECK(ground[0].is_ground());
  // the witness constant is now a declared zero-ary function of the sort
  bool found = false;
  for (const auto& [name, fn] : p.sig.functions())
    if (fn.args.empty() && fn.range == ghost) found = true;
  CHECK(found);
}

TEST_CASE("stratified enumeration rejects cyclic signatures and huge "
          "products") {
  Problem cyc;
  SortId s = cyc.sig.add_sort("s");
  cyc.sig.add_function({"f", {s}, s});
  cyc.sig.add_function({"c", {}, s});
  Term v = Term::var("v", s);
  ZClause c = zc({}, {}, {Atom::eq(v, v)});
  c.vars = {{"v", s}};
  cyc.clauses.push_back(c);
  FreshNames fresh;
  CHECK_THROWS_AS(ground_stratified(cyc, fresh), std::invalid_argument);

  Problem big = stratified_sample();
  FreshNames fresh2;
  CHECK_THROWS_AS(ground_stratified(big, fresh2, 3), std::runtime_error);
}

TEST_CASE("image atoms in the antecedent become equalities with fresh "
          "variables") {
  Problem p;
  p.theory = TheoryTag::St2;
  SortId user = p.sig.add_sort("user");
  SortId badge = p.sig.add_sort("badge");
  p.sig.add_function({"issue", {user}, badge});
  p.sig.add_function({"u1", {}, user});
  Term t = Term::constant("u1", user);
  Term bvar = Term::var("b", badge);
  ZClause c = zc({}, {Atom::in_image(Term::app("issue", {t}, badge), "issue")},
                 {Atom::eq(bvar, bvar)});
  c.vars = {{"b", badge}};
  p.clauses.push_back(c);
  FreshNames fresh;
  Problem out = transform_st2(p, fresh);
  REQUIRE(out.clauses.size() == 1);
  for (const Atom* at : out.clauses[0].all_atoms())
    CHECK(at->kind != AtomKind::InImage);
  // the image test became issue(u1) = issue(x) for a fresh x
  REQUIRE(out.clauses[0].antecedent.size() == 1);
  const Atom& eq = out.clauses[0].antecedent[0];
  CHECK(eq.kind == AtomKind::Eq);
  CHECK(eq.rhs.head() == "issue");
  CHECK(eq.rhs.args()[0].is_var());
}

TEST_CASE("succedent image atoms branch over profile mates and drop the "
          "reflexive branch") {
  Problem p;
  p.theory = TheoryTag::St2;
  SortId user = p.sig.add_sort("user");
  SortId badge = p.sig.add_sort("badge");
  p.sig.add_function({"issue", {user}, badge});
  p.sig.add_function({"reissue", {user}, badge});
  p.sig.add_function({"revoke", {user}, badge});
  p.sig.add_function({"u1", {}, user});
  Term x = Term::var("x", badge);
  ZClause c = zc({}, {}, {Atom::in_image(x, "issue")});
  c.vars = {{"x", badge}};
  p.clauses.push_back(c);
  FreshNames fresh;
  Problem out = transform_st2(p, fresh);
  // three profile mates (issue, reissue, revoke); the issue branch is the
  // tautology issue(y) = issue(y) and is dropped
  CHECK(out.clauses.size() == 2);
  std::set<std::string> heads;
  for (const ZClause& cl : out.clauses) {
    REQUIRE(cl.succedent.size() == 1);
    CHECK(cl.succedent[0].kind == AtomKind::Eq);
    heads.insert(cl.succedent[0].lhs.head());
    CHECK(cl.succedent[0].rhs.head() == "issue");
    REQUIRE(cl.antecedent.size() == 1);  // x = g(y)
  }
  CHECK(heads == std::set<std::string>{"reissue", "revoke"});
}

TEST_CASE("image atoms over ground applications collapse to a single "
          "equality") {
  Problem p;
  p.theory = TheoryTag::St2;
  SortId user = p.sig.add_sort("user");
  SortId badge = p.sig.add_sort("badge");
  p.sig.add_function({"issue", {user}, badge});
  p.sig.add_function({"reissue", {user}, badge});
  p.sig.add_function({"u2", {}, user});
  Term u2 = Term::constant("u2", user);
  ZClause c = zc({}, {},
                 {Atom::in_image(Term::app("reissue", {u2}, badge), "issue")});
  p.clauses.push_back(c);
  FreshNames fresh;
  Problem out = transform_st2(p, fresh);
  REQUIRE(out.clauses.size() == 1);
  REQUIRE(out.clauses[0].succedent.size() == 1);
  const Atom& at = out.clauses[0].succedent[0];
  CHECK(at.kind == AtomKind::Eq);
  CHECK(at.lhs == Term::app("reissue", {u2}, badge));
  CHECK(at.rhs == Term::app("issue", {u2}, badge));
}

TEST_CASE("image elimination rejects an argument head outside the profile "
          "class") {
  Problem p;
  p.theory = TheoryTag::St2;
  SortId user = p.sig.add_sort("user");
  SortId badge = p.sig.add_sort("badge");
  SortId room = p.sig.add_sort("room");
  p.sig.add_function({"issue", {user}, badge});
  p.sig.add_function({"assign", {room}, badge});  // different argument sort
  p.sig.add_function({"r1", {}, room});
  Term r1 = Term::constant("r1", room);
  ZClause c = zc({}, {},
                 {Atom::in_image(Term::app("assign", {r1}, badge), "issue")});
  p.clauses.push_back(c);
  FreshNames fresh;
  CHECK_THROWS_AS(transform_st2(p, fresh), std::invalid_argument);
}

TEST_CASE("injectivity axioms cover image functions argument by argument") {
  Problem p;
  p.theory = TheoryTag::St2;
  SortId user = p.sig.add_sort("user");
  SortId badge = p.sig.add_sort("badge");
  p.sig.add_function({"issue", {user}, badge});
  p.sig.add_function({"reissue", {user}, badge});
  p.sig.add_function({"u1", {}, user});
  Term x = Term::var("x", badge);
  ZClause c = zc({}, {}, {Atom::in_image(x, "issue")});
  c.vars = {{"x", badge}};
  p.clauses.push_back(c);
  FreshNames fresh;
  auto axioms = st2_injectivity_axioms(p, fresh);
  // pairs (issue, issue) and (issue, reissue), one argument each
  CHECK(axioms.size() == 2);
  for (const ZClause& cl : axioms) {
    REQUIRE(cl.antecedent.size() == 1);
    REQUIRE(cl.succedent.size() == 1);
    CHECK(cl.antecedent[0].lhs.head() == "issue");
    CHECK(cl.succedent[0].kind == AtomKind::Eq);
  }
}

TEST_CASE("the baseline index set collects both polarities and neighbours") {
  Problem p = testutil::segments_problem(2);
  for (ZClause& c : p.clauses) classify_and_complete(c);
  auto index = bradley_index_set(p);
  std::vector<std::string> got;
  for (const Term& t : index) got.push_back(t.str());
  std::sort(got.begin(), got.end());
  std::vector<std::string> want = {"(+ u2 1)", "(+ u3 -1)", "(+ u3 1)",
                                   "k",        "l1",        "l2",
                                   "u1",       "u2",        "u3"};
  CHECK(got == want);
}

TEST_CASE("the baseline index set of the chained-reads family is the two "
          "window ends") {
  Problem p = testutil::chained_reads_problem(5);
  for (ZClause& c : p.clauses) classify_and_complete(c);
  auto index = bradley_index_set(p);
  REQUIRE(index.size() == 2);
  CHECK(index[0].str() == "i");
  CHECK(index[1].str() == "j");
}

TEST_CASE("problems without indexed reads have an empty baseline index") {
  Problem p;
  p.theory = TheoryTag::Generic;
  p.sig.add_function({"k", {}, Signature::kInt});
  Term x = Term::var("x", Signature::kInt);
  ZClause c = zc({Atom::leq(x, Term::constant("k", Signature::kInt))}, {}, {});
  c.vars = {{"x", Signature::kInt}};
  p.clauses.push_back(c);
  for (ZClause& cl : p.clauses) classify_and_complete(cl);
  CHECK(bradley_index_set(p).empty());
}

TEST_CASE("instance counting reproduces the exponential separation") {
  const int n = 5;
  Problem p = testutil::chained_reads_problem(n);
  for (ZClause& c : p.clauses) classify_and_complete(c);
  FreshNames fresh;
  BoundSet bound = compute_bound(p, BoundMode::Arrays, fresh);
  auto index = bradley_index_set(p);
  auto stats = count_instances(p, bound, index);
  CHECK(stats.input_clauses == 1);
  CHECK(stats.bound_size == 0);
  CHECK(stats.extended_size == 1);
  CHECK(stats.baseline_index_size == 2);
  CHECK(stats.ours_total == 1);
  CHECK(stats.baseline_total == Int(1) << n);  // 2^n
  REQUIRE(stats.per_clause_ours.size() == 1);
  REQUIRE(stats.per_clause_baseline.size() == 1);
  CHECK(stats.per_clause_ours[0].second == 1);
  CHECK(stats.per_clause_baseline[0].second == 32);
}

TEST_CASE("the shipped schemes pass the admissibility probe") {
  // stratified scheme on the sensor sample
  Problem strat = stratified_sample();
  SortId reading = strat.sig.sort_id("reading");
  Term t = Term::constant("fresh_t", reading);
  Term s = Term::constant("fresh_s", reading);
  strat.sig.add_function({"fresh_t", {}, reading});
  strat.sig.add_function({"fresh_s", {}, reading});
  auto r1 = admissibility_probe(SchemeKind::Stratified, strat, t, s);
  CHECK(r1.pass);

  // arrays scheme on a store sample whose clauses are all ground up to
  // grounding atoms (the state after the integer stage)
  StoreWorld w;
  Term x = Term::var("x", Signature::kInt);
  ZClause write = zc({Atom::eq(x, w.i)}, {},
                     {Atom::eq(w.b, w.store(w.a, x, w.e))});
  write.vars = {{"x", Signature::kInt}};
  write.origin = "input:0";
  ZClause window = zc({Atom::leq(w.i, w.k)}, {}, {});
  window.origin = "input:1";
  w.p.clauses = {write, window};
  for (ZClause& c : w.p.clauses) classify_and_complete(c);
  Term te = Term::constant("t_elem", w.elem);
  Term se = Term::constant("s_elem", w.elem);
  w.p.sig.add_function({"t_elem", {}, w.elem});
  w.p.sig.add_function({"s_elem", {}, w.elem});
  ZClause extra = zc({}, {}, {Atom::eq(w.select(w.b, w.k), w.e)});
  extra.origin = "input:2";
  auto r2 = admissibility_probe(SchemeKind::Arrays, w.p, te, se, &extra);
  CHECK(r2.pass);
  CHECK(r2.detail.empty());
}

TEST_CASE("the probe flags a non-ground scheme and rejects connected "
          "equations") {
  Problem strat = stratified_sample();
  SortId reading = strat.sig.sort_id("reading");
  Term t = Term::constant("fresh_t", reading);
  Term s = Term::constant("fresh_s", reading);
  strat.sig.add_function({"fresh_t", {}, reading});
  strat.sig.add_function({"fresh_s", {}, reading});

  // identity "scheme": returns its input, variables included
  SchemeFn identity = [](const Problem& p) { return p.clauses; };
  auto r = admissibility_probe(identity, strat, t, s);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.detail.empty());

  // a connected equation violates the probe's precondition: probe(lo) is an
  // instance of the sample's probe(x) without being equal to it
  Term probe_lo = Term::app(
      "probe", {Term::constant("lo", Signature::kInt)}, reading);
  CHECK_THROWS_AS(
      admissibility_probe(SchemeKind::Stratified, strat, probe_lo, t),
      std::invalid_argument);
  // a term that occurs verbatim in the sample is syntactically equal to its
  // own pattern and is allowed
  Term idle = Term::constant("idle", reading);
  CHECK(admissibility_probe(SchemeKind::Stratified, strat, idle, t).pass);
}
