// Clause normalization, purification, flattening, variable classification,
// the shape checks behind the instantiation guarantee, and validation of the
// array+integer input class.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "zground/zclause.hpp"

using namespace zground;
using testutil::zc;

namespace {

struct ArrayWorld {
  Signature sig;
  SortId arr, elem;
  Term a, b, e, d, i, j, u1;
  ArrayWorld() {
    arr = sig.add_sort("array");
    elem = sig.add_sort("elem");
    sig.add_function({"select", {arr, Signature::kInt}, elem});
    sig.add_function({"store", {arr, Signature::kInt, elem}, arr});
    sig.add_function({"a", {}, arr});
    sig.add_function({"b", {}, arr});
    sig.add_function({"e", {}, elem});
    sig.add_function({"d", {}, elem});
    sig.add_function({"i", {}, Signature::kInt});
    sig.add_function({"j", {}, Signature::kInt});
    sig.add_function({"u1", {}, Signature::kInt});
    a = Term::constant("a", arr);
    b = Term::constant("b", arr);
    e = Term::constant("e", elem);
    d = Term::constant("d", elem);
    i = Term::constant("i", Signature::kInt);
    j = Term::constant("j", Signature::kInt);
    u1 = Term::constant("u1", Signature::kInt);
  }
  Term sel(Term ar, Term ix) const {
    return Term::app("select", {ar, ix}, elem);
  }
  Term sto(Term ar, Term ix, Term v) const {
    return Term::app("store", {ar, ix, v}, arr);
  }
};

}  // namespace

TEST_CASE("normalization moves arithmetic atoms into the constraint part") {
  ArrayWorld w;
  // antecedent arithmetic atom joins the constraints positively
  auto cs = normalize_into_zclauses(
      {}, {}, {Literal{Atom::leq(w.i, w.j), false}},
      {Literal{Atom::eq(w.sel(w.a, w.i), w.e), false}}, w.sig, "t", nullptr);
  REQUIRE(cs.size() == 1);
  REQUIRE(cs[0].constraints.size() == 1);
  CHECK(cs[0].constraints[0] == Atom::leq(w.i, w.j));
  CHECK(cs[0].succedent.size() == 1);
}

TEST_CASE("negated bound flips into the reversed strict bound") {
  ArrayWorld w;
  // not (i <= j) is the atom j <= i-1
  auto cs = normalize_into_zclauses({}, {Literal{Atom::leq(w.i, w.j), true}},
                                    {}, {}, w.sig, "t", nullptr);
  REQUIRE(cs.size() == 1);
  REQUIRE(cs[0].constraints.size() == 1);
  CHECK(cs[0].constraints[0] == Atom::leq(w.j, add_offset(w.i, -1)));
}

TEST_CASE("succedent integer equality splits into two bound clauses") {
  ArrayWorld w;
  // asserting u1 = i+1 denies both u1 <= i and i+2 <= u1
  std::optional<std::pair<Term, Term>> unit;
  auto cs = normalize_into_zclauses(
      {}, {}, {}, {Literal{Atom::eq(w.u1, add_offset(w.i, 1)), false}}, w.sig,
      "t", &unit);
  REQUIRE(cs.size() == 2);
  for (const ZClause& c : cs) {
    CHECK(c.antecedent.empty());
    CHECK(c.succedent.empty());
    REQUIRE(c.constraints.size() == 1);
  }
  REQUIRE(unit.has_value());
  CHECK(unit->first == w.u1);
  CHECK(unit->second == add_offset(w.i, 1));
}

TEST_CASE("negated non-arithmetic literals swap sides") {
  ArrayWorld w;
  auto cs = normalize_into_zclauses(
      {}, {}, {Literal{Atom::eq(w.e, w.d), true}},
      {Literal{Atom::eq(w.sel(w.a, w.i), w.e), true}}, w.sig, "t", nullptr);
  REQUIRE(cs.size() == 1);
  REQUIRE(cs[0].succedent.size() == 1);  // negated antecedent
  CHECK(cs[0].succedent[0] == Atom::eq(w.e, w.d));
  REQUIRE(cs[0].antecedent.size() == 1);  // negated succedent
  CHECK(cs[0].antecedent[0] == Atom::eq(w.sel(w.a, w.i), w.e));
}

TEST_CASE("purification extracts integer subterms behind fresh variables") {
  ArrayWorld w;
  FreshNames fresh;
  ZClause c = zc({}, {}, {Atom::eq(w.sel(w.a, add_offset(w.i, 1)), w.e)});
  purify(c, w.sig, fresh);
  REQUIRE(c.constraints.size() == 1);
  const Atom& def = c.constraints[0];
  CHECK(def.kind == AtomKind::Eq);
  REQUIRE(def.lhs.is_var());
  CHECK(def.rhs == add_offset(w.i, 1));
  CHECK(c.succedent[0] == Atom::eq(w.sel(w.a, def.lhs), w.e));

  // a clause without integer subterms in the body stays untouched
  ZClause plain = zc({}, {}, {Atom::eq(w.e, w.d)});
  purify(plain, w.sig, fresh);
  CHECK(plain.constraints.empty());

  // the written index is abstracted the same way
  ZClause wr = zc({}, {}, {Atom::eq(w.b, w.sto(w.a, w.u1, w.e))});
  purify(wr, w.sig, fresh);
  REQUIRE(wr.constraints.size() == 1);
  CHECK(wr.constraints[0].rhs == w.u1);
  REQUIRE(wr.constraints[0].lhs.is_var());

  // equal extracted subterms share one variable
  ZClause twice = zc({}, {}, {Atom::eq(w.sel(w.a, add_offset(w.i, 2)),
                                       w.sel(w.b, add_offset(w.i, 2)))});
  purify(twice, w.sig, fresh);
  CHECK(twice.constraints.size() == 1);
  const Atom& at = twice.succedent[0];
  CHECK(at.lhs.args()[1] == at.rhs.args()[1]);
}

TEST_CASE("after purification no non-variable integer term sits in the body") {
  Problem p = testutil::segments_problem(2);
  auto check_part = [](const std::vector<Atom>& part) {
    for (const Atom& at : part)
      for (const Term& side : {at.lhs, at.rhs}) {
        if (!side.valid() || !side.is_app()) continue;
        for (const Term& arg : side.args())
          if (arg.sort() == Signature::kInt) CHECK(arg.is_var());
      }
  };
  for (const ZClause& c : p.clauses) {
    check_part(c.antecedent);
    check_part(c.succedent);
  }
}

TEST_CASE("flattening extracts nested ground writes") {
  ArrayWorld w;
  FreshNames fresh;
  Problem p;
  p.sig = w.sig;
  p.theory = TheoryTag::ArraysInt;
  // select(store(a,i,e), j) = d gets the store pulled out into a unit
  p.clauses.push_back(
      zc({}, {}, {Atom::eq(w.sel(w.sto(w.a, w.i, w.e), w.j), w.d)}));
  flatten(p, fresh);
  REQUIRE(p.clauses.size() == 2);
  bool have_unit = false, have_flat = false;
  for (const ZClause& c : p.clauses) {
    for (const Atom* at : c.all_atoms()) {
      if (at->kind != AtomKind::Eq) continue;
      if (at->rhs == w.sto(w.a, w.i, w.e) || at->lhs == w.sto(w.a, w.i, w.e))
        have_unit = true;
      if (at->lhs.is_app() && at->lhs.head() == "select" &&
          at->lhs.args()[0].is_app() && at->lhs.args()[0].args().empty())
        have_flat = true;
    }
  }
  CHECK(have_unit);
  CHECK(have_flat);

  // a second pass changes nothing
  Problem q = p;
  flatten(q, fresh);
  CHECK(q.clauses.size() == p.clauses.size());
}

TEST_CASE("classification of integer variables") {
  ArrayWorld w;
  Term x = Term::var("x", Signature::kInt);
  Term y = Term::var("y", Signature::kInt);

  ZClause c1 = zc({Atom::eq(x, w.i), Atom::leq(y, w.j)}, {}, {});
  c1.vars = {{"x", Signature::kInt}, {"y", Signature::kInt}};
  auto cls1 = classify_and_complete(c1);
  CHECK(cls1.abstraction == std::set<std::string>{"x"});
  CHECK(cls1.inequality == std::set<std::string>{"y"});
  CHECK(cls1.completed.empty());

  // an unconstrained integer variable gains the trivial self-bound
  ZClause c2 = zc({}, {Atom::eq(w.sel(w.a, Term::var("z", Signature::kInt)),
                                w.e)},
                  {});
  c2.vars = {{"z", Signature::kInt}};
  auto cls2 = classify_and_complete(c2);
  CHECK(cls2.inequality == std::set<std::string>{"z"});
  REQUIRE(c2.constraints.size() == 1);
  Term z = Term::var("z", Signature::kInt);
  CHECK(c2.constraints[0] == Atom::leq(z, z));
  CHECK(cls2.completed == std::vector<std::string>{"z"});

  // both classes at once is legitimate
  ZClause c3 = zc({Atom::eq(x, w.i), Atom::leq(x, w.j)}, {}, {});
  c3.vars = {{"x", Signature::kInt}};
  auto cls3 = classify_and_complete(c3);
  CHECK(cls3.abstraction.count("x") == 1);
  CHECK(cls3.inequality.count("x") == 1);

  // idempotent: a second run adds nothing
  ZClause c2again = c2;
  classify_and_complete(c2again);
  CHECK(c2again.constraints.size() == c2.constraints.size());
}

TEST_CASE("preconstrained shape check") {
  Signature sig;
  SortId el = sig.add_sort("elem");
  for (const char* n : {"a", "b", "c"})
    sig.add_function({n, {}, Signature::kInt});
  sig.add_function({"f", {Signature::kInt, Signature::kInt}, Signature::kInt});
  sig.add_function({"g", {Signature::kInt}, Signature::kInt});
  sig.add_function({"h3", {Signature::kInt, Signature::kInt, Signature::kInt},
                    el});
  sig.add_function({"e", {}, el});
  Term a = Term::constant("a", Signature::kInt);
  Term b = Term::constant("b", Signature::kInt);
  Term x = Term::var("x", Signature::kInt);
  Term y = Term::var("y", Signature::kInt);
  Term z = Term::var("z", Signature::kInt);
  auto g1 = [&](Term t) { return Term::app("g", {t}, Signature::kInt); };
  auto h3 = [&](Term p, Term q, Term r) {
    return Term::app("h3", {p, q, r}, el);
  };
  Term e = Term::constant("e", el);

  // every non-grounding constraint only involves abstraction variables or
  // bounds built from them
  ZClause good = zc({Atom::eq(x, a), Atom::eq(y, b),
                     Atom::eq(Term::app("f", {x, y}, Signature::kInt), g1(y)),
                     Atom::leq(z, g1(x))},
                    {}, {Atom::eq(h3(x, y, z), e)});
  good.vars = {{"x", Signature::kInt},
               {"y", Signature::kInt},
               {"z", Signature::kInt}};
  auto cls = classify_and_complete(good);
  CHECK(is_preconstrained(good, cls).ok);

  // y bounded by a term over itself cannot be preconstrained
  ZClause bad = zc({Atom::eq(x, a), Atom::leq(y, g1(y))}, {},
                   {Atom::eq(h3(x, y, z), e)});
  bad.vars = {{"x", Signature::kInt},
              {"y", Signature::kInt},
              {"z", Signature::kInt}};
  auto clsb = classify_and_complete(bad);
  auto rb = is_preconstrained(bad, clsb);
  CHECK_FALSE(rb.ok);
  REQUIRE(rb.offender.has_value());
  CHECK(*rb.offender == Atom::leq(y, g1(y)));

  // the empty clause is vacuously fine
  ZClause empty;
  auto ce = classify_and_complete(empty);
  CHECK(is_preconstrained(empty, ce).ok);
}

TEST_CASE("upper-bound containment allows per-occurrence completion") {
  Signature sig;
  SortId el = sig.add_sort("elem");
  for (const char* n : {"a", "b", "c"})
    sig.add_function({n, {}, Signature::kInt});
  sig.add_function({"f", {Signature::kInt, Signature::kInt}, Signature::kInt});
  sig.add_function({"g", {Signature::kInt, Signature::kInt}, Signature::kInt});
  sig.add_function({"h3", {Signature::kInt, Signature::kInt, Signature::kInt},
                    el});
  sig.add_function({"d", {}, el});
  Term a = Term::constant("a", Signature::kInt);
  Term b = Term::constant("b", Signature::kInt);
  Term c = Term::constant("c", Signature::kInt);
  Term x = Term::var("x", Signature::kInt);
  Term y = Term::var("y", Signature::kInt);
  Term z = Term::var("z", Signature::kInt);
  auto F = [&](Term l, Term r) {
    return Term::app("f", {l, r}, Signature::kInt);
  };
  auto G = [&](Term l, Term r) {
    return Term::app("g", {l, r}, Signature::kInt);
  };

  ZClause C = zc({Atom::eq(x, a), Atom::eq(y, b), Atom::eq(y, c),
                  Atom::leq(z, F(G(x, y), y))},
                 {},
                 {Atom::eq(Term::app("h3", {x, y, z}, el),
                           Term::constant("d", el))});
  C.vars = {{"x", Signature::kInt},
            {"y", Signature::kInt},
            {"z", Signature::kInt}};

  // the two y occurrences may pick different grounding atoms
  CHECK(spsub_check(C, {F(G(a, c), b)}).contained);
  CHECK_FALSE(spsub_check(C, {}).contained);

  // vacuous without upper-bound atoms on inequality variables
  ZClause D = zc({Atom::leq(a, b)}, {}, {});
  CHECK(spsub_check(D, {}).contained);

  // monotone: anything contained in B stays contained in a superset
  auto small = spsub_check(C, {F(G(a, c), b)});
  auto big = spsub_check(C, {F(G(a, c), b), F(G(b, b), b)});
  CHECK(small.contained);
  CHECK(big.contained);
}

TEST_CASE("array+integer input validation") {
  Problem good = testutil::segments_problem(2);
  for (ZClause& c : good.clauses) classify_and_complete(c);
  CHECK(validate_az_problem(good).ok());

  // a store whose index variable has no grounding abstraction atom
  ArrayWorld w;
  Problem p1;
  p1.sig = w.sig;
  p1.theory = TheoryTag::ArraysInt;
  Term x = Term::var("x", Signature::kInt);
  ZClause c1 = zc({Atom::leq(x, w.i)}, {},
                  {Atom::eq(w.b, w.sto(w.a, x, w.e))});
  c1.vars = {{"x", Signature::kInt}};
  p1.clauses.push_back(c1);
  auto r1 = validate_az_problem(p1);
  CHECK_FALSE(r1.ok());

  // a non-ground non-variable bound
  Problem p2;
  p2.sig = w.sig;
  p2.theory = TheoryTag::ArraysInt;
  Term y = Term::var("y", Signature::kInt);
  ZClause c2 = zc({Atom::leq(x, add_offset(y, 1))}, {},
                  {Atom::eq(w.sel(w.a, x), w.e)});
  c2.vars = {{"x", Signature::kInt}, {"y", Signature::kInt}};
  p2.clauses.push_back(c2);
  auto r2 = validate_az_problem(p2);
  CHECK_FALSE(r2.ok());
}

TEST_CASE("constraint prefixing keeps order and idempotent classification") {
  ArrayWorld w;
  Term y = Term::var("y", Signature::kInt);
  ZClause c = zc({Atom::leq(y, w.j)}, {}, {Atom::eq(w.sel(w.a, y), w.e)});
  c.vars = {{"y", Signature::kInt}};
  ZClause c2 = add_constraints({Atom::eq(y, w.i)}, c);
  REQUIRE(c2.constraints.size() == 2);
  CHECK(c2.constraints[0] == Atom::eq(y, w.i));
  CHECK(c2.constraints[1] == Atom::leq(y, w.j));
  CHECK(add_constraints({}, c).constraints == c.constraints);
}

TEST_CASE("grounding atoms inline into the body") {
  ArrayWorld w;
  Term x = Term::var("x", Signature::kInt);
  ZClause c = zc({Atom::eq(x, w.u1), Atom::leq(w.i, x)}, {},
                 {Atom::eq(w.sel(w.a, x), w.e)});
  c.vars = {{"x", Signature::kInt}};
  ZClause flat = inline_grounding_atoms(c);
  CHECK(flat.is_ground());
  REQUIRE(flat.constraints.size() == 1);  // the defining equality dropped
  CHECK(flat.constraints[0] == Atom::leq(w.i, w.u1));
  CHECK(flat.succedent[0] == Atom::eq(w.sel(w.a, w.u1), w.e));
}

TEST_CASE("theory tags round-trip through their names") {
  for (TheoryTag t : {TheoryTag::ArraysInt, TheoryTag::Stratified,
                      TheoryTag::St2, TheoryTag::Generic}) {
    auto back = theory_tag_from_name(theory_tag_name(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK_FALSE(theory_tag_from_name("no-such-theory").has_value());
}
