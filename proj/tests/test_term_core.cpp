// Terms, numeral normal forms, substitutions, signatures, sort levels, and
// the finite ground-term enumeration.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "zground/term.hpp"

using namespace zground;

namespace {

Signature two_level_sig() {
  Signature sig;
  SortId s0 = sig.add_sort("s0");
  SortId s1 = sig.add_sort("s1");
  sig.add_function({"c", {}, s0});
  sig.add_function({"d", {}, s0});
  sig.add_function({"f", {s0}, s1});
  return sig;
}

}  // namespace

TEST_CASE("numeral normal forms") {
  Term zero = Term::num(0);
  Term two = normalize_numerals(
      Term::app("+", {Term::app("+", {zero, Term::num(1)}, Signature::kInt),
                      Term::num(1)},
                Signature::kInt));
  CHECK(two == Term::num(2));  // iterated successor folds to one numeral

  Term a = Term::constant("a", Signature::kInt);
  CHECK(add_offset(add_offset(a, 1), -1) == a);  // predecessor of successor
  CHECK(normalize_numerals(Term::app("+", {a, zero}, Signature::kInt)) == a);

  Term sum = add_offset(a, 3);
  CHECK(normalize_numerals(sum) == sum);  // idempotent on normal forms

  // negation distributes and cancels
  Term na = negate_term(a);
  CHECK(negate_term(na) == a);
  CHECK(normalize_numerals(Term::app("+", {a, na}, Signature::kInt)) ==
        Term::num(0));
}

TEST_CASE("offset decomposition") {
  Term a = Term::constant("a", Signature::kInt);
  auto f = as_offset_form(add_offset(a, -1));
  REQUIRE(f.has_value());
  CHECK(f->base == a);
  CHECK(f->offset == -1);

  auto pure = as_offset_form(Term::num(7));
  REQUIRE(pure.has_value());
  CHECK_FALSE(pure->base.valid());
  CHECK(pure->offset == 7);

  Term b = Term::constant("b", Signature::kInt);
  CHECK_FALSE(as_offset_form(
                  normalize_numerals(Term::app("+", {a, b}, Signature::kInt)))
                  .has_value());
}

TEST_CASE("substitution application") {
  Signature sig;
  SortId arr = sig.add_sort("array");
  SortId elem = sig.add_sort("elem");
  Term a = Term::constant("a", arr);
  Term x = Term::var("x", Signature::kInt);
  Term u1 = Term::constant("u1", Signature::kInt);
  Term sel = Term::app("select", {a, x}, elem);

  Substitution s;
  s.set("x", u1);
  Term r = apply_substitution(sel, s);
  CHECK(r == Term::app("select", {a, u1}, elem));

  Substitution empty;
  CHECK(apply_substitution(sel, empty) == sel);

  // distributes over structure: substitute into each argument independently
  Term inner = apply_substitution(x, s);
  CHECK(Term::app("select", {a, inner}, elem) == r);

  Atom le = Atom::leq(x, u1);
  Substitution to_chi;
  Term chi = Term::constant("chi", Signature::kInt);
  to_chi.set("x", chi);
  CHECK(apply_substitution(le, to_chi) == Atom::leq(chi, u1));
}

TEST_CASE("term ordering is total and puts numerals first") {
  Term n = Term::num(3);
  Term c = Term::constant("c", Signature::kInt);
  Term v = Term::var("x", Signature::kInt);
  CHECK(Term::compare(n, c) < 0);
  CHECK(Term::compare(v, c) < 0);
  CHECK(Term::compare(n, v) < 0);
  CHECK(Term::compare(c, c) == 0);
  CHECK(Term::compare(Term::num(2), Term::num(3)) < 0);
}

TEST_CASE("signature validation") {
  Signature sig;
  SortId arr = sig.add_sort("array");
  SortId elem = sig.add_sort("elem");
  sig.add_function({"select", {arr, Signature::kInt}, elem});
  sig.add_function({"store", {arr, Signature::kInt, elem}, arr});
  sig.add_function({"a", {}, arr});
  sig.add_function({"e", {}, elem});
  CHECK(validate_signature(sig).ok());

  Signature empty;
  CHECK(validate_signature(empty).ok());  // built-ins satisfy everything

  // integer-valued function over a non-integer argument breaks the
  // integer-subterm restriction
  Signature bad;
  SortId el = bad.add_sort("elem");
  bad.add_function({"e", {}, el});
  bad.add_function({"f", {el}, Signature::kInt});
  auto rep = validate_signature(bad);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.issues[0].code == "int-range-args");
  CHECK(rep.issues[0].message.find("f") != std::string::npos);

  // a sort with no ground term at all is flagged
  Signature hollow;
  hollow.add_sort("ghost");
  auto rep2 = validate_signature(hollow);
  REQUIRE_FALSE(rep2.ok());
  CHECK(rep2.issues[0].code == "uninhabited-sort");
}

TEST_CASE("reserved names stay out of signatures") {
  Signature sig;
  CHECK(Signature::is_reserved("+"));
  CHECK(Signature::is_reserved("-"));
  CHECK(Signature::is_reserved("Int"));
  CHECK_THROWS_AS(sig.add_function({"+", {}, Signature::kInt}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sig.add_sort("Int"), std::invalid_argument);
}

TEST_CASE("stratification levels") {
  Signature sig = two_level_sig();
  auto r = stratification_levels(sig);
  REQUIRE(r.ok);
  CHECK(r.levels.at(sig.sort_id("s0")) == 0);
  CHECK(r.levels.at(sig.sort_id("s1")) == 1);

  // self-loop can never satisfy a strictly increasing level assignment
  Signature loop;
  SortId s = loop.add_sort("s");
  loop.add_function({"c", {}, s});
  loop.add_function({"f", {s}, s});
  auto rl = stratification_levels(loop);
  CHECK_FALSE(rl.ok);
  REQUIRE_FALSE(rl.cycle.empty());
  CHECK(rl.cycle.front() == s);

  // constants-only signatures (relations encoded as functions into a fresh
  // truth sort) always stratify
  Signature bsr;
  SortId dom = bsr.add_sort("dom");
  SortId truth = bsr.add_sort("truth");
  bsr.add_function({"c1", {}, dom});
  bsr.add_function({"c2", {}, dom});
  bsr.add_function({"tt", {}, truth});
  bsr.add_function({"p", {dom, dom}, truth});
  CHECK(stratification_levels(bsr).ok);
}

TEST_CASE("ground term enumeration over stratified signatures") {
  Signature single;
  SortId s = single.add_sort("s");
  single.add_function({"c", {}, s});
  auto ts = enumerate_ground_terms(single, s);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0] == Term::constant("c", s));

  Signature sig = two_level_sig();
  SortId s0 = sig.sort_id("s0");
  SortId s1 = sig.sort_id("s1");
  auto t1 = enumerate_ground_terms(sig, s1);
  REQUIRE(t1.size() == 2);
  Term c = Term::constant("c", s0), d = Term::constant("d", s0);
  CHECK(t1[0] == Term::app("f", {c}, s1));
  CHECK(t1[1] == Term::app("f", {d}, s1));

  // two levels of nesting: depth tracks the sort level
  Signature deep;
  SortId d0 = deep.add_sort("d0");
  SortId d1 = deep.add_sort("d1");
  SortId d2 = deep.add_sort("d2");
  deep.add_function({"c", {}, d0});
  deep.add_function({"g", {d0, d0}, d1});
  deep.add_function({"h", {d1}, d2});
  auto t2 = enumerate_ground_terms(deep, d2);
  REQUIRE(t2.size() == 1);
  Term cc = Term::constant("c", d0);
  CHECK(t2[0] == Term::app("h", {Term::app("g", {cc, cc}, d1)}, d2));

  // the integer universe is the declared zero-ary constants
  Signature withint;
  SortId r = withint.add_sort("r");
  withint.add_function({"lo", {}, Signature::kInt});
  withint.add_function({"hi", {}, Signature::kInt});
  withint.add_function({"probe", {Signature::kInt}, r});
  withint.add_function({"idle", {}, r});
  auto tr = enumerate_ground_terms(withint, r);
  CHECK(tr.size() == 3);  // idle, probe(hi), probe(lo)

  // non-stratified signatures are rejected
  Signature loop;
  SortId sl = loop.add_sort("s");
  loop.add_function({"c", {}, sl});
  loop.add_function({"f", {sl}, sl});
  CHECK_THROWS_AS(enumerate_ground_terms(loop, sl), std::invalid_argument);
}

TEST_CASE("integer subterms of integer terms") {
  // normalize never manufactures a non-integer subterm inside "+"
  Term a = Term::constant("a", Signature::kInt);
  Term t = add_offset(a, 5);
  REQUIRE(t.is_app());
  for (const Term& arg : t.args()) CHECK(arg.sort() == Signature::kInt);
}
