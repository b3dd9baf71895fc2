#include "zground/schemes.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zground/instantiate.hpp"

namespace zground {

namespace {

void for_each_subterm(const Term& t,
                      const std::function<void(const Term&)>& fn) {
  fn(t);
  if (t.is_app())
    for (const Term& a : t.args()) for_each_subterm(a, fn);
}

void for_each_body_term(const ZClause& c,
                        const std::function<void(const Term&)>& fn) {
  for (const std::vector<Atom>* part : {&c.antecedent, &c.succedent}) {
    for (const Atom& a : *part) {
      for_each_subterm(a.lhs, fn);
      if (a.kind != AtomKind::InImage) for_each_subterm(a.rhs, fn);
    }
  }
}

bool is_store(const Term& t) {
  return t.is_app() && t.head() == "store" && t.args().size() == 3;
}
bool is_select(const Term& t) {
  return t.is_app() && t.head() == "select" && t.args().size() == 2;
}

std::map<std::string, SortId> occurring_var_sorts(const ZClause& c) {
  std::map<std::string, SortId> out;
  auto collect = [&](const Term& t) {
    if (t.is_var()) out.emplace(t.head(), t.sort());
  };
  for (const Atom& a : c.constraints) {
    for_each_subterm(a.lhs, collect);
    if (a.kind != AtomKind::InImage) for_each_subterm(a.rhs, collect);
  }
  for_each_body_term(c, collect);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Array axiom instances
// ---------------------------------------------------------------------------

namespace {

struct StoreContext {
  Term array;
  Term index;  // ground
  Term elem;
};

bool context_less(const StoreContext& a, const StoreContext& b) {
  if (int c = Term::compare(a.array, b.array)) return c < 0;
  if (int c = Term::compare(a.index, b.index)) return c < 0;
  return Term::compare(a.elem, b.elem) < 0;
}
bool context_eq(const StoreContext& a, const StoreContext& b) {
  return a.array == b.array && a.index == b.index && a.elem == b.elem;
}

}  // namespace

std::vector<ZClause> ground_array_axioms(const Problem& problem,
                                         const BoundSet& bound) {
  std::vector<StoreContext> contexts;
  for (const ZClause& c : problem.clauses) {
    auto targets = grounding_targets(c);
    for_each_body_term(c, [&](const Term& t) {
      if (!is_store(t)) return;
      const Term& arr = t.args()[0];
      const Term& idx = t.args()[1];
      const Term& elem = t.args()[2];
      if (!arr.is_ground() || !elem.is_ground())
        throw std::invalid_argument(
            "store with a non-ground array or element argument: " + t.str());
      std::vector<Term> ground_indices;
      if (idx.is_ground()) {
        ground_indices.push_back(normalize_numerals(idx));
      } else if (idx.is_var()) {
        auto it = targets.find(idx.head());
        if (it == targets.end() || it->second.empty())
          throw std::invalid_argument(
              "store index has no grounding abstraction atom: " + t.str());
        ground_indices = it->second;
      } else {
        throw std::invalid_argument("non-ground compound store index: " +
                                    t.str());
      }
      for (const Term& g : ground_indices)
        contexts.push_back({normalize_numerals(arr), g,
                            normalize_numerals(elem)});
    });
  }
  std::sort(contexts.begin(), contexts.end(), context_less);
  contexts.erase(std::unique(contexts.begin(), contexts.end(), context_eq),
                 contexts.end());
  if (contexts.empty()) return {};

  const FunDecl* sel = problem.sig.function("select");
  if (!sel || sel->args.size() != 2)
    throw std::invalid_argument(
        "array axioms need a declared select(Array, Int) function");
  const SortId elem_sort = sel->range;

  const std::string var_name = problem.sig.fresh_symbol("x");
  const std::vector<Term> ext = bound.extended();

  std::vector<ZClause> out;
  std::size_t ctx_no = 0;
  for (const StoreContext& cx : contexts) {
    const Term x = Term::var(var_name, Signature::kInt);
    const Term written =
        Term::app("store", {cx.array, x, cx.elem}, cx.array.sort());
    const std::string tag = std::to_string(ctx_no++);

    auto emit = [&](std::vector<Atom> constraints, Atom succ,
                    std::string origin) {
      ZClause c;
      c.vars.emplace(var_name, Signature::kInt);
      c.constraints = std::move(constraints);
      c.succedent.push_back(std::move(succ));
      c.origin = std::move(origin);
      SimplifiedClause s = simplify_clause(c, bound.escape);
      if (s.kept) out.push_back(std::move(s.clause));
    };

    emit({Atom::eq(x, cx.index)},
         Atom::eq(Term::app("select", {written, x}, elem_sort), cx.elem),
         "axiom:read-hit:" + tag);
    for (const Term& s : ext)
      emit({Atom::eq(x, cx.index), Atom::leq(s, add_offset(x, -1))},
           Atom::eq(Term::app("select", {written, s}, elem_sort),
                    Term::app("select", {cx.array, s}, elem_sort)),
           "axiom:read-low:" + tag + ":" + s.str());
    for (const Term& s : ext)
      emit({Atom::eq(x, cx.index), Atom::leq(add_offset(x, 1), s)},
           Atom::eq(Term::app("select", {written, s}, elem_sort),
                    Term::app("select", {cx.array, s}, elem_sort)),
           "axiom:read-high:" + tag + ":" + s.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stratified enumeration
// ---------------------------------------------------------------------------

std::vector<ZClause> ground_stratified(Problem& problem, FreshNames& fresh,
                                       std::size_t instance_cap) {
  StratificationResult strat = stratification_levels(problem.sig);
  if (!strat.ok)
    throw std::invalid_argument(
        "enumeration needs a stratified signature; found a sort cycle");

  // Witness repair in level order: a lower repair can populate higher sorts.
  std::set<SortId> needed;
  for (const ZClause& c : problem.clauses)
    for (const auto& [name, sort] : occurring_var_sorts(c)) {
      (void)name;
      needed.insert(sort);
    }
  std::vector<SortId> order(needed.begin(), needed.end());
  std::sort(order.begin(), order.end(), [&](SortId a, SortId b) {
    unsigned la = strat.levels.at(a), lb = strat.levels.at(b);
    return la != lb ? la < lb : a < b;
  });
  for (SortId s : order) {
    if (enumerate_ground_terms(problem.sig, s).empty()) {
      std::string w = fresh.fresh_const(problem.sig, "w");
      problem.sig.add_function({w, {}, s});
    }
  }
  std::map<SortId, std::vector<Term>> universe;
  for (SortId s : order)
    universe.emplace(s, enumerate_ground_terms(problem.sig, s));

  std::vector<ZClause> out;
  for (const ZClause& c : problem.clauses) {
    const auto vars = occurring_var_sorts(c);  // name order
    std::size_t count = 1;
    for (const auto& [name, sort] : vars) {
      (void)name;
      const std::size_t n = universe.at(sort).size();
      if (count > instance_cap / (n ? n : 1))
        throw std::runtime_error(
            "enumeration instance cap exceeded on clause " + c.str());
      count *= n;
    }
    if (out.size() + count > instance_cap)
      throw std::runtime_error("enumeration instance cap exceeded");

    std::vector<std::pair<std::string, const std::vector<Term>*>> doms;
    for (const auto& [name, sort] : vars)
      doms.emplace_back(name, &universe.at(sort));

    for (std::size_t ordinal = 0; ordinal < count; ++ordinal) {
      Substitution sub;
      std::size_t rest = ordinal;
      for (std::size_t i = doms.size(); i-- > 0;) {
        const auto& [name, dom] = doms[i];
        sub.set(name, (*dom)[rest % dom->size()]);
        rest /= dom->size();
      }
      ZClause inst;
      inst.origin = c.origin.empty() ? ("/enum:" + std::to_string(ordinal))
                                     : (c.origin + "/enum:" +
                                        std::to_string(ordinal));
      auto apply = [&](const std::vector<Atom>& from, std::vector<Atom>& to) {
        for (const Atom& a : from)
          to.push_back(normalize_numerals(apply_substitution(a, sub)));
      };
      apply(c.constraints, inst.constraints);
      apply(c.antecedent, inst.antecedent);
      apply(c.succedent, inst.succedent);
      out.push_back(std::move(inst));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Image-atom elimination
// ---------------------------------------------------------------------------

namespace {

const FunDecl& image_fun(const Signature& sig, const Atom& a) {
  const FunDecl* f = sig.function(a.fn);
  if (!f)
    throw std::invalid_argument("image atom over undeclared function: " +
                                a.fn);
  if (f->range == Signature::kInt)
    throw std::invalid_argument(
        "image atom over an integer-ranged function: " + a.fn);
  return *f;
}

/// Declared functions sharing f's exact profile, in name order.
std::vector<const FunDecl*> profile_mates(const Signature& sig,
                                          const FunDecl& f) {
  std::vector<const FunDecl*> out;
  for (const auto& [name, g] : sig.functions()) {
    (void)name;
    if (g.args == f.args && g.range == f.range) out.push_back(&g);
  }
  return out;
}

std::vector<Term> fresh_var_tuple(ZClause& clause, const Signature& sig,
                                  FreshNames& fresh,
                                  const std::vector<SortId>& sorts) {
  std::vector<Term> vars;
  for (SortId s : sorts) {
    std::string name = fresh.fresh_var(clause, sig);
    clause.vars.emplace(name, s);
    vars.push_back(Term::var(name, s));
  }
  return vars;
}

void expand_succedent_images(ZClause clause, const Signature& sig,
                             FreshNames& fresh, std::vector<ZClause>& out) {
  std::size_t pos = clause.succedent.size();
  for (std::size_t i = 0; i < clause.succedent.size(); ++i)
    if (clause.succedent[i].kind == AtomKind::InImage) {
      pos = i;
      break;
    }
  if (pos == clause.succedent.size()) {
    out.push_back(std::move(clause));
    return;
  }
  const Atom atom = clause.succedent[pos];
  const FunDecl& f = image_fun(sig, atom);
  const Term& t = atom.lhs;

  if (t.is_var()) {
    for (const FunDecl* g : profile_mates(sig, f)) {
      if (g->name == f.name) continue;  // the equality branch is a tautology
      ZClause branch = clause;
      std::vector<Term> ys = fresh_var_tuple(branch, sig, fresh, g->args);
      branch.antecedent.push_back(
          Atom::eq(t, Term::app(g->name, ys, g->range)));
      branch.succedent[pos] = Atom::eq(Term::app(g->name, ys, g->range),
                                       Term::app(f.name, ys, f.range));
      expand_succedent_images(std::move(branch), sig, fresh, out);
    }
    return;
  }
  if (t.is_app()) {
    const FunDecl* g = sig.function(t.head());
    if (!g || g->args != f.args || g->range != f.range)
      throw std::invalid_argument(
          "image argument head does not share the image function's profile: " +
          atom.str());
    if (g->name == f.name) return;  // f(args) in image of f: tautology
    ZClause rewritten = std::move(clause);
    rewritten.succedent[pos] =
        Atom::eq(t, Term::app(f.name, t.args(), f.range));
    expand_succedent_images(std::move(rewritten), sig, fresh, out);
    return;
  }
  throw std::invalid_argument("numeral in an image atom: " + atom.str());
}

}  // namespace

Problem transform_st2(const Problem& problem, FreshNames& fresh) {
  Problem out = problem;
  out.clauses.clear();
  for (const ZClause& input : problem.clauses) {
    ZClause c = input;
    for (Atom& a : c.antecedent) {
      if (a.kind != AtomKind::InImage) continue;
      const FunDecl& f = image_fun(problem.sig, a);
      std::vector<Term> xs = fresh_var_tuple(c, problem.sig, fresh, f.args);
      a = Atom::eq(a.lhs, Term::app(f.name, xs, f.range));
    }
    expand_succedent_images(std::move(c), problem.sig, fresh, out.clauses);
  }
  return out;
}

std::vector<ZClause> st2_injectivity_axioms(const Problem& problem,
                                            FreshNames& fresh) {
  std::set<std::string> image_funs;
  for (const ZClause& c : problem.clauses)
    for (const Atom* a : c.all_atoms())
      if (a->kind == AtomKind::InImage) image_funs.insert(a->fn);

  std::vector<ZClause> out;
  for (const std::string& fname : image_funs) {
    const FunDecl* f = problem.sig.function(fname);
    if (!f)
      throw std::invalid_argument("image atom over undeclared function: " +
                                  fname);
    if (f->args.empty()) continue;
    for (const auto& [gname, g] : problem.sig.functions()) {
      if (g.range != f->range) continue;
      if (g.args != f->args)
        throw std::invalid_argument(
            "function " + gname + " shares the range of image function " +
            fname + " but not its profile");
      ZClause proto;
      std::vector<Term> xs =
          fresh_var_tuple(proto, problem.sig, fresh, f->args);
      std::vector<Term> ys =
          fresh_var_tuple(proto, problem.sig, fresh, g.args);
      const Term fx = Term::app(f->name, xs, f->range);
      const Term gy = Term::app(gname, ys, g.range);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        auto clauses = normalize_into_zclauses(
            proto.vars, {}, {Literal{Atom::eq(fx, gy), false}},
            {Literal{Atom::eq(xs[i], ys[i]), false}}, problem.sig,
            "inj:" + fname + ":" + gname + ":" + std::to_string(i));
        out.insert(out.end(), clauses.begin(), clauses.end());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baseline index set
// ---------------------------------------------------------------------------

std::vector<Term> bradley_index_set(const Problem& problem) {
  std::set<Term, TermLess> index;
  std::set<Term, TermLess> uppers;
  std::set<Term, TermLess> occurring;

  for (const ZClause& c : problem.clauses) {
    for (const Atom* a : c.all_atoms()) {
      for_each_subterm(a->lhs, [&](const Term& t) {
        occurring.insert(normalize_numerals(t));
      });
      if (a->kind != AtomKind::InImage)
        for_each_subterm(a->rhs, [&](const Term& t) {
          occurring.insert(normalize_numerals(t));
        });
    }
  }

  for (const ZClause& c : problem.clauses) {
    const auto targets = grounding_targets(c);
    std::set<std::string> index_vars;
    for_each_body_term(c, [&](const Term& t) {
      if (is_select(t) && t.args()[1].is_var())
        index_vars.insert(t.args()[1].head());
      if (is_store(t) && t.args()[1].is_var())
        index_vars.insert(t.args()[1].head());
    });

    // Bounds of index variables, both polarities.
    for (const Atom& a : c.constraints) {
      if (a.kind != AtomKind::Leq) continue;
      if (a.lhs.is_var() && index_vars.count(a.lhs.head()) &&
          !a.rhs.is_var()) {
        Term b = normalize_numerals(a.rhs);
        if (b.is_ground()) {
          index.insert(b);
          uppers.insert(b);
        }
      }
      if (a.rhs.is_var() && index_vars.count(a.rhs.head()) &&
          !a.lhs.is_var()) {
        Term b = normalize_numerals(a.lhs);
        if (b.is_ground()) index.insert(b);
      }
    }

    // Select indices, read through grounding atoms.
    for_each_body_term(c, [&](const Term& t) {
      if (!is_select(t)) return;
      const Term& idx = t.args()[1];
      if (idx.is_ground()) {
        index.insert(normalize_numerals(idx));
      } else if (idx.is_var()) {
        auto it = targets.find(idx.head());
        if (it != targets.end())
          for (const Term& g : it->second) index.insert(g);
      }
    });

    // Write indices with both neighbours.
    for (const std::vector<Atom>* part : {&c.antecedent, &c.succedent}) {
      for (const Atom& a : *part) {
        if (a.kind != AtomKind::Eq) continue;
        for (const Term* side : {&a.lhs, &a.rhs}) {
          if (!is_store(*side)) continue;
          const Term& idx = side->args()[1];
          std::vector<Term> ground_indices;
          if (idx.is_ground()) {
            ground_indices.push_back(normalize_numerals(idx));
          } else if (idx.is_var()) {
            auto it = targets.find(idx.head());
            if (it != targets.end()) ground_indices = it->second;
          }
          for (const Term& g : ground_indices) {
            index.insert(add_offset(g, -1));
            index.insert(g);
            index.insert(add_offset(g, 1));
          }
        }
      }
    }
  }

  // Successors of upper bounds that the problem itself mentions.
  for (const Term& u : uppers) {
    Term succ = add_offset(u, 1);
    if (occurring.count(succ)) index.insert(succ);
  }

  return {index.begin(), index.end()};
}

// ---------------------------------------------------------------------------
// Instance statistics
// ---------------------------------------------------------------------------

InstanceStats count_instances(const Problem& problem, const BoundSet& bound,
                              const std::vector<Term>& baseline_index) {
  InstanceStats st;
  st.input_clauses = problem.clauses.size();
  st.bound_size = bound.base.size();
  st.extended_size = bound.extended().size();
  st.baseline_index_size = baseline_index.size();

  const Int ext_size = static_cast<unsigned>(st.extended_size);
  const Int idx_size = static_cast<unsigned>(st.baseline_index_size);

  for (const ZClause& c : problem.clauses) {
    const VarClassification cls = classify(c);
    std::size_t int_vars = 0;
    for (const auto& [name, sort] : occurring_var_sorts(c))
      if (sort == Signature::kInt) {
        (void)name;
        ++int_vars;
      }
    Int ours = 1;
    for (std::size_t i = 0; i < cls.inequality.size(); ++i) ours *= ext_size;
    Int baseline = 1;
    for (std::size_t i = 0; i < int_vars; ++i) baseline *= idx_size;
    st.per_clause_ours.emplace_back(c.origin, ours);
    st.per_clause_baseline.emplace_back(c.origin, baseline);
    st.ours_total += ours;
    st.baseline_total += baseline;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Admissibility probe
// ---------------------------------------------------------------------------

namespace {

bool match_pattern(const Term& pattern, const Term& t,
                   std::map<std::string, Term>& binds) {
  if (pattern.is_var()) {
    if (pattern.sort() != t.sort()) return false;
    auto [it, inserted] = binds.emplace(pattern.head(), t);
    return inserted || it->second == t;
  }
  if (pattern.is_num()) return t.is_num() && pattern.value() == t.value();
  if (!t.is_app() || t.head() != pattern.head() ||
      t.args().size() != pattern.args().size())
    return false;
  for (std::size_t i = 0; i < t.args().size(); ++i)
    if (!match_pattern(pattern.args()[i], t.args()[i], binds)) return false;
  return true;
}

/// Non-variable terms something in the probe's scope could instantiate to.
std::vector<Term> probe_pattern_terms(const Problem& sample,
                                      bool arrays_patterns) {
  std::vector<Term> out;
  for (const ZClause& c : sample.clauses)
    for (const Atom* a : c.all_atoms()) {
      for_each_subterm(a->lhs, [&](const Term& t) {
        if (!t.is_var()) out.push_back(t);
      });
      if (a->kind != AtomKind::InImage)
        for_each_subterm(a->rhs, [&](const Term& t) {
          if (!t.is_var()) out.push_back(t);
        });
    }
  if (arrays_patterns && sample.sig.has_function("select")) {
    const FunDecl& sel = *sample.sig.function("select");
    if (sel.args.size() == 2) {
      const SortId arr = sel.args[0], elem = sel.range;
      const Term x = Term::var("#arr", arr), v = Term::var("#elem", elem);
      const Term z = Term::var("#i", Signature::kInt);
      const Term w = Term::var("#j", Signature::kInt);
      const Term st = Term::app("store", {x, z, v}, arr);
      for (const Term& t : {Term::app("select", {st, z}, elem),
                            Term::app("select", {st, w}, elem),
                            Term::app("select", {x, w}, elem), st})
        for_each_subterm(t, [&](const Term& s) {
          if (!s.is_var()) out.push_back(s);
        });
    }
  }
  return out;
}

void require_disconnected(const Term& t, const std::vector<Term>& patterns) {
  for (const Term& p : patterns) {
    std::map<std::string, Term> binds;
    if (match_pattern(p, t, binds) && !(p == t))
      throw std::invalid_argument("term " + t.str() +
                                  " is not disconnected: it matches " +
                                  p.str());
  }
}

std::set<std::string> clause_strings(const std::vector<ZClause>& clauses) {
  std::set<std::string> out;
  for (const ZClause& c : clauses) out.insert(c.str());
  return out;
}

}  // namespace

AdmissibilityResult admissibility_probe(const SchemeFn& gamma,
                                        const Problem& sample, const Term& t,
                                        const Term& s,
                                        const ZClause* extra_clause,
                                        bool arrays_patterns) {
  if (t.sort() == Signature::kInt || s.sort() != t.sort())
    throw std::invalid_argument(
        "probe terms must share a non-integer sort");
  if (!t.is_ground() || !s.is_ground())
    throw std::invalid_argument("probe terms must be ground");
  const auto patterns = probe_pattern_terms(sample, arrays_patterns);
  require_disconnected(t, patterns);
  require_disconnected(s, patterns);

  AdmissibilityResult res;
  const std::vector<ZClause> g0 = gamma(sample);
  for (const ZClause& c : g0)
    // ground up to grounding abstraction atoms, matching what the emitter
    // accepts
    if (!inline_grounding_atoms(c).is_ground()) {
      res.pass = false;
      res.detail = "non-ground output clause: " + c.str();
      return res;
    }
  const std::set<std::string> set0 = clause_strings(g0);

  if (extra_clause) {
    Problem larger = sample;
    larger.clauses.push_back(*extra_clause);
    const std::set<std::string> set1 = clause_strings(gamma(larger));
    for (const std::string& k : set0)
      if (!set1.count(k)) {
        res.pass = false;
        res.detail = "monotonicity violated; output clause lost: " + k;
        return res;
      }
  }

  ZClause unit;
  unit.succedent.push_back(Atom::eq(t, s));
  unit.origin = "probe-unit";
  Problem extended = sample;
  extended.clauses.push_back(unit);
  const std::set<std::string> got = clause_strings(gamma(extended));
  std::set<std::string> expected = set0;
  expected.insert(unit.str());
  if (got != expected) {
    res.pass = false;
    for (const std::string& k : got)
      if (!expected.count(k)) {
        res.detail = "equation transparency violated; extra clause: " + k;
        return res;
      }
    for (const std::string& k : expected)
      if (!got.count(k)) {
        res.detail = "equation transparency violated; missing clause: " + k;
        return res;
      }
  }
  return res;
}

AdmissibilityResult admissibility_probe(SchemeKind scheme,
                                        const Problem& sample, const Term& t,
                                        const Term& s,
                                        const ZClause* extra_clause) {
  if (scheme == SchemeKind::Stratified) {
    SchemeFn gamma = [](const Problem& p) {
      Problem copy = p;
      FreshNames fresh;
      return ground_stratified(copy, fresh);
    };
    return admissibility_probe(gamma, sample, t, s, extra_clause, false);
  }
  SchemeFn gamma = [](const Problem& p) {
    Problem copy = p;
    FreshNames fresh;
    BoundSet bound = compute_bound(copy, BoundMode::Arrays, fresh);
    std::vector<ZClause> out = copy.clauses;
    std::vector<ZClause> axioms = ground_array_axioms(copy, bound);
    out.insert(out.end(), axioms.begin(), axioms.end());
    return out;
  };
  return admissibility_probe(gamma, sample, t, s, extra_clause, true);
}

}  // namespace zground
