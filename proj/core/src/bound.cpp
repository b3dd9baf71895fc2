#include "zground/bound.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace zground {

std::vector<Term> BoundSet::extended() const {
  std::vector<Term> out = base;
  out.push_back(escape);
  return out;
}

bool BoundSet::contains(const Term& t) const {
  Term n = normalize_numerals(t);
  return std::binary_search(base.begin(), base.end(), n, TermLess());
}

namespace {

struct Collector {
  std::map<Term, std::string, TermLess> terms;

  void add(const Term& t, const std::string& rule) {
    Term n = normalize_numerals(t);
    auto [it, inserted] = terms.emplace(n, rule);
    if (!inserted && it->second.find(rule) == std::string::npos)
      it->second += "," + rule;
  }
};

void for_each_subterm(const Term& t,
                      const std::function<void(const Term&)>& fn) {
  fn(t);
  if (t.is_app())
    for (const Term& a : t.args()) for_each_subterm(a, fn);
}

}  // namespace

BoundSet compute_bound(Problem& problem, BoundMode mode, FreshNames& fresh) {
  Collector col;
  for (std::size_t ci = 0; ci < problem.clauses.size(); ++ci) {
    const ZClause& c = problem.clauses[ci];
    auto targets = grounding_targets(c);

    // Upper bounds: x <= t with x a variable.
    for (const Atom& a : c.constraints) {
      if (a.kind != AtomKind::Leq || !a.lhs.is_var()) continue;
      const Term& bound = a.rhs;
      if (bound.is_var()) continue;
      if (bound.is_ground()) {
        col.add(bound, "upper-bound");
        continue;
      }
      if (mode == BoundMode::Arrays)
        throw std::invalid_argument(
            "clause " + std::to_string(ci) +
            ": compound non-ground upper bound in arrays mode: " + a.str());
      // Generic mode: complete variable positions independently through the
      // grounding abstraction atoms; skip if some variable is ungroundable.
      std::map<std::string, SortId> vars;
      std::vector<std::string> names;
      {
        std::function<void(const Term&)> collect = [&](const Term& t) {
          if (t.is_var() && !vars.count(t.head())) {
            vars.emplace(t.head(), t.sort());
            names.push_back(t.head());
          }
          if (t.is_app())
            for (const Term& arg : t.args()) collect(arg);
        };
        collect(bound);
      }
      bool groundable = std::all_of(names.begin(), names.end(),
                                    [&](const std::string& n) {
                                      auto it = targets.find(n);
                                      return it != targets.end() &&
                                             !it->second.empty();
                                    });
      if (!groundable) continue;
      std::vector<std::size_t> idx(names.size(), 0);
      bool done = false;
      while (!done) {
        Substitution s;
        for (std::size_t i = 0; i < names.size(); ++i)
          s.set(names[i], targets[names[i]][idx[i]]);
        col.add(apply_substitution(bound, s), "upper-bound-completion");
        done = true;
        for (std::size_t pos = idx.size(); pos-- > 0;) {
          if (++idx[pos] < targets[names[pos]].size()) {
            done = false;
            break;
          }
          idx[pos] = 0;
        }
      }
    }

    if (mode != BoundMode::Arrays) continue;

    // Read indices: every select occurrence in the clause body.
    auto read_indices = [&](const Term& root) {
      for_each_subterm(root, [&](const Term& t) {
        if (!t.is_app() || t.head() != "select" || t.args().size() != 2)
          return;
        const Term& idx = t.args()[1];
        if (idx.is_ground()) {
          col.add(idx, "read-index");
        } else if (idx.is_var()) {
          auto it = targets.find(idx.head());
          if (it != targets.end())
            for (const Term& g : it->second) col.add(g, "read-index");
        } else {
          throw std::invalid_argument(
              "clause " + std::to_string(ci) +
              ": non-ground compound select index: " + idx.str());
        }
      });
    };
    // Write indices: the index of a store term that is itself a side of an
    // equality atom, grounded through the abstraction atoms, with its
    // predecessor.
    auto write_index = [&](const Term& side) {
      if (!side.is_app() || side.head() != "store" || side.args().size() != 3)
        return;
      const Term& idx = side.args()[1];
      std::vector<Term> grounded;
      if (idx.is_ground()) {
        grounded.push_back(normalize_numerals(idx));
      } else if (idx.is_var()) {
        auto it = targets.find(idx.head());
        if (it != targets.end()) grounded = it->second;
      } else {
        throw std::invalid_argument(
            "clause " + std::to_string(ci) +
            ": non-ground compound store index: " + idx.str());
      }
      for (const Term& g : grounded) {
        col.add(g, "write-index");
        col.add(add_offset(g, -1), "write-index-predecessor");
      }
    };
    auto body_atom = [&](const Atom& a) {
      read_indices(a.lhs);
      if (a.kind != AtomKind::InImage) read_indices(a.rhs);
      if (a.kind == AtomKind::Eq) {
        write_index(a.lhs);
        write_index(a.rhs);
      }
    };
    for (const Atom& a : c.antecedent) body_atom(a);
    for (const Atom& a : c.succedent) body_atom(a);
  }

  BoundSet out;
  for (const auto& [t, rule] : col.terms) {
    out.base.push_back(t);
    out.provenance.emplace(t, rule);
  }
  std::string chi = fresh.fresh_const(problem.sig, "chi");
  problem.sig.add_function({chi, {}, Signature::kInt});
  out.escape = Term::constant(chi, Signature::kInt);
  out.provenance.emplace(out.escape, "escape");
  return out;
}

BoundSet minimize_bound(const BoundSet& b, const Problem& problem) {
  std::map<Term, Term, TermLess> parent;
  std::function<Term(Term)> find = [&](Term t) {
    auto it = parent.find(t);
    if (it == parent.end() || it->second == t) return t;
    Term root = find(it->second);
    parent[t] = root;
    return root;
  };
  auto unite = [&](const Term& a, const Term& b2) {
    Term ra = find(a), rb = find(b2);
    if (ra == rb) return;
    // Keep the canonically smaller term as the class representative.
    if (Term::compare(ra, rb) < 0)
      parent[rb] = ra;
    else
      parent[ra] = rb;
  };
  for (const auto& [l, r] : problem.unit_int_equalities)
    unite(normalize_numerals(l), normalize_numerals(r));

  BoundSet out;
  out.escape = b.escape;
  std::map<Term, std::vector<Term>, TermLess> classes;
  for (const Term& t : b.base) classes[find(t)].push_back(t);
  for (const auto& [rep, members] : classes) {
    // The representative may be a term outside the base (from an equality);
    // keep the smallest base member of the class.
    Term keep = members.front();
    out.base.push_back(keep);
    std::string prov;
    auto it = b.provenance.find(keep);
    if (it != b.provenance.end()) prov = it->second;
    for (const Term& m : members) {
      if (m == keep) continue;
      prov += (prov.empty() ? "" : ",");
      prov += "merged:" + m.str();
    }
    out.provenance.emplace(keep, prov);
  }
  std::sort(out.base.begin(), out.base.end(), TermLess());
  out.provenance.emplace(out.escape, "escape");
  return out;
}

}  // namespace zground
