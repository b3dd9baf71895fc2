#include "zground/groundsolve.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "euf.hpp"

namespace zground {

std::string ground_verdict_name(GroundVerdict v) {
  switch (v) {
    case GroundVerdict::Sat:
      return "sat";
    case GroundVerdict::Unsat:
      return "unsat";
    case GroundVerdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

using internal::Euf;
using internal::Tri;

struct Unsupported {
  std::string what;
};

long long to_ll(const Int& v) {
  static const Int lim = std::numeric_limits<long long>::max() / 4;
  if (v > lim || v < -lim)
    throw Unsupported{"numeral out of the supported range: " + v.str()};
  return static_cast<long long>(v);
}

/// Supported integer terms: numeral or constant+offset (node 0 is the zero
/// reference for numerals).
struct IntShape {
  int node = 0;  // 0 = zero reference, >0 = integer constant
  long long offset = 0;
};

struct Solver {
  const GroundProblem& g;
  GroundSolveOptions opt;
  Solver(const GroundProblem& g_, GroundSolveOptions opt_) : g(g_), opt(opt_) {}
  long long steps = 0;
  bool out_of_budget = false;
  bool spend(long long n = 1) {
    steps += n;
    if (steps > opt.budget) {
      out_of_budget = true;
      return false;
    }
    return true;
  }

  // Integer constants (node 0 reserved for the zero reference).
  std::vector<std::string> const_names{""};
  std::map<std::string, int> const_ids;

  int const_id(const std::string& name) {
    auto it = const_ids.find(name);
    if (it != const_ids.end()) return it->second;
    int id = static_cast<int>(const_names.size());
    const_names.push_back(name);
    const_ids.emplace(name, id);
    return id;
  }

  IntShape int_shape(const Term& t) {
    auto of = as_offset_form(normalize_numerals(t));
    if (!of) throw Unsupported{"unsupported integer term: " + t.str()};
    IntShape s;
    s.offset = to_ll(of->offset);
    if (of->base.valid()) {
      const Term& b = of->base;
      if (!b.is_app() || !b.args().empty())
        throw Unsupported{"integer term headed by a non-constant function: " +
                          t.str()};
      s.node = const_id(b.head());
    }
    return s;
  }

  // Atoms.
  enum class Kind { Bound, IntEq, Equal };
  struct AtomInfo {
    Kind kind = Kind::Equal;
    Atom atom;          // normalized
    IntShape l, r;      // Bound / IntEq
    Term tl, tr;        // Equal (non-integer equality)
  };
  std::vector<AtomInfo> atoms;
  std::map<std::string, int> atom_ids;

  using Lit = std::pair<int, bool>;  // atom, phase
  std::vector<std::vector<Lit>> clauses;

  // Integer terms occurring inside equality atoms; collision candidates.
  std::vector<Term> shared_terms;
  std::vector<IntShape> shared_shapes;
  std::map<std::string, int> shared_ids;
  std::set<std::pair<int, int>> split_pairs;

  void note_shared(const Term& t) {
    Term n = normalize_numerals(t);
    std::string key = n.str();
    if (shared_ids.count(key)) return;
    shared_ids.emplace(key, static_cast<int>(shared_terms.size()));
    shared_terms.push_back(n);
    shared_shapes.push_back(int_shape(n));
  }
  void collect_shared(const Term& t) {
    if (t.sort() == Signature::kInt) {
      note_shared(t);
      return;
    }
    if (t.is_app())
      for (const Term& a : t.args()) collect_shared(a);
  }

  int intern_atom(const Atom& a) {
    Atom n = a;
    n.lhs = normalize_numerals(n.lhs);
    if (n.kind != AtomKind::InImage) n.rhs = normalize_numerals(n.rhs);
    std::string key = n.str();
    auto it = atom_ids.find(key);
    if (it != atom_ids.end()) return it->second;

    AtomInfo info;
    info.atom = n;
    if (n.kind == AtomKind::InImage)
      throw Unsupported{"image atom in a ground problem: " + n.str()};
    if (n.kind == AtomKind::Leq) {
      info.kind = Kind::Bound;
      info.l = int_shape(n.lhs);
      info.r = int_shape(n.rhs);
    } else if (n.lhs.sort() == Signature::kInt) {
      info.kind = Kind::IntEq;
      info.l = int_shape(n.lhs);
      info.r = int_shape(n.rhs);
    } else {
      info.kind = Kind::Equal;
      info.tl = n.lhs;
      info.tr = n.rhs;
      collect_shared(n.lhs);
      collect_shared(n.rhs);
    }
    int id = static_cast<int>(atoms.size());
    atoms.push_back(std::move(info));
    atom_ids.emplace(key, id);

    if (atoms[static_cast<std::size_t>(id)].kind == Kind::IntEq) {
      // eq <-> (lhs <= rhs and rhs <= lhs), compiled as three clauses so the
      // difference solver only ever sees bounds. Copy the sides: the
      // recursive interning below may reallocate `atoms`.
      Term el = atoms[static_cast<std::size_t>(id)].atom.lhs;
      Term er = atoms[static_cast<std::size_t>(id)].atom.rhs;
      int le_st = intern_atom(Atom::leq(el, er));
      int le_ts = intern_atom(Atom::leq(er, el));
      clauses.push_back({{id, false}, {le_st, true}});
      clauses.push_back({{id, false}, {le_ts, true}});
      clauses.push_back({{id, true}, {le_st, false}, {le_ts, false}});
    }
    return id;
  }

  std::vector<int> equal_atom_ids;

  void compile() {
    for (const ZClause& c : g.clauses) {
      if (!c.is_ground())
        throw Unsupported{"clause with variables in a ground problem: " +
                          c.str()};
      std::vector<Lit> lits;
      for (const Atom& a : c.constraints) lits.emplace_back(intern_atom(a), false);
      for (const Atom& a : c.antecedent) lits.emplace_back(intern_atom(a), false);
      for (const Atom& a : c.succedent) lits.emplace_back(intern_atom(a), true);
      clauses.push_back(std::move(lits));
    }
    // Order splits only add integer atoms, so this stays valid across restarts.
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i].kind == Kind::Equal)
        equal_atom_ids.push_back(static_cast<int>(i));
  }

  // -------------------------------------------------------------------------
  // Difference constraints
  // -------------------------------------------------------------------------

  struct Edge {
    int from, to;
    long long w;  // val[to] <= val[from] + w
  };

  /// Edges from the currently assigned bound atoms.
  std::vector<Edge> assigned_edges(const std::vector<signed char>& assign) const {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const AtomInfo& a = atoms[i];
      if (a.kind != Kind::Bound || assign[i] < 0) continue;
      if (assign[i] == 1)  // l <= r : val[l.node] - val[r.node] <= ro - lo
        edges.push_back({a.r.node, a.l.node, a.r.offset - a.l.offset});
      else  // not (l <= r) : r + 1 <= l
        edges.push_back({a.l.node, a.r.node, a.l.offset - a.r.offset - 1});
    }
    return edges;
  }

  /// Bellman-Ford feasibility; fills `dist` (a satisfying assignment,
  /// shifted so the zero reference is 0) when feasible.
  bool feasible(const std::vector<Edge>& edges,
                std::vector<long long>* dist_out = nullptr) const {
    std::size_t n = const_names.size();
    std::vector<long long> dist(n, 0);
    for (std::size_t round = 0; round <= n; ++round) {
      bool relaxed = false;
      for (const Edge& e : edges) {
        long long cand = dist[static_cast<std::size_t>(e.from)] + e.w;
        if (cand < dist[static_cast<std::size_t>(e.to)]) {
          dist[static_cast<std::size_t>(e.to)] = cand;
          relaxed = true;
        }
      }
      if (!relaxed) {
        if (dist_out) {
          long long zero = dist[0];
          for (long long& d : dist) d -= zero;
          *dist_out = std::move(dist);
        }
        return true;
      }
    }
    return false;
  }

  long long eval_shape(const IntShape& s,
                       const std::vector<long long>& vals) const {
    return vals[static_cast<std::size_t>(s.node)] + s.offset;
  }

  /// Is s = t forced by the assigned bounds? (Both strict orders infeasible.)
  bool entailed_eq(const IntShape& s, const IntShape& t,
                   std::vector<Edge> edges) const {
    edges.push_back({t.node, s.node, t.offset - s.offset - 1});  // s <= t-1
    bool lt = feasible(edges);
    edges.back() = {s.node, t.node, s.offset - t.offset - 1};  // t <= s-1
    bool gt = feasible(edges);
    return !lt && !gt;
  }

  // -------------------------------------------------------------------------
  // Equality reasoning
  // -------------------------------------------------------------------------

  Euf::NodeId node_symbolic(Euf& euf, const Term& t) const {
    if (t.sort() == Signature::kInt)
      return euf.leaf(normalize_numerals(t).str(), Signature::kInt, false);
    std::vector<Euf::NodeId> args;
    for (const Term& a : t.args()) args.push_back(node_symbolic(euf, a));
    return euf.app(t.head(), std::move(args), t.sort());
  }

  Euf::NodeId node_concrete(Euf& euf, const Term& t,
                            const std::vector<long long>& vals) {
    if (t.sort() == Signature::kInt) {
      long long v = eval_shape(int_shape(t), vals);
      return euf.leaf(std::to_string(v), Signature::kInt, true);
    }
    std::vector<Euf::NodeId> args;
    for (const Term& a : t.args()) args.push_back(node_concrete(euf, a, vals));
    return euf.app(t.head(), std::move(args), t.sort());
  }

  bool euf_consistent(const std::vector<signed char>& assign,
                      bool concrete, const std::vector<long long>& vals) {
    Euf euf;
    if (g.has_arrays)
      euf.enable_arrays([&euf](Euf::NodeId a, Euf::NodeId b) {
        if (euf.same(a, b)) return Tri::True;
        if (euf.node(a).rigid && euf.node(b).rigid) return Tri::False;
        return Tri::Unknown;
      });
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const AtomInfo& a = atoms[i];
      if (a.kind != Kind::Equal || assign[i] < 0) continue;
      Euf::NodeId l, r;
      if (concrete) {
        l = node_concrete(euf, a.tl, vals);
        r = node_concrete(euf, a.tr, vals);
      } else {
        l = node_symbolic(euf, a.tl);
        r = node_symbolic(euf, a.tr);
      }
      bool ok = assign[i] == 1 ? euf.merge(l, r) : euf.assert_diseq(l, r);
      if (!ok) return false;
      if (!spend(4)) return false;
    }
    return euf.propagate();
  }

  // -------------------------------------------------------------------------
  // DPLL
  // -------------------------------------------------------------------------

  std::vector<signed char> assign;
  std::vector<int> trail;
  struct Decision {
    int atom;
    bool first_phase;
    bool flipped;
    std::size_t trail_mark;
  };
  std::vector<Decision> decisions;
  long long decision_count = 0;
  std::optional<std::pair<int, int>> collision;

  void set_atom(int a, bool v) {
    assign[static_cast<std::size_t>(a)] = v ? 1 : 0;
    trail.push_back(a);
  }
  void undo_to(std::size_t mark) {
    while (trail.size() > mark) {
      assign[static_cast<std::size_t>(trail.back())] = -1;
      trail.pop_back();
    }
  }

  /// Unit propagation to fixpoint followed by a theory consistency check;
  /// false on conflict.
  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      if (!spend()) return false;
      for (const auto& cl : clauses) {
        int unassigned = -1;
        bool sat = false;
        int free_count = 0;
        for (const Lit& l : cl) {
          signed char v = assign[static_cast<std::size_t>(l.first)];
          if (v < 0) {
            ++free_count;
            unassigned = l.first;
            if (free_count > 1) break;
          } else if ((v == 1) == l.second) {
            sat = true;
            break;
          }
        }
        if (sat) continue;
        if (free_count == 0) return false;  // clause falsified
        if (free_count == 1) {
          bool phase = false;
          for (const Lit& l : cl)
            if (l.first == unassigned) {
              phase = l.second;
              break;
            }
          set_atom(unassigned, phase);
          changed = true;
        }
      }
    }
    if (!feasible(assigned_edges(assign))) return false;
    // The congruence check is the expensive part; skip it when the set of
    // asserted equality literals is the same one already found consistent.
    unsigned long long sig = 1469598103934665603ULL;
    for (int id : equal_atom_ids) {
      signed char v = assign[static_cast<std::size_t>(id)];
      if (v >= 0)
        sig = (sig * 1099511628211ULL) ^
              static_cast<unsigned long long>(id * 2 + v);
    }
    if (sig == last_euf_sig) return true;
    if (!euf_consistent(assign, false, {})) return false;
    last_euf_sig = sig;
    return true;
  }

  unsigned long long last_euf_sig = 0;

  /// A literal from the first clause that is neither satisfied nor fully
  /// assigned. Once every clause is satisfied the remaining atoms are
  /// don't-cares and the branch only needs theory certification.
  std::optional<Lit> pick() const {
    for (const auto& cl : clauses) {
      const Lit* free_lit = nullptr;
      bool sat = false;
      for (const Lit& l : cl) {
        signed char v = assign[static_cast<std::size_t>(l.first)];
        if (v < 0) {
          if (!free_lit) free_lit = &l;
        } else if ((v == 1) == l.second) {
          sat = true;
          break;
        }
      }
      if (!sat && free_lit) return *free_lit;
    }
    return std::nullopt;
  }

  enum class Status { Sat, Unsat, Unknown, Restart };

  Status final_check() {
    std::vector<long long> vals;
    if (!feasible(assigned_edges(assign), &vals))
      return Status::Unsat;  // cannot happen: propagate just checked
    if (euf_consistent(assign, true, vals)) return Status::Sat;
    if (out_of_budget) return Status::Unknown;
    // The concrete certification failed. If two integer terms merely
    // collided (equal values without being forced equal), split their order
    // explicitly and restart; otherwise the branch is genuinely inconsistent.
    std::vector<Edge> edges = assigned_edges(assign);
    for (std::size_t i = 0; i < shared_shapes.size(); ++i)
      for (std::size_t j = i + 1; j < shared_shapes.size(); ++j) {
        if (eval_shape(shared_shapes[i], vals) !=
            eval_shape(shared_shapes[j], vals))
          continue;
        auto key = std::make_pair(static_cast<int>(i), static_cast<int>(j));
        if (split_pairs.count(key)) continue;
        if (entailed_eq(shared_shapes[i], shared_shapes[j], edges)) continue;
        collision = key;
        return Status::Restart;
      }
    return Status::Unsat;  // conflict forced by entailed equalities
  }

  bool backtrack() {
    while (!decisions.empty()) {
      Decision& d = decisions.back();
      if (!d.flipped) {
        undo_to(d.trail_mark);
        d.flipped = true;
        set_atom(d.atom, !d.first_phase);
        return true;
      }
      undo_to(d.trail_mark);
      decisions.pop_back();
    }
    return false;
  }

  Status run() {
    assign.assign(atoms.size(), -1);
    trail.clear();
    decisions.clear();
    collision.reset();
    last_euf_sig = 0;
    for (;;) {
      if (out_of_budget) return Status::Unknown;
      std::size_t mark = trail.size();
      bool ok = propagate();
      if (out_of_budget) return Status::Unknown;
      if (ok) {
        std::optional<Lit> next = pick();
        if (!next) {
          Status st = final_check();
          if (st != Status::Unsat) return st;
          ok = false;
        } else {
          ++decision_count;
          if (!spend()) return Status::Unknown;
          decisions.push_back({next->first, next->second, false, trail.size()});
          set_atom(next->first, next->second);
          continue;
        }
      }
      if (!ok) {
        undo_to(mark);  // drop units implied under the failed prefix
        if (!backtrack()) return Status::Unsat;
      }
    }
  }

  void add_split_lemma(int i, int j) {
    split_pairs.emplace(i, j);
    const Term& s = shared_terms[static_cast<std::size_t>(i)];
    const Term& t = shared_terms[static_cast<std::size_t>(j)];
    int lt = intern_atom(Atom::leq(s, add_offset(t, -1)));
    int gt = intern_atom(Atom::leq(t, add_offset(s, -1)));
    int eq = intern_atom(Atom::eq(s, t));
    clauses.push_back({{lt, true}, {gt, true}, {eq, true}});
  }
};

}  // namespace

GroundSolveResult decide_ground(const GroundProblem& g,
                                const GroundSolveOptions& opt) {
  GroundSolveResult res;
  Solver s{g, opt};
  try {
    s.compile();
    for (;;) {
      Solver::Status st = s.run();
      res.decisions = s.decision_count;
      switch (st) {
        case Solver::Status::Sat:
          res.verdict = GroundVerdict::Sat;
          return res;
        case Solver::Status::Unsat:
          res.verdict = GroundVerdict::Unsat;
          return res;
        case Solver::Status::Unknown:
          res.verdict = GroundVerdict::Unknown;
          res.note = "budget exhausted after " + std::to_string(s.steps) +
                     " steps";
          return res;
        case Solver::Status::Restart:
          s.add_split_lemma(s.collision->first, s.collision->second);
          break;
      }
    }
  } catch (const Unsupported& u) {
    res.verdict = GroundVerdict::Unknown;
    res.note = u.what;
    res.decisions = s.decision_count;
    return res;
  }
}

}  // namespace zground
