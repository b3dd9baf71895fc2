#include "zground/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace zground {

std::string verdict_name(BoundedVerdict v) {
  switch (v) {
    case BoundedVerdict::Sat:
      return "sat";
    case BoundedVerdict::UnsatWithinBound:
      return "unsat-within-bound";
    case BoundedVerdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

struct Unsupported {
  std::string what;
};

long long to_ll(const Int& v) {
  static const Int lim = std::numeric_limits<long long>::max() / 4;
  if (v > lim || v < -lim)
    throw Unsupported{"numeral out of the supported range: " + v.str()};
  return static_cast<long long>(v);
}

/// Integer terms the search supports: numeral, constant+offset, var+offset.
struct IntShape {
  enum Kind { Numeral, ConstOffset, VarOffset } kind = Numeral;
  std::string base;
  long long offset = 0;
};

IntShape int_shape(const Term& t) {
  auto of = as_offset_form(normalize_numerals(t));
  if (!of) throw Unsupported{"unsupported integer term: " + t.str()};
  if (!of->base.valid()) return {IntShape::Numeral, "", to_ll(of->offset)};
  const Term& b = of->base;
  if (b.is_var()) return {IntShape::VarOffset, b.head(), to_ll(of->offset)};
  if (b.is_app() && b.args().empty())
    return {IntShape::ConstOffset, b.head(), to_ll(of->offset)};
  throw Unsupported{"integer term headed by a non-constant function: " +
                    t.str()};
}

void for_each_subterm(const Term& t,
                      const std::function<void(const Term&)>& fn) {
  fn(t);
  if (t.is_app())
    for (const Term& a : t.args()) for_each_subterm(a, fn);
}

void for_each_atom_term(const ZClause& c,
                        const std::function<void(const Term&)>& fn) {
  for (const Atom* a : c.all_atoms()) {
    for_each_subterm(a->lhs, fn);
    if (a->kind != AtomKind::InImage) for_each_subterm(a->rhs, fn);
  }
}

std::map<std::string, SortId> occurring_vars(const ZClause& c) {
  std::map<std::string, SortId> out;
  for_each_atom_term(c, [&](const Term& t) {
    if (t.is_var()) out.emplace(t.head(), t.sort());
  });
  return out;
}

// ---------------------------------------------------------------------------
// Congruence closure with an undo trail.
//
// Nodes are either integer value leaves (pairwise distinct by value) or
// applications; constants are zero-argument applications. Read-over-write
// reasoning rewrites select(store(A,i,e), j) by comparing the index values,
// which are always value leaves here. Every mutation is logged so the
// depth-first search can roll back to any checkpoint.
// ---------------------------------------------------------------------------

class CC {
 public:
  struct Node {
    int head = -1;  // index into head_names_; -1 for value leaves
    std::vector<int> args;
    SortId sort = 0;
    bool is_value = false;
    long long value = 0;
  };

  long long* steps = nullptr;  // shared search-effort counter

  int intern_head(const std::string& name) {
    auto it = head_ids_.find(name);
    if (it != head_ids_.end()) return it->second;
    int id = static_cast<int>(head_names_.size());
    head_names_.push_back(name);
    head_ids_.emplace(name, id);
    return id;
  }
  const std::string& head_name(int id) const {
    return head_names_[static_cast<std::size_t>(id)];
  }
  void set_array_heads(int select_head, int store_head) {
    select_head_ = select_head;
    store_head_ = store_head;
  }

  int find(int n) const {
    while (parent_[static_cast<std::size_t>(n)] != n)
      n = parent_[static_cast<std::size_t>(n)];
    return n;
  }

  int value_node(long long v) {
    auto it = value_table_.find(v);
    if (it != value_table_.end()) return it->second;
    int id = push_node();
    Node& nd = nodes_[static_cast<std::size_t>(id)];
    nd.is_value = true;
    nd.value = v;
    nd.sort = Signature::kInt;
    has_val_[static_cast<std::size_t>(id)] = 1;
    root_val_[static_cast<std::size_t>(id)] = v;
    value_table_.emplace(v, id);
    trail_.push_back({Op::ValueIns, id, v, 0});
    return id;
  }

  /// Interns an application up to congruence; may trigger array rewriting.
  /// Returns the node id; call `ok()` afterwards (creation can expose a
  /// conflict through the rewrite queue only via a following merge, so app
  /// itself never fails).
  int app(int head, std::vector<int> args, SortId sort) {
    if (steps) ++*steps;
    long long h = signature_hash(head, args);
    if (int ex = congruent_in_bucket(h, head, args); ex >= 0) return ex;
    int id = push_node();
    Node& nd = nodes_[static_cast<std::size_t>(id)];
    nd.head = head;
    nd.args = std::move(args);
    nd.sort = sort;
    sig_[static_cast<std::size_t>(id)] = h;
    sig_table_[h].push_back(id);
    trail_.push_back({Op::SigInsert, id, h, 0});
    for (int a : nodes_[static_cast<std::size_t>(id)].args) {
      int r = find(a);
      trail_.push_back({Op::UsesLen, r,
                        static_cast<long long>(uses_[static_cast<std::size_t>(r)].size()), 0});
      uses_[static_cast<std::size_t>(r)].push_back(id);
    }
    if (head == select_head_ &&
        nodes_[static_cast<std::size_t>(id)].args.size() == 2) {
      int r = find(nodes_[static_cast<std::size_t>(id)].args[0]);
      trail_.push_back({Op::ReadsLen, r,
                        static_cast<long long>(reads_[static_cast<std::size_t>(r)].size()), 0});
      reads_[static_cast<std::size_t>(r)].push_back(id);
      for (int w : stores_[static_cast<std::size_t>(r)])
        pairs_.emplace_back(id, w);
    }
    if (head == store_head_ &&
        nodes_[static_cast<std::size_t>(id)].args.size() == 3) {
      int r = find(id);
      trail_.push_back({Op::StoresLen, r,
                        static_cast<long long>(stores_[static_cast<std::size_t>(r)].size()), 0});
      stores_[static_cast<std::size_t>(r)].push_back(id);
      for (int s : reads_[static_cast<std::size_t>(r)])
        pairs_.emplace_back(s, id);
    }
    return id;
  }

  bool assert_eq(int a, int b) {
    queue_.emplace_back(a, b);
    return process();
  }
  bool assert_diseq(int a, int b) {
    trail_.push_back({Op::Diseq, 0, 0, 0});
    diseqs_.emplace_back(a, b);
    if (find(a) == find(b)) return false;
    return process();
  }
  /// Drains pending rewrites (e.g. after a batch of app creations).
  bool settle() { return process(); }

  std::size_t checkpoint() const { return trail_.size(); }

  void rollback(std::size_t mark) {
    while (trail_.size() > mark) {
      const TR t = trail_.back();
      trail_.pop_back();
      switch (t.op) {
        case Op::Union:
          parent_[static_cast<std::size_t>(t.a)] = t.a;
          rnk_[static_cast<std::size_t>(t.b)] -=
              static_cast<int>(t.c);
          break;
        case Op::UsesLen:
          uses_[static_cast<std::size_t>(t.a)].resize(
              static_cast<std::size_t>(t.b));
          break;
        case Op::StoresLen:
          stores_[static_cast<std::size_t>(t.a)].resize(
              static_cast<std::size_t>(t.b));
          break;
        case Op::ReadsLen:
          reads_[static_cast<std::size_t>(t.a)].resize(
              static_cast<std::size_t>(t.b));
          break;
        case Op::SigSet:
          sig_[static_cast<std::size_t>(t.a)] = t.b;
          break;
        case Op::SigErase:
          sig_table_[t.b].push_back(t.a);
          break;
        case Op::SigInsert:
          bucket_remove(t.b, t.a);
          break;
        case Op::Diseq:
          diseqs_.pop_back();
          break;
        case Op::ValueIns:
          value_table_.erase(t.b);
          break;
        case Op::RootVal:
          has_val_[static_cast<std::size_t>(t.a)] = static_cast<char>(t.b);
          root_val_[static_cast<std::size_t>(t.a)] = t.c;
          break;
        case Op::NodeCount: {
          auto n = static_cast<std::size_t>(t.a);
          nodes_.resize(n);
          parent_.resize(n);
          rnk_.resize(n);
          uses_.resize(n);
          stores_.resize(n);
          reads_.resize(n);
          sig_.resize(n);
          has_val_.resize(n);
          root_val_.resize(n);
          break;
        }
      }
    }
    queue_.clear();
    pairs_.clear();
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(int n) const { return nodes_[static_cast<std::size_t>(n)]; }
  bool root_has_value(int root) const {
    return has_val_[static_cast<std::size_t>(root)] != 0;
  }
  long long root_value(int root) const {
    return root_val_[static_cast<std::size_t>(root)];
  }

 private:
  enum class Op : std::uint8_t {
    Union,
    UsesLen,
    StoresLen,
    ReadsLen,
    SigSet,
    SigErase,
    SigInsert,
    Diseq,
    ValueIns,
    RootVal,
    NodeCount
  };
  struct TR {
    Op op;
    int a;
    long long b;
    long long c;
  };

  std::vector<Node> nodes_;
  std::vector<int> parent_, rnk_;
  std::vector<std::vector<int>> uses_, stores_, reads_;
  std::vector<long long> sig_;
  std::vector<char> has_val_;
  std::vector<long long> root_val_;
  std::unordered_map<long long, std::vector<int>> sig_table_;
  std::unordered_map<long long, int> value_table_;
  std::vector<std::pair<int, int>> diseqs_;
  std::vector<std::pair<int, int>> queue_;  // pending merges
  std::vector<std::pair<int, int>> pairs_;  // pending select/store checks
  std::vector<TR> trail_;
  std::vector<std::string> head_names_;
  std::map<std::string, int> head_ids_;
  int select_head_ = -1, store_head_ = -1;

  int push_node() {
    int id = static_cast<int>(nodes_.size());
    trail_.push_back({Op::NodeCount, id, 0, 0});
    nodes_.emplace_back();
    parent_.push_back(id);
    rnk_.push_back(0);
    uses_.emplace_back();
    stores_.emplace_back();
    reads_.emplace_back();
    sig_.push_back(0);
    has_val_.push_back(0);
    root_val_.push_back(0);
    return id;
  }

  long long signature_hash(int head, const std::vector<int>& args) const {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(head);
    for (int a : args) {
      h ^= static_cast<std::uint64_t>(find(a)) + 0x9e3779b97f4a7c15ull +
           (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<long long>(h >> 1);  // keep it positive
  }

  int congruent_in_bucket(long long h, int head,
                          const std::vector<int>& args) const {
    auto it = sig_table_.find(h);
    if (it == sig_table_.end()) return -1;
    for (int cand : it->second) {
      const Node& cn = nodes_[static_cast<std::size_t>(cand)];
      if (cn.head != head || cn.args.size() != args.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < args.size(); ++i)
        if (find(cn.args[i]) != find(args[i])) {
          same = false;
          break;
        }
      if (same) return cand;
    }
    return -1;
  }

  void bucket_remove(long long h, int id) {
    auto it = sig_table_.find(h);
    if (it == sig_table_.end()) return;
    auto& v = it->second;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == id) {
        v[i] = v.back();
        v.pop_back();
        break;
      }
  }

  bool do_union(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    if (steps) ++*steps;
    if (has_val_[static_cast<std::size_t>(a)] &&
        has_val_[static_cast<std::size_t>(b)] &&
        root_val_[static_cast<std::size_t>(a)] !=
            root_val_[static_cast<std::size_t>(b)])
      return false;
    if (rnk_[static_cast<std::size_t>(a)] > rnk_[static_cast<std::size_t>(b)])
      std::swap(a, b);
    int bump = rnk_[static_cast<std::size_t>(a)] ==
                       rnk_[static_cast<std::size_t>(b)]
                   ? 1
                   : 0;
    trail_.push_back({Op::Union, a, b, bump});
    parent_[static_cast<std::size_t>(a)] = b;
    rnk_[static_cast<std::size_t>(b)] += bump;
    if (has_val_[static_cast<std::size_t>(a)] &&
        !has_val_[static_cast<std::size_t>(b)]) {
      trail_.push_back({Op::RootVal, b, 0, 0});
      has_val_[static_cast<std::size_t>(b)] = 1;
      root_val_[static_cast<std::size_t>(b)] =
          root_val_[static_cast<std::size_t>(a)];
    }
    // Array pairs crossing the merge.
    for (int s : reads_[static_cast<std::size_t>(a)])
      for (int w : stores_[static_cast<std::size_t>(b)])
        pairs_.emplace_back(s, w);
    for (int s : reads_[static_cast<std::size_t>(b)])
      for (int w : stores_[static_cast<std::size_t>(a)])
        pairs_.emplace_back(s, w);
    // Re-sign the absorbed class's parents (congruence detection).
    for (int p : uses_[static_cast<std::size_t>(a)]) {
      long long old = sig_[static_cast<std::size_t>(p)];
      bucket_remove(old, p);
      trail_.push_back({Op::SigErase, p, old, 0});
      const Node& pn = nodes_[static_cast<std::size_t>(p)];
      long long nh = signature_hash(pn.head, pn.args);
      sig_[static_cast<std::size_t>(p)] = nh;
      trail_.push_back({Op::SigSet, p, old, 0});
      if (int ex = congruent_in_bucket(nh, pn.head, pn.args);
          ex >= 0 && ex != p)
        queue_.emplace_back(p, ex);
      sig_table_[nh].push_back(p);
      trail_.push_back({Op::SigInsert, p, nh, 0});
    }
    // Merge bookkeeping lists into the surviving root.
    auto absorb = [&](std::vector<std::vector<int>>& lists, Op op) {
      trail_.push_back({op, b,
                        static_cast<long long>(lists[static_cast<std::size_t>(b)].size()), 0});
      auto& dst = lists[static_cast<std::size_t>(b)];
      const auto& src = lists[static_cast<std::size_t>(a)];
      dst.insert(dst.end(), src.begin(), src.end());
    };
    absorb(uses_, Op::UsesLen);
    absorb(stores_, Op::StoresLen);
    absorb(reads_, Op::ReadsLen);
    return true;
  }

  bool handle_pair(int s, int w) {
    const Node& sn = nodes_[static_cast<std::size_t>(s)];
    const Node& wn = nodes_[static_cast<std::size_t>(w)];
    if (sn.args.size() != 2 || wn.args.size() != 3) return true;
    if (find(sn.args[0]) != find(w)) return true;  // stale pair
    int ir = find(sn.args[1]);
    int jr = find(wn.args[1]);
    if (!has_val_[static_cast<std::size_t>(ir)] ||
        !has_val_[static_cast<std::size_t>(jr)])
      return true;  // indices not valued; skip (sound: fewer inferences)
    if (root_val_[static_cast<std::size_t>(ir)] ==
        root_val_[static_cast<std::size_t>(jr)]) {
      queue_.emplace_back(s, wn.args[2]);
    } else {
      int inner = app(nodes_[static_cast<std::size_t>(s)].head,
                      {wn.args[0], sn.args[1]}, sn.sort);
      queue_.emplace_back(s, inner);
    }
    return true;
  }

  bool process() {
    while (!queue_.empty() || !pairs_.empty()) {
      if (!queue_.empty()) {
        auto [a, b] = queue_.back();
        queue_.pop_back();
        if (!do_union(a, b)) {
          queue_.clear();
          pairs_.clear();
          return false;
        }
        continue;
      }
      auto [s, w] = pairs_.back();
      pairs_.pop_back();
      handle_pair(s, w);
    }
    for (const auto& [a, b] : diseqs_)
      if (find(a) == find(b)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Clause programs: clauses precompiled against the constant/variable tables
// so instance generation does plain integer arithmetic (no term walking).
// ---------------------------------------------------------------------------

struct Operand {
  enum Kind { Num, Const, Var } kind = Num;
  int index = 0;  // constant index or variable slot
  long long offset = 0;
};

struct AtomProg {
  AtomKind kind = AtomKind::Leq;  // Leq or Eq over integers
  Operand lhs, rhs;
};

/// A term template; integer positions hold operands, non-integer variables
/// hold carrier slots, everything else is an application skeleton.
struct TT {
  bool is_int = false;
  Operand op;          // when is_int
  int carrier_slot = -1;  // when a non-integer variable
  int head = -1;
  SortId sort = 0;
  std::vector<TT> args;
};

struct LitProg {
  bool positive = false;  // succedent literal
  bool in_image = false;
  AtomKind akind = AtomKind::Eq;
  const FunDecl* image_fn = nullptr;
  TT lhs, rhs;  // rhs unused for in_image
};

struct ClauseProg {
  std::vector<AtomProg> lambda;
  std::vector<LitProg> lits;
  int int_var_count = 0;
  std::vector<SortId> carrier_sorts;  // per carrier slot
  int trigger = -1;                   // DFS depth that completes the clause
  bool pure = false;                  // constraint-only clause
  const ZClause* source = nullptr;
};

// One pending disjunctive instance for the leaf-level search.
struct Option {
  std::vector<std::pair<int, int>> eqs;
  std::vector<std::pair<int, int>> diseqs;
};
using Instance = std::vector<Option>;

// ---------------------------------------------------------------------------
// Search state
// ---------------------------------------------------------------------------

struct Search {
  const Problem& problem;
  OracleOptions opt;
  bool arrays = false;

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

  // Integer constants in first-occurrence order.
  std::vector<std::string> consts;
  std::map<std::string, int> const_index;
  std::vector<long long> value;
  std::vector<char> assigned;

  // Interval machinery extracted from ground single-constraint clauses
  // <atom ||->, i.e. the negation of the atom.
  struct DiffCon {
    int lhs, rhs;
    long long k;  // value[lhs] <= value[rhs] + k
  };
  std::vector<DiffCon> diffs;
  std::vector<long long> abs_lo, abs_hi;
  struct Neq {
    int lhs, rhs;
    long long delta;  // value[lhs] != value[rhs] + delta
  };
  std::vector<Neq> neqs;
  std::vector<std::pair<int, long long>> abs_neqs;  // value[i] != k
  bool trivially_unsat = false;

  // Non-integer carriers: seed ground terms per sort, canonical order.
  std::map<SortId, std::vector<Term>> carriers;

  std::vector<ClauseProg> programs;
  std::vector<std::vector<int>> triggers;  // per depth 0..C-1; [C] = root(-1)

  CC cc;
  int select_head = -1;
  std::vector<Instance> pending;

  // Carrier node lists, built lazily at the final trigger level.
  std::map<SortId, std::vector<int>> carrier_nodes;

  bool found = false;
  BoundedModel model;

  explicit Search(const Problem& p, const OracleOptions& o)
      : problem(p), opt(o) {
    cc.steps = &steps;
  }

  int intern_const(const std::string& name) {
    auto it = const_index.find(name);
    if (it != const_index.end()) return it->second;
    int id = static_cast<int>(consts.size());
    consts.push_back(name);
    const_index.emplace(name, id);
    value.push_back(0);
    assigned.push_back(0);
    abs_lo.push_back(-opt.radius);
    abs_hi.push_back(opt.radius);
    return id;
  }

  void scan_problem();
  void extract_unit(const ZClause& c);
  void compile_clauses();

  enum class Status { Exhausted, Sat, Abort };
  Status run();
  Status dfs(std::size_t depth);
  Status dpll(const std::vector<std::size_t>& order, std::size_t i);
  bool process_trigger(const ClauseProg& prog);
  int instantiate(const TT& t, const std::vector<long long>& ivals,
                  const std::vector<int>& cnodes);
  const std::vector<int>& carrier_node_list(SortId sort);
  int node_of_ground(const Term& t);

  long long eval_operand(const Operand& o,
                          const std::vector<long long>& ivals) const {
    switch (o.kind) {
      case Operand::Num:
        return o.offset;
      case Operand::Const:
        return value[static_cast<std::size_t>(o.index)] + o.offset;
      case Operand::Var:
        return ivals[static_cast<std::size_t>(o.index)] + o.offset;
    }
    return 0;
  }
  bool eval_atom(const AtomProg& a, const std::vector<long long>& ivals) const {
    long long l = eval_operand(a.lhs, ivals);
    long long r = eval_operand(a.rhs, ivals);
    return a.kind == AtomKind::Leq ? l <= r : l == r;
  }

  void decode();
};

void Search::scan_problem() {
  for (const ZClause& c : problem.clauses) {
    for_each_atom_term(c, [&](const Term& t) {
      if (t.sort() == Signature::kInt) {
        if (t.is_app() && t.args().empty()) intern_const(t.head());
        if (t.is_app() && !t.args().empty() && t.head() != "+" &&
            t.head() != "-")
          throw Unsupported{"integer-valued function application: " + t.str()};
      } else if (t.is_ground()) {
        carriers[t.sort()].push_back(t);
      }
    });
  }
  for (auto& [sort, terms] : carriers) {
    (void)sort;
    std::sort(terms.begin(), terms.end(), TermLess{});
    terms.erase(std::unique(terms.begin(), terms.end(),
                            [](const Term& a, const Term& b) { return a == b; }),
                terms.end());
  }
  // Sorts quantified or used as image domains need a nonempty carrier.
  std::set<SortId> needed;
  for (const ZClause& c : problem.clauses) {
    for (const auto& [name, sort] : occurring_vars(c)) {
      (void)name;
      if (sort != Signature::kInt) needed.insert(sort);
    }
    for (const Atom* a : c.all_atoms())
      if (a->kind == AtomKind::InImage) {
        const FunDecl* f = problem.sig.function(a->fn);
        if (!f)
          throw Unsupported{"image atom over undeclared function: " + a->fn};
        for (SortId s : f->args)
          if (s != Signature::kInt) needed.insert(s);
      }
  }
  if (arrays && problem.sig.has_function("select")) {
    const FunDecl& sel = *problem.sig.function("select");
    if (sel.args.size() == 2) needed.insert(sel.range);
  }
  unsigned w = 0;
  for (SortId s : needed)
    if (carriers[s].empty()) {
      std::string name;
      do {
        name = "witness" + std::to_string(w++);
      } while (problem.sig.has_function(name) || problem.sig.has_sort(name));
      carriers[s].push_back(Term::constant(name, s));
    }
}

void Search::extract_unit(const ZClause& c) {
  const Atom& a = c.constraints.front();
  IntShape l = int_shape(a.lhs), r = int_shape(a.rhs);
  auto idx = [&](const IntShape& s) { return const_index.at(s.base); };
  if (a.kind == AtomKind::Leq) {
    // Clause asserts NOT (lhs <= rhs), i.e. rhs + 1 <= lhs.
    if (l.kind == IntShape::ConstOffset && r.kind == IntShape::ConstOffset) {
      diffs.push_back({idx(r), idx(l), l.offset - r.offset - 1});
    } else if (l.kind == IntShape::ConstOffset && r.kind == IntShape::Numeral) {
      auto i = static_cast<std::size_t>(idx(l));
      abs_lo[i] = std::max(abs_lo[i], r.offset + 1 - l.offset);
    } else if (l.kind == IntShape::Numeral && r.kind == IntShape::ConstOffset) {
      auto i = static_cast<std::size_t>(idx(r));
      abs_hi[i] = std::min(abs_hi[i], l.offset - 1 - r.offset);
    } else {  // numeral vs numeral
      if (l.offset <= r.offset) trivially_unsat = true;
    }
  } else {  // Eq: clause asserts lhs != rhs
    if (l.kind == IntShape::ConstOffset && r.kind == IntShape::ConstOffset) {
      neqs.push_back({idx(l), idx(r), r.offset - l.offset});
    } else if (l.kind == IntShape::ConstOffset && r.kind == IntShape::Numeral) {
      abs_neqs.emplace_back(idx(l), r.offset - l.offset);
    } else if (l.kind == IntShape::Numeral && r.kind == IntShape::ConstOffset) {
      abs_neqs.emplace_back(idx(r), l.offset - r.offset);
    } else {
      if (l.offset == r.offset) trivially_unsat = true;
    }
  }
}

void Search::compile_clauses() {
  select_head = cc.intern_head("select");
  cc.set_array_heads(arrays ? select_head : -1,
                     arrays ? cc.intern_head("store") : -1);

  triggers.assign(consts.size() + 1, {});
  const int root_bucket = static_cast<int>(consts.size());
  const int last_depth = static_cast<int>(consts.size()) - 1;

  for (const ZClause& c : problem.clauses) {
    if (c.antecedent.empty() && c.succedent.empty()) {
      if (c.constraints.empty()) {
        trivially_unsat = true;
        continue;
      }
      if (c.constraints.size() == 1 && c.is_ground()) {
        extract_unit(c);
        continue;
      }
    }

    ClauseProg prog;
    prog.source = &c;
    prog.pure = c.antecedent.empty() && c.succedent.empty();

    std::map<std::string, int> ivar_slots;
    std::map<std::string, int> cvar_slots;
    int max_const = -1;
    bool needs_leaf = false;

    auto operand_of = [&](const Term& t) -> Operand {
      IntShape s = int_shape(t);
      switch (s.kind) {
        case IntShape::Numeral:
          return {Operand::Num, 0, s.offset};
        case IntShape::ConstOffset: {
          int ci = const_index.at(s.base);
          max_const = std::max(max_const, ci);
          return {Operand::Const, ci, s.offset};
        }
        case IntShape::VarOffset: {
          auto [it, fresh] = ivar_slots.emplace(
              s.base, static_cast<int>(ivar_slots.size()));
          (void)fresh;
          return {Operand::Var, it->second, s.offset};
        }
      }
      return {};
    };

    std::function<TT(const Term&)> template_of = [&](const Term& t) -> TT {
      TT out;
      if (t.sort() == Signature::kInt) {
        out.is_int = true;
        out.sort = Signature::kInt;
        out.op = operand_of(t);
        return out;
      }
      if (t.is_var()) {
        auto [it, fresh] = cvar_slots.emplace(
            t.head(), static_cast<int>(cvar_slots.size()));
        if (fresh) {
          prog.carrier_sorts.push_back(t.sort());
          needs_leaf = true;
        }
        out.carrier_slot = it->second;
        out.sort = t.sort();
        return out;
      }
      out.head = cc.intern_head(t.head());
      out.sort = t.sort();
      for (const Term& a : t.args()) out.args.push_back(template_of(a));
      return out;
    };

    for (const Atom& a : c.constraints) {
      if (a.kind == AtomKind::InImage)
        throw Unsupported{"image atom in a constraint: " + a.str()};
      AtomProg ap;
      ap.kind = a.kind;
      ap.lhs = operand_of(a.lhs);
      ap.rhs = operand_of(a.rhs);
      prog.lambda.push_back(ap);
    }
    auto compile_lit = [&](const Atom& a, bool positive) {
      LitProg lp;
      lp.positive = positive;
      lp.akind = a.kind;
      if (a.kind == AtomKind::InImage) {
        lp.in_image = true;
        lp.image_fn = problem.sig.function(a.fn);
        if (!lp.image_fn)
          throw Unsupported{"image atom over undeclared function: " + a.fn};
        for (SortId s : lp.image_fn->args)
          if (s != Signature::kInt) needs_leaf = true;
        lp.lhs = template_of(a.lhs);
      } else if (is_arith_atom(a)) {
        // Arithmetic residual literal: compile as a pseudo-constraint and
        // evaluate during instance generation.
        lp.in_image = false;
        lp.image_fn = nullptr;
        lp.lhs = template_of(a.lhs);
        lp.rhs = template_of(a.rhs);
      } else {
        lp.lhs = template_of(a.lhs);
        lp.rhs = template_of(a.rhs);
      }
      prog.lits.push_back(std::move(lp));
    };
    for (const Atom& a : c.antecedent) compile_lit(a, false);
    for (const Atom& a : c.succedent) compile_lit(a, true);

    prog.int_var_count = static_cast<int>(ivar_slots.size());
    if (prog.pure)
      for (const auto& [name, slot] : cvar_slots) {
        (void)slot;
        throw Unsupported{"non-integer variable in a constraint: " + name};
      }

    int depth = needs_leaf ? last_depth : std::max(max_const, -1);
    if (depth < 0)
      triggers[static_cast<std::size_t>(root_bucket)].push_back(
          static_cast<int>(programs.size()));
    else
      triggers[static_cast<std::size_t>(depth)].push_back(
          static_cast<int>(programs.size()));
    prog.trigger = depth;
    programs.push_back(std::move(prog));
  }
}

int Search::node_of_ground(const Term& t) {
  if (t.sort() == Signature::kInt) {
    IntShape s = int_shape(t);
    long long v = s.offset;
    if (s.kind == IntShape::ConstOffset)
      v += value[static_cast<std::size_t>(const_index.at(s.base))];
    else if (s.kind == IntShape::VarOffset)
      throw Unsupported{"variable in a ground position: " + t.str()};
    return cc.value_node(v);
  }
  std::vector<int> args;
  for (const Term& a : t.args()) args.push_back(node_of_ground(a));
  return cc.app(cc.intern_head(t.head()), std::move(args), t.sort());
}

const std::vector<int>& Search::carrier_node_list(SortId sort) {
  auto it = carrier_nodes.find(sort);
  if (it != carrier_nodes.end()) return it->second;
  std::vector<int> nodes;
  for (const Term& t : carriers[sort]) nodes.push_back(node_of_ground(t));
  return carrier_nodes.emplace(sort, std::move(nodes)).first->second;
}

int Search::instantiate(const TT& t, const std::vector<long long>& ivals,
                        const std::vector<int>& cnodes) {
  if (t.is_int) return cc.value_node(eval_operand(t.op, ivals));
  if (t.carrier_slot >= 0)
    return cnodes[static_cast<std::size_t>(t.carrier_slot)];
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const TT& a : t.args) args.push_back(instantiate(a, ivals, cnodes));
  return cc.app(t.head, std::move(args), t.sort);
}

/// Evaluates an integer-sorted template (guaranteed by compile to be a plain
/// operand when is_int).
namespace {
inline bool tt_is_operand(const TT& t) { return t.is_int; }
}  // namespace

bool Search::process_trigger(const ClauseProg& prog) {
  const long long width = 2 * opt.radius + 1;
  long long combos = 1;
  for (int i = 0; i < prog.int_var_count; ++i) combos *= width;

  std::vector<long long> ivals(static_cast<std::size_t>(prog.int_var_count));
  std::vector<int> cnodes(prog.carrier_sorts.size());

  // Carrier assignments.
  long long ccombos = 1;
  std::vector<const std::vector<int>*> cdomains;
  for (SortId s : prog.carrier_sorts) {
    const auto& dom = carrier_node_list(s);
    if (dom.empty())
      throw Unsupported{"no carrier for a quantified sort"};
    cdomains.push_back(&dom);
    ccombos *= static_cast<long long>(dom.size());
  }

  for (long long io = 0; io < combos; ++io) {
    if (!spend()) return false;
    long long rest = io;
    for (int i = prog.int_var_count; i-- > 0;) {
      ivals[static_cast<std::size_t>(i)] = -opt.radius + (rest % width);
      rest /= width;
    }
    bool lambda_true = true;
    for (const AtomProg& a : prog.lambda)
      if (!eval_atom(a, ivals)) {
        lambda_true = false;
        break;
      }
    if (!lambda_true) continue;
    if (prog.pure) return false;  // a violating assignment exists

    for (long long co = 0; co < ccombos; ++co) {
      if (!spend()) return false;
      long long crest = co;
      for (std::size_t i = cdomains.size(); i-- > 0;) {
        const auto& dom = *cdomains[i];
        cnodes[i] = dom[static_cast<std::size_t>(
            crest % static_cast<long long>(dom.size()))];
        crest /= static_cast<long long>(dom.size());
      }

      Instance inst;
      bool satisfied = false;
      for (const LitProg& lp : prog.lits) {
        if (lp.in_image) {
          int target = instantiate(lp.lhs, ivals, cnodes);
          // Enumerate the image function's domain tuples.
          std::vector<std::vector<int>> tuples{{}};
          for (SortId s : lp.image_fn->args) {
            std::vector<int> choices;
            if (s == Signature::kInt) {
              for (long long v = -opt.radius; v <= opt.radius; ++v)
                choices.push_back(cc.value_node(v));
            } else {
              choices = carrier_node_list(s);
            }
            std::vector<std::vector<int>> next;
            next.reserve(tuples.size() * choices.size());
            for (const auto& tup : tuples)
              for (int ch : choices) {
                if (!spend()) return false;
                auto t2 = tup;
                t2.push_back(ch);
                next.push_back(std::move(t2));
              }
            tuples = std::move(next);
          }
          int fn_head = cc.intern_head(lp.image_fn->name);
          if (lp.positive) {
            for (const auto& tup : tuples) {
              Option o;
              o.eqs.emplace_back(cc.app(fn_head, tup, lp.image_fn->range),
                                 target);
              inst.push_back(std::move(o));
            }
          } else {
            Option o;
            for (const auto& tup : tuples)
              o.diseqs.emplace_back(cc.app(fn_head, tup, lp.image_fn->range),
                                    target);
            inst.push_back(std::move(o));
          }
          continue;
        }
        if (tt_is_operand(lp.lhs) && tt_is_operand(lp.rhs)) {
          // Arithmetic residual: evaluate outright. A true succedent or a
          // false antecedent atom satisfies the instance; other outcomes
          // contribute no option.
          long long l = eval_operand(lp.lhs.op, ivals);
          long long r = eval_operand(lp.rhs.op, ivals);
          bool truth = lp.akind == AtomKind::Leq ? l <= r : l == r;
          if (lp.positive ? truth : !truth) {
            satisfied = true;
            break;
          }
          continue;
        }
        int l = instantiate(lp.lhs, ivals, cnodes);
        int r = instantiate(lp.rhs, ivals, cnodes);
        Option o;
        if (lp.positive)
          o.eqs.emplace_back(l, r);
        else
          o.diseqs.emplace_back(l, r);
        inst.push_back(std::move(o));
      }
      if (!cc.settle()) return false;  // app creation exposed a conflict
      if (satisfied) continue;
      if (inst.empty()) return false;  // no way to satisfy this instance
      if (inst.size() == 1) {
        // Forced: a single option is a conjunction, apply it now.
        const Option& o = inst.front();
        for (const auto& [x, y] : o.eqs)
          if (!cc.assert_eq(x, y)) return false;
        for (const auto& [x, y] : o.diseqs)
          if (!cc.assert_diseq(x, y)) return false;
        continue;
      }
      pending.push_back(std::move(inst));
    }
  }
  return true;
}

Search::Status Search::dpll(const std::vector<std::size_t>& order,
                            std::size_t i) {
  if (!spend()) return Status::Abort;
  if (i == order.size()) {
    decode();
    return Status::Sat;
  }
  for (const Option& o : pending[order[i]]) {
    std::size_t mark = cc.checkpoint();
    bool ok = true;
    for (const auto& [x, y] : o.eqs)
      if (!cc.assert_eq(x, y)) {
        ok = false;
        break;
      }
    if (ok)
      for (const auto& [x, y] : o.diseqs)
        if (!cc.assert_diseq(x, y)) {
          ok = false;
          break;
        }
    if (ok) {
      Status st = dpll(order, i + 1);
      if (st != Status::Exhausted) return st;
    }
    cc.rollback(mark);
  }
  return Status::Exhausted;
}

Search::Status Search::dfs(std::size_t depth) {
  if (out_of_budget) return Status::Abort;
  if (depth == consts.size()) {
    // Cheapest instances first: deterministic, and near-units propagate
    // early. Sort an index view so the depth-scoped pending list (a stack
    // truncated on backtracking) keeps its push order.
    std::vector<std::size_t> order(pending.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return pending[a].size() < pending[b].size();
                     });
    return dpll(order, 0);
  }
  const int d = static_cast<int>(depth);
  const auto du = static_cast<std::size_t>(d);
  long long lo = abs_lo[du], hi = abs_hi[du];
  for (const DiffCon& dc : diffs) {
    if (dc.lhs == d && assigned[static_cast<std::size_t>(dc.rhs)])
      hi = std::min(hi, value[static_cast<std::size_t>(dc.rhs)] + dc.k);
    if (dc.rhs == d && assigned[static_cast<std::size_t>(dc.lhs)])
      lo = std::max(lo, value[static_cast<std::size_t>(dc.lhs)] - dc.k);
  }
  for (long long v = lo; v <= hi; ++v) {
    if (!spend()) return Status::Abort;
    bool blocked = false;
    for (const Neq& ne : neqs) {
      if (ne.lhs == d && assigned[static_cast<std::size_t>(ne.rhs)] &&
          v == value[static_cast<std::size_t>(ne.rhs)] + ne.delta)
        blocked = true;
      if (ne.rhs == d && assigned[static_cast<std::size_t>(ne.lhs)] &&
          value[static_cast<std::size_t>(ne.lhs)] == v + ne.delta)
        blocked = true;
    }
    for (const auto& [i, k] : abs_neqs)
      if (i == d && v == k) blocked = true;
    if (blocked) continue;

    value[du] = v;
    assigned[du] = 1;
    std::size_t mark = cc.checkpoint();
    std::size_t pend_mark = pending.size();
    auto carrier_mark = carrier_nodes;  // small map; leaf level only

    bool ok = true;
    for (int pi : triggers[du])
      if (!process_trigger(programs[static_cast<std::size_t>(pi)])) {
        ok = false;
        break;
      }
    if (ok && !out_of_budget) {
      Status st = dfs(depth + 1);
      if (st != Status::Exhausted) return st;
    }
    cc.rollback(mark);
    pending.resize(pend_mark);
    carrier_nodes = std::move(carrier_mark);
    assigned[du] = 0;
    if (out_of_budget) return Status::Abort;
  }
  return Status::Exhausted;
}

Search::Status Search::run() {
  if (trivially_unsat) return Status::Exhausted;
  const std::size_t root = consts.size();
  for (int pi : triggers[root])
    if (!process_trigger(programs[static_cast<std::size_t>(pi)]))
      return out_of_budget ? Status::Abort : Status::Exhausted;
  if (out_of_budget) return Status::Abort;
  return dfs(0);
}

// ---------------------------------------------------------------------------
// Model decoding
// ---------------------------------------------------------------------------

void Search::decode() {
  model = BoundedModel{};
  model.radius = opt.radius;
  for (std::size_t i = 0; i < consts.size(); ++i)
    model.integer_constants[consts[i]] = value[i];

  // Seed carrier terms need nodes so their classes can be read off.
  std::map<SortId, std::vector<int>> seed_nodes;
  for (const auto& [sort, terms] : carriers) {
    auto& v = seed_nodes[sort];
    for (const Term& t : terms) v.push_back(node_of_ground(t));
  }
  cc.settle();  // array rewrites for freshly created seed nodes

  // Structural rendering per node; class name = smallest member rendering.
  std::vector<std::string> strs(cc.size());
  for (std::size_t n = 0; n < cc.size(); ++n) {
    const CC::Node& nd = cc.node(static_cast<int>(n));
    if (nd.is_value) {
      strs[n] = std::to_string(nd.value);
    } else if (nd.args.empty()) {
      strs[n] = cc.head_name(nd.head);
    } else {
      std::string s = cc.head_name(nd.head) + "(";
      for (std::size_t i = 0; i < nd.args.size(); ++i) {
        if (i) s += ", ";
        s += strs[static_cast<std::size_t>(nd.args[i])];
      }
      s += ")";
      strs[n] = std::move(s);
    }
  }
  std::map<int, std::string> names;
  for (std::size_t n = 0; n < cc.size(); ++n) {
    int root = cc.find(static_cast<int>(n));
    auto it = names.find(root);
    if (it == names.end() || strs[n] < it->second) names[root] = strs[n];
  }
  auto class_name = [&](int n) {
    int root = cc.find(n);
    if (cc.root_has_value(root)) return std::to_string(cc.root_value(root));
    return names.at(root);
  };

  for (const auto& [sort, nodes] : seed_nodes) {
    std::set<std::string> classes;
    for (int n : nodes) classes.insert(class_name(n));
    model.carriers[problem.sig.sort_name(sort)] = {classes.begin(),
                                                   classes.end()};
  }

  for (std::size_t n = 0; n < cc.size(); ++n) {
    const CC::Node& nd = cc.node(static_cast<int>(n));
    if (nd.is_value || nd.head < 0) continue;
    std::vector<std::string> key;
    key.reserve(nd.args.size());
    for (int a : nd.args) key.push_back(class_name(a));
    model.tables[cc.head_name(nd.head)][key] = class_name(static_cast<int>(n));
  }

  // Totalize select over the box per array class, walking write chains.
  if (arrays && problem.sig.has_function("select")) {
    auto& sel_table = model.tables["select"];
    const auto store_it = model.tables.find("store");
    std::map<std::string, std::map<std::string, std::string>> reads;
    for (const auto& [key, val] : sel_table)
      if (key.size() == 2) reads[key[0]][key[1]] = val;
    std::map<std::string, std::vector<std::array<std::string, 3>>> writes;
    if (store_it != model.tables.end())
      for (const auto& [key, val] : store_it->second)
        if (key.size() == 3) writes[val].push_back({key[0], key[1], key[2]});

    const FunDecl& sel = *problem.sig.function("select");
    std::string default_elem;
    {
      auto it = model.carriers.find(problem.sig.sort_name(sel.range));
      if (it != model.carriers.end() && !it->second.empty())
        default_elem = it->second.front();
    }
    std::function<std::string(const std::string&, const std::string&,
                              std::set<std::string>&)>
        resolve = [&](const std::string& arr, const std::string& idx,
                      std::set<std::string>& seen) -> std::string {
      auto ri = reads.find(arr);
      if (ri != reads.end()) {
        auto ci = ri->second.find(idx);
        if (ci != ri->second.end()) return ci->second;
      }
      if (!seen.insert(arr).second) return default_elem;
      auto wi = writes.find(arr);
      if (wi != writes.end() && !wi->second.empty()) {
        const auto& w = wi->second.front();
        std::string v = w[1] == idx ? w[2] : resolve(w[0], idx, seen);
        reads[arr][idx] = v;
        return v;
      }
      reads[arr][idx] = default_elem;
      return default_elem;
    };
    std::set<std::string> array_classes;
    for (const auto& [arr, rows] : reads) {
      (void)rows;
      array_classes.insert(arr);
    }
    for (const auto& [res, rows] : writes) {
      array_classes.insert(res);
      for (const auto& w : rows) array_classes.insert(w[0]);
    }
    for (const std::string& arr : array_classes)
      for (long long v = -opt.radius; v <= opt.radius; ++v) {
        std::set<std::string> seen;
        resolve(arr, std::to_string(v), seen);
      }
    for (const auto& [arr, rows] : reads)
      for (const auto& [idx, val] : rows) sel_table[{arr, idx}] = val;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Independent model check
// ---------------------------------------------------------------------------

namespace {

struct Checker {
  const Problem& problem;
  const BoundedModel& model;
  bool arrays;
  std::string error;

  bool fail(const std::string& msg) {
    if (error.empty()) error = msg;
    return false;
  }

  struct Value {
    bool is_int = false;
    long long num = 0;
    std::string name;
    bool operator==(const Value& o) const {
      return is_int == o.is_int && (is_int ? num == o.num : name == o.name);
    }
    std::string key() const { return is_int ? std::to_string(num) : name; }
  };

  std::optional<Value> eval(const Term& t,
                            const std::map<std::string, Value>& env) {
    if (t.sort() == Signature::kInt) {
      auto of = as_offset_form(normalize_numerals(t));
      if (!of) {
        fail("unsupported integer term: " + t.str());
        return std::nullopt;
      }
      long long base = 0;
      if (of->base.valid()) {
        const Term& b = of->base;
        if (b.is_var()) {
          auto it = env.find(b.head());
          if (it == env.end() || !it->second.is_int) {
            fail("unbound integer variable " + b.head());
            return std::nullopt;
          }
          base = it->second.num;
        } else if (b.is_app() && b.args().empty()) {
          auto it = model.integer_constants.find(b.head());
          if (it == model.integer_constants.end()) {
            fail("missing integer constant " + b.head());
            return std::nullopt;
          }
          base = it->second;
        } else {
          fail("unsupported integer term: " + t.str());
          return std::nullopt;
        }
      }
      return Value{true, base + to_ll(of->offset), ""};
    }
    if (t.is_var()) {
      auto it = env.find(t.head());
      if (it == env.end()) {
        fail("unbound variable " + t.head());
        return std::nullopt;
      }
      return it->second;
    }
    std::vector<std::string> key;
    for (const Term& a : t.args()) {
      auto v = eval(a, env);
      if (!v) return std::nullopt;
      key.push_back(v->key());
    }
    auto ft = model.tables.find(t.head());
    if (ft == model.tables.end()) {
      fail("no table for function " + t.head());
      return std::nullopt;
    }
    auto row = ft->second.find(key);
    if (row == ft->second.end()) {
      std::string k;
      for (const auto& s : key) k += ' ' + s;
      fail("missing table row: " + t.head() + k);
      return std::nullopt;
    }
    return Value{false, 0, row->second};
  }

  /// Three-valued atom evaluation: nullopt when a table row is missing.
  std::optional<bool> eval_atom(const Atom& a,
                                const std::map<std::string, Value>& env) {
    if (a.kind == AtomKind::InImage) {
      auto target = eval(a.lhs, env);
      if (!target) return std::nullopt;
      auto ft = model.tables.find(a.fn);
      if (ft == model.tables.end()) return false;  // empty image
      for (const auto& [key, val] : ft->second) {
        (void)key;
        if (val == target->key()) return true;
      }
      return false;
    }
    auto l = eval(a.lhs, env);
    auto r = eval(a.rhs, env);
    if (!l || !r) return std::nullopt;
    if (a.kind == AtomKind::Leq) {
      if (!l->is_int || !r->is_int) {
        fail("inequality over non-integer values: " + a.str());
        return std::nullopt;
      }
      return l->num <= r->num;
    }
    return *l == *r;
  }

  bool check_clause(const ZClause& c) {
    std::vector<std::pair<std::string, SortId>> vars;
    for (const auto& [name, sort] : occurring_vars(c))
      vars.emplace_back(name, sort);

    std::vector<std::vector<Value>> domains;
    for (const auto& [name, sort] : vars) {
      (void)name;
      std::vector<Value> d;
      if (sort == Signature::kInt) {
        for (long long v = -model.radius; v <= model.radius; ++v)
          d.push_back(Value{true, v, ""});
      } else {
        auto it = model.carriers.find(problem.sig.sort_name(sort));
        if (it == model.carriers.end() || it->second.empty())
          return fail("empty carrier for sort " + problem.sig.sort_name(sort));
        for (const std::string& n : it->second)
          d.push_back(Value{false, 0, n});
      }
      domains.push_back(std::move(d));
    }
    long long combos = 1;
    for (const auto& d : domains) combos *= static_cast<long long>(d.size());
    for (long long ordinal = 0; ordinal < combos; ++ordinal) {
      std::map<std::string, Value> env;
      long long rest = ordinal;
      for (std::size_t i = vars.size(); i-- > 0;) {
        env[vars[i].first] = domains[i][static_cast<std::size_t>(
            rest % static_cast<long long>(domains[i].size()))];
        rest /= static_cast<long long>(domains[i].size());
      }
      bool lambda_true = true;
      for (const Atom& a : c.constraints) {
        auto v = eval_atom(a, env);
        if (!v) return false;
        if (!*v) {
          lambda_true = false;
          break;
        }
      }
      if (!lambda_true) continue;
      bool witnessed = false;
      bool incomplete = false;
      for (const Atom& a : c.antecedent) {
        auto v = eval_atom(a, env);
        if (!v) {
          incomplete = true;
          error.clear();
          continue;
        }
        if (!*v) {
          witnessed = true;
          break;
        }
      }
      if (!witnessed)
        for (const Atom& a : c.succedent) {
          auto v = eval_atom(a, env);
          if (!v) {
            incomplete = true;
            error.clear();
            continue;
          }
          if (*v) {
            witnessed = true;
            break;
          }
        }
      if (!witnessed) {
        if (incomplete)
          return fail("model tables incomplete on clause " + c.str());
        std::string e = "clause violated: " + c.str() + " under";
        for (const auto& [n, v] : env) e += ' ' + n + '=' + v.key();
        return fail(e);
      }
    }
    return true;
  }

  bool check_arrays() {
    auto st = model.tables.find("store");
    if (st == model.tables.end()) return true;
    auto se = model.tables.find("select");
    for (const auto& [key, written] : st->second) {
      if (key.size() != 3) return fail("malformed store row");
      const std::string& src = key[0];
      const std::string& idx = key[1];
      const std::string& elem = key[2];
      if (se == model.tables.end())
        return fail("store rows without select rows");
      for (const auto& [skey, val] : se->second) {
        if (skey.size() != 2 || skey[0] != written) continue;
        if (skey[1] == idx) {
          if (val != elem)
            return fail("written cell disagrees: select(" + written + ", " +
                        idx + ") = " + val + " but stored " + elem);
        } else {
          auto inner = se->second.find({src, skey[1]});
          if (inner == se->second.end())
            return fail("missing inner read select(" + src + ", " + skey[1] +
                        ")");
          if (inner->second != val)
            return fail("unwritten cell changed: select(" + written + ", " +
                        skey[1] + ")");
        }
      }
    }
    return true;
  }
};

}  // namespace

bool check_model(const Problem& problem, const BoundedModel& model,
                 bool arrays_semantics, std::string* error) {
  Checker ck{problem, model, arrays_semantics, {}};
  bool ok = true;
  try {
    for (const ZClause& c : problem.clauses)
      if (!ck.check_clause(c)) {
        ok = false;
        break;
      }
    if (ok && arrays_semantics) ok = ck.check_arrays();
  } catch (const Unsupported& u) {
    ck.error = u.what;
    ok = false;
  }
  if (!ok && error) *error = ck.error;
  return ok;
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

OracleResult bounded_decide(const Problem& problem, const OracleOptions& opt) {
  OracleResult res;
  bool arrays = opt.arrays_semantics.value_or(
      problem.theory == TheoryTag::ArraysInt ||
      (problem.sig.has_function("select") &&
       problem.sig.has_function("store")));
  Search s(problem, opt);
  s.arrays = arrays;
  try {
    s.scan_problem();
    s.compile_clauses();
    Search::Status st = s.run();
    res.evaluations = s.steps;
    if (st == Search::Status::Sat) {
      std::string err;
      if (!check_model(problem, s.model, arrays, &err)) {
        res.verdict = BoundedVerdict::Unknown;
        res.note = "internal model check failed: " + err;
        return res;
      }
      res.verdict = BoundedVerdict::Sat;
      res.model = std::move(s.model);
      return res;
    }
    if (st == Search::Status::Abort || s.out_of_budget) {
      res.verdict = BoundedVerdict::Unknown;
      res.note = "budget exhausted after " + std::to_string(s.steps) + " steps";
      return res;
    }
    res.verdict = BoundedVerdict::UnsatWithinBound;
    return res;
  } catch (const Unsupported& u) {
    res.verdict = BoundedVerdict::Unknown;
    res.note = u.what;
    res.evaluations = s.steps;
    return res;
  }
}

OracleResult bounded_decide(const GroundProblem& g, const OracleOptions& opt) {
  Problem p;
  p.sig = g.sig;
  p.theory = g.has_arrays ? TheoryTag::ArraysInt : TheoryTag::Generic;
  p.clauses = g.clauses;
  OracleOptions o = opt;
  if (!o.arrays_semantics) o.arrays_semantics = g.has_arrays;
  return bounded_decide(p, o);
}

// ---------------------------------------------------------------------------
// Random problem generation
// ---------------------------------------------------------------------------

Problem generate_random_az(unsigned seed, const RandomAzParams& p) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  Problem prob;
  prob.theory = TheoryTag::ArraysInt;
  Signature& sig = prob.sig;
  const SortId arr = sig.add_sort("Arr");
  const SortId elem = sig.add_sort("Elem");
  sig.add_function({"select", {arr, Signature::kInt}, elem});
  sig.add_function({"store", {arr, Signature::kInt, elem}, arr});
  sig.add_function({"a0", {}, arr});

  // With every count at zero the generator yields an empty problem; element
  // constants are forced up to one only when some clause will mention them.
  const bool any_body = p.segments > 0 || p.writes > 0 || p.queries > 0;
  const int elem_count = any_body ? std::max(1, p.elem_count) : p.elem_count;
  std::vector<Term> elems;
  for (int i = 1; i <= elem_count; ++i) {
    std::string n = "e" + std::to_string(i);
    sig.add_function({n, {}, elem});
    elems.push_back(Term::constant(n, elem));
  }
  std::vector<Term> lows, highs, pool;
  for (int i = 1; i <= p.segments; ++i) {
    std::string l = "l" + std::to_string(i), u = "u" + std::to_string(i);
    sig.add_function({l, {}, Signature::kInt});
    sig.add_function({u, {}, Signature::kInt});
    lows.push_back(Term::constant(l, Signature::kInt));
    highs.push_back(Term::constant(u, Signature::kInt));
    pool.push_back(lows.back());
    pool.push_back(highs.back());
  }
  std::vector<Term> written{Term::constant("a0", arr)};
  std::vector<Term> windices, qindices;
  for (int j = 1; j <= p.writes; ++j) {
    std::string b = "b" + std::to_string(j), w = "w" + std::to_string(j);
    sig.add_function({b, {}, arr});
    sig.add_function({w, {}, Signature::kInt});
    written.push_back(Term::constant(b, arr));
    windices.push_back(Term::constant(w, Signature::kInt));
    pool.push_back(windices.back());
  }
  for (int k = 1; k <= p.queries; ++k) {
    std::string q = "q" + std::to_string(k);
    sig.add_function({q, {}, Signature::kInt});
    qindices.push_back(Term::constant(q, Signature::kInt));
    pool.push_back(qindices.back());
  }

  FreshNames fresh;
  int origin = 0;
  auto add = [&](const std::map<std::string, SortId>& vars,
                 const std::vector<Literal>& cons,
                 const std::vector<Literal>& ante,
                 const std::vector<Literal>& succ) {
    std::optional<std::pair<Term, Term>> unit;
    auto cs = normalize_into_zclauses(vars, cons, ante, succ, sig,
                                      "input:" + std::to_string(origin++),
                                      &unit);
    if (unit) prob.unit_int_equalities.push_back(*unit);
    for (ZClause& c : cs) {
      purify(c, sig, fresh);
      prob.clauses.push_back(std::move(c));
    }
  };
  // Asserting "s <= t" is emitting the negated literal on the antecedent
  // side; the normalizer folds it into the constraint part.
  auto assert_leq = [&](const Term& s, const Term& t) {
    add({}, {}, {Literal{Atom::leq(s, t), true}}, {});
  };

  // Segment reads: l_i <= x <= u_i -> select(a0, x) = e.
  for (int i = 0; i < p.segments; ++i) {
    Term x = Term::var("x", Signature::kInt);
    add({{"x", Signature::kInt}},
        {Literal{Atom::leq(lows[static_cast<std::size_t>(i)], x), false},
         Literal{Atom::leq(x, highs[static_cast<std::size_t>(i)]), false}},
        {},
        {Literal{Atom::eq(Term::app("select", {written.front(), x}, elem),
                          elems[static_cast<std::size_t>(
                              pick(0, static_cast<int>(elems.size()) - 1))]),
                 false}});
    // Non-empty interval.
    assert_leq(lows[static_cast<std::size_t>(i)],
               highs[static_cast<std::size_t>(i)]);
  }
  // Random orderings across the constant pool.
  for (int r = 0; r < p.relations && pool.size() >= 2; ++r) {
    int i = pick(0, static_cast<int>(pool.size()) - 1);
    int j = pick(0, static_cast<int>(pool.size()) - 1);
    if (i == j) continue;
    int off = pick(-p.numeral_range, p.numeral_range);
    assert_leq(pool[static_cast<std::size_t>(i)],
               add_offset(pool[static_cast<std::size_t>(j)], off));
  }
  // Ground unit equalities (feed bound minimization).
  for (unsigned m = 0; m < p.unit_equalities && pool.size() >= 2; ++m) {
    int i = pick(0, static_cast<int>(pool.size()) - 1);
    int j = pick(0, static_cast<int>(pool.size()) - 1);
    if (i == j) continue;
    int off = pick(-p.numeral_range, p.numeral_range);
    add({}, {}, {},
        {Literal{Atom::eq(pool[static_cast<std::size_t>(i)],
                          add_offset(pool[static_cast<std::size_t>(j)], off)),
                 false}});
  }
  // Writes chain a0 -> b1 -> ... -> b_w.
  for (int j = 0; j < p.writes; ++j) {
    add({}, {}, {},
        {Literal{
            Atom::eq(written[static_cast<std::size_t>(j + 1)],
                     Term::app("store",
                               {written[static_cast<std::size_t>(j)],
                                windices[static_cast<std::size_t>(j)],
                                elems[static_cast<std::size_t>(pick(
                                    0, static_cast<int>(elems.size()) - 1))]},
                               arr)),
            false}});
  }
  // Queries against the final array, random polarity.
  for (int k = 0; k < p.queries; ++k) {
    Atom a = Atom::eq(
        Term::app("select",
                  {written.back(), qindices[static_cast<std::size_t>(k)]},
                  elem),
        elems[static_cast<std::size_t>(
            pick(0, static_cast<int>(elems.size()) - 1))]);
    if (pick(0, 1))
      add({}, {}, {}, {Literal{a, false}});
    else
      add({}, {}, {Literal{a, false}}, {});
  }

  ValidationReport rep = validate_az_problem(prob);
  if (!rep.ok()) {
    std::string msg = "generated problem failed validation:";
    for (const Diagnostic& d : rep.issues) msg += ' ' + d.code;
    throw std::logic_error(msg);
  }
  return prob;
}

}  // namespace zground
