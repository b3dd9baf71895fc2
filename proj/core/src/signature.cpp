#include "zground/signature.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <stdexcept>

namespace zground {

Signature::Signature() {
  sort_names_.push_back("Int");
  sort_ids_["Int"] = kInt;
}

bool Signature::is_reserved(const std::string& name) {
  if (name.empty()) return true;
  if (name == "+" || name == "-" || name == "Int") return true;
  // Numerals (optionally signed decimal strings) are term-language literals.
  std::size_t i = (name[0] == '-') ? 1 : 0;
  if (i >= name.size()) return false;
  return std::all_of(name.begin() + static_cast<long>(i), name.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

SortId Signature::add_sort(const std::string& name) {
  if (is_reserved(name))
    throw std::invalid_argument("sort name is reserved: " + name);
  if (sort_ids_.count(name))
    throw std::invalid_argument("duplicate sort: " + name);
  if (funs_.count(name))
    throw std::invalid_argument("sort name already used by a function: " + name);
  SortId id = static_cast<SortId>(sort_names_.size());
  sort_names_.push_back(name);
  sort_ids_[name] = id;
  return id;
}

bool Signature::has_sort(const std::string& name) const {
  return sort_ids_.count(name) != 0;
}

SortId Signature::sort_id(const std::string& name) const {
  auto it = sort_ids_.find(name);
  if (it == sort_ids_.end()) throw std::out_of_range("unknown sort: " + name);
  return it->second;
}

const std::string& Signature::sort_name(SortId id) const {
  return sort_names_.at(id);
}

void Signature::add_function(FunDecl decl) {
  if (is_reserved(decl.name))
    throw std::invalid_argument("function name is reserved: " + decl.name);
  if (funs_.count(decl.name))
    throw std::invalid_argument("duplicate function: " + decl.name);
  if (sort_ids_.count(decl.name))
    throw std::invalid_argument("function name already used by a sort: " +
                                decl.name);
  auto check = [&](SortId s) {
    if (s >= sort_names_.size())
      throw std::invalid_argument("undeclared sort id in declaration of " +
                                  decl.name);
  };
  check(decl.range);
  for (SortId s : decl.args) check(s);
  funs_.emplace(decl.name, std::move(decl));
}

bool Signature::has_function(const std::string& name) const {
  return funs_.count(name) != 0;
}

const FunDecl* Signature::function(const std::string& name) const {
  auto it = funs_.find(name);
  return it == funs_.end() ? nullptr : &it->second;
}

std::string Signature::fresh_symbol(const std::string& stem,
                                    unsigned start) const {
  unsigned n = start;
  while (true) {
    std::string cand = (n == 0) ? stem : stem + std::to_string(n);
    if (!is_reserved(cand) && !funs_.count(cand) && !sort_ids_.count(cand))
      return cand;
    ++n;
  }
}

ValidationReport validate_signature(const Signature& sig) {
  ValidationReport report;
  for (const auto& [name, decl] : sig.functions()) {
    if (decl.range == Signature::kInt && !decl.args.empty()) {
      bool all_int = std::all_of(decl.args.begin(), decl.args.end(),
                                 [](SortId s) { return s == Signature::kInt; });
      if (!all_int)
        report.add("int-range-args",
                   "integer-range function '" + name +
                       "' has a non-integer argument sort");
    }
  }
  // Inhabitation fixpoint: Int is inhabited by numerals; any other sort is
  // inhabited once some function into it has all-inhabited argument sorts.
  std::set<SortId> inhabited = {Signature::kInt};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, decl] : sig.functions()) {
      (void)name;
      if (inhabited.count(decl.range)) continue;
      bool ok = std::all_of(decl.args.begin(), decl.args.end(),
                            [&](SortId s) { return inhabited.count(s) != 0; });
      if (ok) {
        inhabited.insert(decl.range);
        changed = true;
      }
    }
  }
  for (SortId s = 0; s < sig.sort_count(); ++s) {
    if (!inhabited.count(s))
      report.add("uninhabited-sort",
                 "sort '" + sig.sort_name(s) + "' has no ground term");
  }
  return report;
}

StratificationResult stratification_levels(const Signature& sig) {
  StratificationResult res;
  const std::size_t n = sig.sort_count();
  // adj[a] holds range sorts reachable in one function step from argument a.
  std::vector<std::set<SortId>> adj(n);
  for (const auto& [name, decl] : sig.functions()) {
    (void)name;
    for (SortId a : decl.args) adj[a].insert(decl.range);
  }
  std::vector<std::size_t> indeg(n, 0);
  for (SortId a = 0; a < n; ++a)
    for (SortId b : adj[a]) ++indeg[b];

  std::deque<SortId> queue;
  for (SortId s = 0; s < n; ++s)
    if (indeg[s] == 0) queue.push_back(s);
  std::vector<unsigned> level(n, 0);
  std::size_t seen = 0;
  while (!queue.empty()) {
    SortId s = queue.front();
    queue.pop_front();
    ++seen;
    for (SortId t : adj[s]) {
      level[t] = std::max(level[t], level[s] + 1);
      if (--indeg[t] == 0) queue.push_back(t);
    }
  }
  if (seen == n) {
    res.ok = true;
    for (SortId s = 0; s < n; ++s) res.levels[s] = level[s];
    return res;
  }
  // Recover one cycle among the unprocessed sorts. After Kahn's algorithm,
  // residual in-degrees count only edges from unprocessed sorts, so every
  // unprocessed sort has an unprocessed predecessor: walking predecessors
  // must eventually repeat a sort, closing a cycle.
  std::vector<bool> remaining(n, false);
  for (SortId s = 0; s < n; ++s)
    if (indeg[s] > 0) remaining[s] = true;
  auto predecessor = [&](SortId t) -> SortId {
    for (SortId a = 0; a < n; ++a)
      if (remaining[a] && adj[a].count(t)) return a;
    return t;  // unreachable by the invariant above
  };
  SortId start = 0;
  for (SortId s = 0; s < n; ++s)
    if (remaining[s]) {
      start = s;
      break;
    }
  std::vector<SortId> path;
  std::map<SortId, std::size_t> pos;
  SortId cur = start;
  while (!pos.count(cur)) {
    pos[cur] = path.size();
    path.push_back(cur);
    cur = predecessor(cur);
  }
  // path[pos[cur]..] walked backwards from cur; reverse it for edge order.
  res.cycle.assign(path.begin() + static_cast<long>(pos[cur]), path.end());
  std::reverse(res.cycle.begin(), res.cycle.end());
  res.cycle.push_back(res.cycle.front());
  return res;
}

}  // namespace zground
