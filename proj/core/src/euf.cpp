#include "euf.hpp"

namespace zground::internal {

Euf::NodeId Euf::leaf(const std::string& key, SortId sort, bool rigid) {
  std::string intern_key = key + "#" + std::to_string(sort);
  auto it = leaf_intern_.find(intern_key);
  if (it != leaf_intern_.end()) return it->second;
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({key, {}, sort, rigid, false});
  parent_.push_back(id);
  rank_.push_back(0);
  leaf_intern_.emplace(std::move(intern_key), id);
  return id;
}

Euf::NodeId Euf::app(const std::string& head, std::vector<NodeId> args,
                     SortId sort) {
  std::string key = head;
  for (NodeId a : args) key += "," + std::to_string(a);
  key += "#" + std::to_string(sort);
  auto it = app_intern_.find(key);
  if (it != app_intern_.end()) return it->second;
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({head, std::move(args), sort, false, true});
  parent_.push_back(id);
  rank_.push_back(0);
  app_intern_.emplace(std::move(key), id);
  return id;
}

Euf::NodeId Euf::find(NodeId n) const {
  while (parent_[static_cast<std::size_t>(n)] != n)
    n = parent_[static_cast<std::size_t>(n)];
  return n;
}

bool Euf::do_union(NodeId a, NodeId b) {
  a = find(a);
  b = find(b);
  if (a == b) return true;
  const Node& na = nodes_[static_cast<std::size_t>(a)];
  const Node& nb = nodes_[static_cast<std::size_t>(b)];
  if (na.rigid && nb.rigid) return false;  // two distinct concrete values
  // Keep a rigid node as the representative so classes stay value-labeled.
  bool a_root = na.rigid || (!nb.rigid && rank_[static_cast<std::size_t>(a)] >=
                                              rank_[static_cast<std::size_t>(b)]);
  NodeId root = a_root ? a : b;
  NodeId child = a_root ? b : a;
  parent_[static_cast<std::size_t>(child)] = root;
  if (rank_[static_cast<std::size_t>(root)] ==
      rank_[static_cast<std::size_t>(child)])
    ++rank_[static_cast<std::size_t>(root)];
  return true;
}

bool Euf::congruence_pass(bool& changed) {
  // Naive re-congruence: map each application's current signature to a
  // representative; colliding applications in different classes merge.
  std::map<std::string, NodeId> sigs;
  for (NodeId n = 0; n < static_cast<NodeId>(nodes_.size()); ++n) {
    const Node& nd = nodes_[static_cast<std::size_t>(n)];
    if (!nd.is_app) continue;
    std::string key = nd.head;
    for (NodeId a : nd.args) key += "," + std::to_string(find(a));
    key += "#" + std::to_string(nd.sort);
    auto [it, inserted] = sigs.emplace(key, n);
    if (inserted) continue;
    if (same(it->second, n)) continue;
    if (!do_union(it->second, n)) return false;
    changed = true;
  }
  return true;
}

bool Euf::array_pass(bool& changed) {
  // For every select node whose array class holds a store node, resolve the
  // read when the index comparison is decided.
  for (NodeId s = 0; s < static_cast<NodeId>(nodes_.size()); ++s) {
    const Node sel = nodes_[static_cast<std::size_t>(s)];  // copy: nodes_ grows
    if (!sel.is_app || sel.head != "select" || sel.args.size() != 2) continue;
    NodeId array_class = find(sel.args[0]);
    NodeId read_index = sel.args[1];
    for (NodeId w = 0; w < static_cast<NodeId>(nodes_.size()); ++w) {
      const Node& st = nodes_[static_cast<std::size_t>(w)];
      if (!st.is_app || st.head != "store" || st.args.size() != 3) continue;
      if (find(w) != array_class) continue;
      Tri cmp = index_compare_(read_index, st.args[1]);
      if (cmp == Tri::True) {
        if (!same(s, st.args[2])) {
          if (!do_union(s, st.args[2])) return false;
          changed = true;
        }
      } else if (cmp == Tri::False) {
        NodeId inner = app("select", {st.args[0], read_index}, sel.sort);
        if (!same(s, inner)) {
          if (!do_union(s, inner)) return false;
          changed = true;
        }
      }
    }
  }
  return true;
}

bool Euf::propagate() {
  bool changed = true;
  while (changed) {
    changed = false;
    if (!congruence_pass(changed)) return false;
    if (arrays_ && !array_pass(changed)) return false;
  }
  for (const auto& [a, b] : diseqs_)
    if (same(a, b)) return false;
  return true;
}

bool Euf::merge(NodeId a, NodeId b) {
  if (!do_union(a, b)) return false;
  return propagate();
}

bool Euf::assert_diseq(NodeId a, NodeId b) {
  diseqs_.emplace_back(a, b);
  return !same(a, b);
}

std::string Euf::term_str(NodeId n) const {
  const Node& nd = nodes_[static_cast<std::size_t>(n)];
  if (!nd.is_app || nd.args.empty()) return nd.head;
  std::string out = "(" + nd.head;
  for (NodeId a : nd.args) {
    out += ' ';
    out += term_str(a);
  }
  out += ')';
  return out;
}

}  // namespace zground::internal
