#pragma once

// Internal congruence closure shared by the bounded model search and the
// ground decision procedure. Not part of the installed interface.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "zground/signature.hpp"

namespace zground::internal {

/// Three-valued answer for index comparisons during array propagation.
enum class Tri { True, False, Unknown };

/// Congruence closure over leaves and applications, with optional
/// read-over-write propagation for select/store terms.
///
/// Leaves marked `rigid` are pairwise distinct by construction: merging two
/// different rigid leaves is a conflict (used for concrete integer values).
/// The whole object is cheaply copyable; backtracking saves and restores
/// copies.
class Euf {
 public:
  using NodeId = int;
  static constexpr NodeId kNone = -1;

  NodeId leaf(const std::string& key, SortId sort, bool rigid);
  NodeId app(const std::string& head, std::vector<NodeId> args, SortId sort);

  /// Enables select/store propagation. `index_compare` decides whether two
  /// index nodes hold equal values; Unknown stalls the rewrite (sound).
  void enable_arrays(std::function<Tri(NodeId, NodeId)> index_compare) {
    arrays_ = true;
    index_compare_ = std::move(index_compare);
  }

  /// Union plus full propagation; false on conflict.
  bool merge(NodeId a, NodeId b);
  /// Records a disequality; false when the two are already equal.
  bool assert_diseq(NodeId a, NodeId b);
  /// Re-runs propagation (congruence + arrays + disequality check).
  bool propagate();

  NodeId find(NodeId n) const;
  bool same(NodeId a, NodeId b) const { return find(a) == find(b); }

  struct Node {
    std::string head;
    std::vector<NodeId> args;
    SortId sort = 0;
    bool rigid = false;
    bool is_app = false;
  };
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId n) const { return nodes_[static_cast<std::size_t>(n)]; }

  /// A parseable rendering of the node's term.
  std::string term_str(NodeId n) const;

 private:
  bool do_union(NodeId a, NodeId b);  // false on rigid conflict
  bool congruence_pass(bool& changed);
  bool array_pass(bool& changed);

  std::vector<Node> nodes_;
  std::vector<NodeId> parent_;
  std::vector<int> rank_;
  std::map<std::string, NodeId> leaf_intern_;
  std::map<std::string, NodeId> app_intern_;  // head + exact arg ids
  std::vector<std::pair<NodeId, NodeId>> diseqs_;
  bool arrays_ = false;
  std::function<Tri(NodeId, NodeId)> index_compare_;
};

}  // namespace zground::internal
