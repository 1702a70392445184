#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mddkit/mdd.hpp"

namespace mddkit::editops {

/// What one edit did to the diagram. Counter fields are deltas over the
/// diagram's lifetime counters, so retargeted arcs count on both sides.
struct ChangeSummary {
  unsigned long long nodes_created = 0;
  unsigned long long nodes_deleted = 0;
  unsigned long long arcs_created = 0;
  unsigned long long arcs_deleted = 0;
  /// Worklist entries the incremental reducer handled for this edit.
  unsigned long long frontier_processed = 0;
  /// Whether the accepted tuple set changed.
  bool changed = false;

  unsigned long long total_modifications() const {
    return nodes_created + nodes_deleted + arcs_created + arcs_deleted;
  }
};

/// The nodes an in-place edit created, grouped by layer. The set algorithms
/// key each node by the (left, right) pair of origin nodes it stands for so
/// one pair is materialized at most once per layer; kNilOrigin marks a
/// missing left origin (addition walked off the target diagram).
class IsolationFrontier {
 public:
  static constexpr NodeId kNilOrigin = -2;

  explicit IsolationFrontier(int arity) : layers_(arity), pairs_(arity) {}

  void add(int layer, NodeId node) { layers_[layer].push_back(node); }

  NodeId find_pair(int layer, NodeId left, NodeId right) const {
    const auto& table = pairs_[layer];
    auto it = table.find(pair_key(left, right));
    return it == table.end() ? kNoNode : it->second;
  }

  void remember_pair(int layer, NodeId left, NodeId right, NodeId node) {
    pairs_[layer].emplace(pair_key(left, right), node);
    layers_[layer].push_back(node);
  }

  /// Frontier nodes on a layer, in creation order. Layer 0 is always empty.
  const std::vector<NodeId>& layer(int l) const { return layers_[l]; }

  int layer_count() const { return static_cast<int>(layers_.size()); }

 private:
  static uint64_t pair_key(NodeId left, NodeId right) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(left)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(right));
  }

  std::vector<std::vector<NodeId>> layers_;
  std::vector<std::unordered_map<uint64_t, NodeId>> pairs_;
};

/// Remove one tuple. Absent tuples are detected with a read-only walk and
/// reported as changed = false without touching the diagram.
ChangeSummary delete_tuple(Mdd& m, const Tuple& t);

/// Insert one tuple. Present tuples are a no-op with changed = false.
ChangeSummary add_tuple(Mdd& m, const Tuple& t);

/// Remove every tuple of `tset` from `m` (set difference, in place).
ChangeSummary delete_set(Mdd& m, const Mdd& tset);

/// Insert every tuple of `tset` into `m` (set union, in place).
ChangeSummary add_set(Mdd& m, const Mdd& tset);

/// Restore global reducedness after an edit whose fresh nodes are listed in
/// `frontier`. Merging a node can change its parents' signatures, so parents
/// of merged nodes are re-examined too; untouched nodes are never revisited.
/// Returns the number of worklist entries handled.
unsigned long long incremental_reduce(Mdd& m, const IsolationFrontier& frontier);

/// Checks that adding `tset` to a copy of `m` lands on the same set as
/// complementing, deleting `tset`, and complementing back.
bool duality_check(const Mdd& m, const Mdd& tset);

}  // namespace mddkit::editops
