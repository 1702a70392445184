#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mddkit/types.hpp"

namespace mddkit {

using NodeId = int32_t;
inline constexpr NodeId kNoNode = -1;

/// Counts of structural mutations applied to an Mdd since construction.
/// Edit operations diff these to report what a call changed.
struct MutationStats {
  unsigned long long nodes_created = 0;
  unsigned long long nodes_deleted = 0;
  unsigned long long arcs_created = 0;
  unsigned long long arcs_deleted = 0;

  MutationStats operator-(const MutationStats& o) const {
    return {nodes_created - o.nodes_created, nodes_deleted - o.nodes_deleted,
            arcs_created - o.arcs_created, arcs_deleted - o.arcs_deleted};
  }
  unsigned long long total() const {
    return nodes_created + nodes_deleted + arcs_created + arcs_deleted;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Deterministic layered multi-valued decision diagram over a Scope with
/// arity r. Nodes live on layers 0..r: layer 0 holds only the root, layer r
/// only the terminal. Arcs leave layer L labeled with a value of variable L
/// and enter layer L+1; a node has at most one outgoing arc per label. The
/// set of root-to-terminal paths is the represented tuple set.
///
/// The root is never deleted (an arc-less root encodes the empty set) and the
/// terminal is never merged or deleted. Node ids are recycled through a free
/// list, so they are not stable identifiers across deletions; canonical
/// serialization renumbers.
class Mdd {
 public:
  struct OutArc {
    Value label;
    NodeId child;
    int32_t slot_in_child;  // index of the mirror entry in child's in-list
  };
  struct InArc {
    NodeId parent;
    int32_t slot_in_parent;  // index of the mirror entry in parent's out-list
  };

  explicit Mdd(Scope scope);

  const Scope& scope() const { return scope_; }
  int arity() const { return scope_.arity(); }
  NodeId root() const { return root_; }
  NodeId terminal() const { return terminal_; }

  size_t node_count() const { return node_count_; }
  size_t arc_count() const { return arc_count_; }
  /// Exclusive upper bound on node ids ever handed out; fits flat id-indexed
  /// side arrays. Freed ids below the bound may be recycled by later edits.
  NodeId id_bound() const { return static_cast<NodeId>(nodes_.size()); }
  bool is_reduced() const { return reduced_; }
  void set_reduced(bool r) { reduced_ = r; }
  const MutationStats& mutation_stats() const { return stats_; }

  bool alive(NodeId n) const { return nodes_[n].alive; }
  int layer_of(NodeId n) const { return nodes_[n].layer; }
  std::span<const OutArc> out(NodeId n) const { return nodes_[n].out; }
  std::span<const InArc> in(NodeId n) const { return nodes_[n].in; }
  /// Alive nodes currently on a layer, in creation order.
  const std::vector<NodeId>& layer(int l) const { return layers_[l]; }

  /// Child reached from n by `label`, or kNoNode.
  NodeId child(NodeId n, Value label) const;
  /// Position of `label` in n's sorted out-list, or -1.
  int out_slot(NodeId n, Value label) const;

  // --- mutation primitives (used by builders and edit operations) ---

  NodeId new_node(int layer);
  void add_arc(NodeId parent, Value label, NodeId child);
  void remove_arc_at(NodeId parent, int slot);
  bool remove_arc(NodeId parent, Value label);  // false if absent
  /// Point parent's arc at `slot` to a different child, keeping its label.
  void redirect_arc(NodeId parent, int slot, NodeId new_child);
  /// Redirect every arc entering `from` so it enters `to` instead.
  void move_in_arcs(NodeId from, NodeId to);
  /// Delete a node and its remaining arcs (both directions). Rejects the
  /// root and the terminal.
  void free_node(NodeId n);

  // --- queries ---

  bool contains(const Tuple& t) const;
  unsigned long long count_tuples() const;
  /// All tuples in lexicographic order; `sorted` is set on the result.
  TupleTable enumerate() const;

  // --- whole-diagram operations ---

  /// Merge same-layer nodes with identical outgoing arc lists, bottom-up.
  /// Idempotent; never increases node or arc counts.
  void reduce();
  /// Tuples of the full product not in this diagram, as a reduced Mdd.
  Mdd complement() const;

  ValidationReport validate() const;

  /// Canonical text form: `mdd 1 <r>`, a domains line, then arcs grouped by
  /// source node in layer order. Node numbers come from a first-visit
  /// depth-first walk in ascending label order; the root is 0 and the
  /// terminal 1 regardless of visit order, so two diagrams have equal text
  /// exactly when they are isomorphic as labeled layered graphs.
  std::string to_canonical_text() const;
  static Mdd from_canonical_text(std::string_view text);

 private:
  struct NodeRec {
    int32_t layer = 0;
    int32_t layer_slot = 0;  // index in layers_[layer]
    bool alive = false;
    std::vector<OutArc> out;  // sorted by label
    std::vector<InArc> in;    // unordered
  };

  void detach_in_entry(NodeId child, int in_slot);

  Scope scope_;
  std::vector<NodeRec> nodes_;
  std::vector<NodeId> free_ids_;
  std::vector<std::vector<NodeId>> layers_;
  NodeId root_ = kNoNode;
  NodeId terminal_ = kNoNode;
  size_t node_count_ = 0;
  size_t arc_count_ = 0;
  bool reduced_ = false;
  MutationStats stats_;
};

/// True when both diagrams represent the same tuple set. Works on copies:
/// reduces each and compares canonical text. Scope mismatch is a ScopeError.
bool equivalent(const Mdd& a, const Mdd& b);

/// Sorted (label, child) pairs of a node's out-arcs. Two nodes on one layer
/// with equal signatures accept the same suffixes and can be merged.
using Signature = std::vector<std::pair<Value, NodeId>>;

Signature out_signature(const Mdd& m, NodeId n);

struct SignatureHash {
  size_t operator()(const Signature& sig) const;
};

}  // namespace mddkit
