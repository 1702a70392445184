#pragma once

#include <vector>

#include "mddkit/mdd.hpp"
#include "mddkit/types.hpp"

namespace mddkit::builders {

/// Prefix tree over a scope. Node 0 is the root; children are label-sorted.
/// Every leaf sits at depth r, one per distinct tuple.
struct Trie {
  Scope scope;
  struct Node {
    std::vector<std::pair<Value, int32_t>> children;
  };
  std::vector<Node> nodes;
  size_t leaf_count = 0;

  static constexpr int32_t kRoot = 0;
};

/// Per-variable value sets; the described set is their Cartesian product.
/// Sets are kept sorted and duplicate-free.
struct Gcs {
  Scope scope;
  std::vector<std::vector<Value>> value_sets;

  void check() const;
  unsigned long long product_size() const;
  bool product_contains(const Tuple& t) const;
};

/// A Gcs restricted to the tuples between two inclusive lexicographic
/// bounds. Both bounds must be members of the product.
struct TupleSequence {
  Gcs gcs;
  Tuple tmin;
  Tuple tmax;

  void check() const;
};

/// Node/arc totals of the sequence construction before its final reduce
/// pass. For arity r the construction never needs more than 3(r-1)+2 nodes,
/// and its arc count is linear in the total size of the value sets: each
/// listed value labels at most one arc from each bound path plus one
/// wildcard-chain arc, so under 3x their sum.
struct SequenceBuildStats {
  size_t raw_nodes = 0;
  size_t raw_arcs = 0;
};

/// One left-to-right pass over sorted rows, branching each row off the
/// rightmost path at its first new position. Sorts and dedupes first when
/// the table is not flagged sorted. Linear in rows x arity.
Trie build_trie(const TupleTable& table);

/// Map trie nodes onto diagram nodes, fold all leaves into the terminal,
/// then reduce.
Mdd trie_to_mdd(const Trie& trie);

/// trie_to_mdd without the final reduce; used by tests that need an
/// unreduced diagram with known content.
Mdd trie_to_mdd_unreduced(const Trie& trie);

Mdd build_from_sorted_table(const TupleTable& table);

/// Chain diagram: one node per layer, one arc per value in each set.
Mdd build_from_gcs(const Gcs& gcs);

/// Bounded-product construction: the two bound paths (shared while the
/// bounds agree), plus arcs into a wildcard chain for values strictly above
/// tmin / strictly below tmax at each layer. Reduced on return; `stats`
/// receives the pre-reduce totals when non-null.
Mdd build_from_tuple_sequence(const TupleSequence& seq, SequenceBuildStats* stats = nullptr);

/// Union of pairwise-disjoint sequences into one diagram sharing a single
/// root and terminal. Overlap between the inputs is detected while merging
/// and reported as a DescriptorError.
Mdd build_from_disjoint_sequences(const std::vector<TupleSequence>& seqs);

}  // namespace mddkit::builders
