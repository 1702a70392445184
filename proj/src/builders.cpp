#include "mddkit/builders.hpp"

#include <algorithm>
#include <cassert>

namespace mddkit::builders {

void Gcs::check() const {
  if (static_cast<int>(value_sets.size()) != scope.arity())
    throw DescriptorError("need one value set per variable");
  for (int i = 0; i < scope.arity(); ++i) {
    const auto& vs = value_sets[i];
    if (vs.empty()) throw DescriptorError("empty value set for variable " + std::to_string(i));
    for (size_t k = 0; k < vs.size(); ++k) {
      if (vs[k] < 0 || vs[k] >= scope.domain_size(i))
        throw DescriptorError("value outside domain for variable " + std::to_string(i));
      if (k > 0 && vs[k] <= vs[k - 1])
        throw DescriptorError("value sets must be sorted and duplicate-free");
    }
  }
}

unsigned long long Gcs::product_size() const {
  unsigned long long p = 1;
  for (const auto& vs : value_sets) p *= vs.size();
  return p;
}

bool Gcs::product_contains(const Tuple& t) const {
  for (int i = 0; i < scope.arity(); ++i)
    if (!std::binary_search(value_sets[i].begin(), value_sets[i].end(), t[i])) return false;
  return true;
}

void TupleSequence::check() const {
  gcs.check();
  gcs.scope.check_tuple(tmin);
  gcs.scope.check_tuple(tmax);
  if (!gcs.product_contains(tmin) || !gcs.product_contains(tmax))
    throw DescriptorError("bounds must be members of the described product");
  if (tmax < tmin) throw DescriptorError("lower bound above upper bound");
}

Trie build_trie(const TupleTable& table) {
  table.check();
  const std::vector<Tuple>* rows = &table.rows;
  std::vector<Tuple> scratch;
  if (!table.sorted) {
    scratch = table.rows;
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    rows = &scratch;
  }

  int r = table.scope.arity();
  Trie trie;
  trie.scope = table.scope;
  trie.nodes.emplace_back();
  // rightmost path, one node per depth; path[0] is the root
  std::vector<int32_t> path(r + 1, Trie::kRoot);
  const Tuple* prev = nullptr;
  for (const Tuple& t : *rows) {
    int split = 0;
    if (prev) {
      while (split < r && (*prev)[split] == t[split]) ++split;
      if (split == r) continue;  // duplicate row in a pre-sorted table
    }
    for (int i = split; i < r; ++i) {
      int32_t fresh = static_cast<int32_t>(trie.nodes.size());
      trie.nodes.emplace_back();
      trie.nodes[path[i]].children.emplace_back(t[i], fresh);
      path[i + 1] = fresh;
    }
    ++trie.leaf_count;
    prev = &t;
  }
  return trie;
}

Mdd trie_to_mdd_unreduced(const Trie& trie) {
  Mdd m(trie.scope);
  int r = trie.scope.arity();
  std::vector<NodeId> map(trie.nodes.size(), kNoNode);
  map[Trie::kRoot] = m.root();
  // depth-first; every depth-r trie node folds into the terminal
  struct Item {
    int32_t trie_node;
    int depth;
  };
  std::vector<Item> stack{{Trie::kRoot, 0}};
  while (!stack.empty()) {
    auto [tn, depth] = stack.back();
    stack.pop_back();
    for (auto [v, c] : trie.nodes[tn].children) {
      NodeId mc;
      if (depth + 1 == r) {
        mc = m.terminal();
      } else {
        mc = m.new_node(depth + 1);
        map[c] = mc;
        stack.push_back({c, depth + 1});
      }
      m.add_arc(map[tn], v, mc);
    }
  }
  m.set_reduced(false);
  return m;
}

Mdd trie_to_mdd(const Trie& trie) {
  Mdd m = trie_to_mdd_unreduced(trie);
  m.reduce();
  return m;
}

Mdd build_from_sorted_table(const TupleTable& table) {
  return trie_to_mdd(build_trie(table));
}

Mdd build_from_gcs(const Gcs& gcs) {
  gcs.check();
  Mdd m(gcs.scope);
  int r = gcs.scope.arity();
  NodeId prev = m.root();
  for (int i = 0; i < r; ++i) {
    NodeId next = (i + 1 == r) ? m.terminal() : m.new_node(i + 1);
    for (Value v : gcs.value_sets[i]) m.add_arc(prev, v, next);
    prev = next;
  }
  m.set_reduced(true);
  return m;
}

Mdd build_from_tuple_sequence(const TupleSequence& seq, SequenceBuildStats* stats) {
  seq.check();
  const Scope& scope = seq.gcs.scope;
  const auto& vals = seq.gcs.value_sets;
  int r = scope.arity();
  Mdd m(scope);

  // first position where the bounds disagree; r when they are one tuple
  int split = 0;
  while (split < r && seq.tmin[split] == seq.tmax[split]) ++split;

  // wildcard chain: wild[l] accepts every product suffix from layer l on.
  // Created lazily from the deepest requested layer; wild[r] is the terminal.
  std::vector<NodeId> wild(r + 1, kNoNode);
  wild[r] = m.terminal();
  auto get_wild = [&](int l) {
    for (int k = r - 1; k >= l; --k) {
      if (wild[k] != kNoNode) continue;
      wild[k] = m.new_node(k);
      for (Value v : vals[k]) m.add_arc(wild[k], v, wild[k + 1]);
    }
    return wild[l];
  };

  if (split == r) {
    // single tuple: one path
    NodeId cur = m.root();
    for (int i = 0; i < r; ++i) {
      NodeId next = (i + 1 == r) ? m.terminal() : m.new_node(i + 1);
      m.add_arc(cur, seq.tmin[i], next);
      cur = next;
    }
  } else {
    // shared prefix while the bounds agree; wildcard arcs there use the open
    // interval between the two bound values, which is empty until the split
    NodeId shared = m.root();
    for (int i = 0; i < split; ++i) {
      NodeId next = m.new_node(i + 1);
      m.add_arc(shared, seq.tmin[i], next);
      shared = next;
    }
    for (Value v : vals[split])
      if (v > seq.tmin[split] && v < seq.tmax[split]) m.add_arc(shared, v, get_wild(split + 1));

    NodeId lo = shared, hi = shared;
    for (int i = split; i < r; ++i) {
      NodeId lo_next = (i + 1 == r) ? m.terminal() : m.new_node(i + 1);
      NodeId hi_next = (i + 1 == r) ? m.terminal() : m.new_node(i + 1);
      m.add_arc(lo, seq.tmin[i], lo_next);
      m.add_arc(hi, seq.tmax[i], hi_next);
      // everything strictly inside the bound goes wildcard; at the split
      // layer those arcs already left the shared node
      if (i > split)
        for (Value v : vals[i]) {
          if (v > seq.tmin[i]) m.add_arc(lo, v, get_wild(i + 1));
          if (v < seq.tmax[i]) m.add_arc(hi, v, get_wild(i + 1));
        }
      lo = lo_next;
      hi = hi_next;
    }
  }

  if (stats) {
    stats->raw_nodes = m.node_count();
    stats->raw_arcs = m.arc_count();
  }
  m.reduce();
  return m;
}

namespace {

// Copy the subgraph of `src` rooted at `from` into `dst` below layer `depth`,
// preserving sharing. Depth-r nodes map onto dst's terminal.
NodeId graft_copy(Mdd& dst, const Mdd& src, NodeId from, int depth,
                  std::vector<NodeId>& memo) {
  if (depth == dst.arity()) return dst.terminal();
  if (memo[from] != kNoNode) return memo[from];
  NodeId fresh = dst.new_node(depth);
  for (const Mdd::OutArc& a : src.out(from))
    dst.add_arc(fresh, a.label, graft_copy(dst, src, a.child, depth + 1, memo));
  memo[from] = fresh;
  return fresh;
}

// Merge `addition` into `acc` along shared prefixes. Shared interior nodes
// of acc are split first so no other path is disturbed. Reaching the last
// layer with a label both sides carry means the inputs overlap.
void union_merge(Mdd& acc, NodeId acc_node, const Mdd& addition, NodeId add_node, int depth,
                 std::vector<NodeId>& memo) {
  int r = acc.arity();
  for (const Mdd::OutArc& a : addition.out(add_node)) {
    int slot = acc.out_slot(acc_node, a.label);
    if (slot < 0) {
      acc.add_arc(acc_node, a.label, graft_copy(acc, addition, a.child, depth + 1, memo));
      continue;
    }
    if (depth + 1 == r) throw DescriptorError("sequences are not disjoint");
    NodeId next = acc.out(acc_node)[slot].child;
    if (acc.in(next).size() > 1) {
      // split the shared node: private copy of its arcs for this path
      NodeId split = acc.new_node(depth + 1);
      for (const Mdd::OutArc& b : acc.out(next)) acc.add_arc(split, b.label, b.child);
      acc.redirect_arc(acc_node, slot, split);
      next = split;
    }
    union_merge(acc, next, addition, a.child, depth + 1, memo);
  }
}

}  // namespace

Mdd build_from_disjoint_sequences(const std::vector<TupleSequence>& seqs) {
  if (seqs.empty()) throw DescriptorError("need at least one sequence");
  const Scope& scope = seqs.front().gcs.scope;
  for (const TupleSequence& s : seqs)
    if (s.gcs.scope != scope) throw ScopeError("sequences must share one scope");

  Mdd acc = build_from_tuple_sequence(seqs.front());
  for (size_t k = 1; k < seqs.size(); ++k) {
    Mdd part = build_from_tuple_sequence(seqs[k]);
    std::vector<NodeId> memo(part.id_bound(), kNoNode);
    union_merge(acc, acc.root(), part, part.root(), 0, memo);
    acc.set_reduced(false);
  }
  acc.reduce();
  return acc;
}

}  // namespace mddkit::builders
