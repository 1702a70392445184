#include "mddkit/editops.hpp"

#include <cassert>
#include <utility>

namespace mddkit::editops {

namespace {

using SigTable = std::unordered_map<Signature, NodeId, SignatureHash>;

// Deletes nodes left without incoming or outgoing arcs, cascading in both
// directions. The root and the terminal always stay.
void sweep_orphans(Mdd& m, std::vector<NodeId>& work) {
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    if (n == m.root() || n == m.terminal() || !m.alive(n)) continue;
    if (!m.in(n).empty() && !m.out(n).empty()) continue;
    while (!m.out(n).empty()) {
      NodeId child = m.out(n).back().child;
      m.remove_arc_at(n, static_cast<int>(m.out(n).size()) - 1);
      work.push_back(child);
    }
    while (!m.in(n).empty()) {
      const Mdd::InArc ia = m.in(n).back();
      m.remove_arc_at(ia.parent, ia.slot_in_parent);
      work.push_back(ia.parent);
    }
    m.free_node(n);
  }
}

ChangeSummary summarize(const Mdd& m, const MutationStats& before, bool changed,
                        unsigned long long frontier_processed) {
  MutationStats d = m.mutation_stats() - before;
  return ChangeSummary{d.nodes_created, d.nodes_deleted,   d.arcs_created,
                       d.arcs_deleted,  frontier_processed, changed};
}

// Walks the tuple's path; fills path[0..r] when fully present. Returns the
// first depth whose arc is missing, or r when the tuple is in the diagram.
int walk_prefix(const Mdd& m, const Tuple& t, std::vector<NodeId>& path) {
  int r = m.arity();
  path.assign(r + 1, kNoNode);
  path[0] = m.root();
  for (int i = 0; i < r; ++i) {
    NodeId next = m.child(path[i], t[i]);
    if (next == kNoNode) return i;
    path[i + 1] = next;
  }
  return r;
}

// Sorted union of the out-labels of a real node in `a` and a real node in
// `b`; either id may be kNilOrigin for an empty side.
std::vector<Value> label_union(const Mdd& a, NodeId na, const Mdd& b, NodeId nb) {
  std::vector<Value> out;
  size_t i = 0, j = 0;
  auto arcs_a = na == IsolationFrontier::kNilOrigin ? std::span<const Mdd::OutArc>() : a.out(na);
  auto arcs_b = nb == IsolationFrontier::kNilOrigin ? std::span<const Mdd::OutArc>() : b.out(nb);
  while (i < arcs_a.size() || j < arcs_b.size()) {
    if (j == arcs_b.size() || (i < arcs_a.size() && arcs_a[i].label < arcs_b[j].label)) {
      out.push_back(arcs_a[i++].label);
    } else if (i == arcs_a.size() || arcs_b[j].label < arcs_a[i].label) {
      out.push_back(arcs_b[j++].label);
    } else {
      out.push_back(arcs_a[i++].label);
      ++j;
    }
  }
  return out;
}

}  // namespace

unsigned long long incremental_reduce(Mdd& m, const IsolationFrontier& frontier) {
  int r = m.arity();
  unsigned long long processed = 0;
  // per-layer worklists; merging a node re-queues its parents one layer up
  std::vector<std::vector<NodeId>> work(r);
  for (int l = 1; l < r; ++l) work[l] = frontier.layer(l);

  for (int l = r - 1; l >= 1; --l) {
    auto& wl = work[l];
    if (wl.empty()) continue;
    std::vector<char> pending(m.id_bound(), 0);
    for (NodeId n : wl) pending[n] = 1;
    // settled nodes of this layer; pairwise distinct because the diagram was
    // reduced before the edit and every touched node is on a worklist
    SigTable table;
    table.reserve(m.layer(l).size() * 2);
    for (NodeId n : m.layer(l)) {
      if (pending[n]) continue;
      [[maybe_unused]] bool fresh = table.emplace(out_signature(m, n), n).second;
      assert(fresh);
    }
    for (size_t k = 0; k < wl.size(); ++k) {
      NodeId n = wl[k];
      ++processed;
      if (!m.alive(n)) continue;
      auto [it, inserted] = table.emplace(out_signature(m, n), n);
      if (inserted || it->second == n) continue;
      // merge n into the settled twin; parents' signatures change
      for (const Mdd::InArc& ia : m.in(n)) {
        int pl = m.layer_of(ia.parent);
        if (pl >= 1) work[pl].push_back(ia.parent);
      }
      m.move_in_arcs(n, it->second);
      m.free_node(n);
    }
  }
  m.set_reduced(true);
  return processed;
}

ChangeSummary delete_tuple(Mdd& m, const Tuple& t) {
  m.scope().check_tuple(t);
  int r = m.arity();
  std::vector<NodeId> path;
  if (walk_prefix(m, t, path) < r) return ChangeSummary{};  // absent: no-op

  MutationStats before = m.mutation_stats();
  if (r == 1) {
    m.remove_arc(m.root(), t[0]);
    return summarize(m, before, true, 0);
  }

  m.set_reduced(false);
  IsolationFrontier frontier(r);
  // first layer: move the root arc onto a fresh path
  NodeId iso = m.new_node(1);
  frontier.add(1, iso);
  m.redirect_arc(m.root(), m.out_slot(m.root(), t[0]), iso);
  // intermediate layers: continue the path, copying sibling arcs
  for (int i = 1; i < r - 1; ++i) {
    NodeId next = m.new_node(i + 1);
    frontier.add(i + 1, next);
    m.add_arc(iso, t[i], next);
    for (const Mdd::OutArc& a : m.out(path[i]))
      if (a.label != t[i]) m.add_arc(iso, a.label, a.child);
    iso = next;
  }
  // last layer: keep every label except the deleted one
  for (const Mdd::OutArc& a : m.out(path[r - 1]))
    if (a.label != t[r - 1]) m.add_arc(iso, a.label, m.terminal());

  std::vector<NodeId> orphans{path[1], iso};
  sweep_orphans(m, orphans);
  unsigned long long touched = incremental_reduce(m, frontier);
  return summarize(m, before, true, touched);
}

ChangeSummary add_tuple(Mdd& m, const Tuple& t) {
  m.scope().check_tuple(t);
  int r = m.arity();
  std::vector<NodeId> path;
  int depth = walk_prefix(m, t, path);
  if (depth == r) return ChangeSummary{};  // present: no-op

  MutationStats before = m.mutation_stats();
  if (r == 1) {
    m.add_arc(m.root(), t[0], m.terminal());
    return summarize(m, before, true, 0);
  }

  m.set_reduced(false);
  IsolationFrontier frontier(r);
  NodeId tail = m.root();
  if (depth > 0) {
    // isolate the shared prefix, copying sibling arcs as in deletion
    NodeId iso = m.new_node(1);
    frontier.add(1, iso);
    m.redirect_arc(m.root(), m.out_slot(m.root(), t[0]), iso);
    for (int i = 1; i < depth; ++i) {
      NodeId next = m.new_node(i + 1);
      frontier.add(i + 1, next);
      m.add_arc(iso, t[i], next);
      for (const Mdd::OutArc& a : m.out(path[i]))
        if (a.label != t[i]) m.add_arc(iso, a.label, a.child);
      iso = next;
    }
    // divergence layer: the original node has no arc for t[depth], so the
    // isolated copy keeps all of its arcs plus the new continuation
    for (const Mdd::OutArc& a : m.out(path[depth])) m.add_arc(iso, a.label, a.child);
    tail = iso;
  }
  // fresh suffix straight to the terminal
  for (int i = depth; i < r; ++i) {
    NodeId next = m.terminal();
    if (i + 1 < r) {
      next = m.new_node(i + 1);
      frontier.add(i + 1, next);
    }
    m.add_arc(tail, t[i], next);
    tail = next;
  }

  std::vector<NodeId> orphans;
  if (depth > 0) orphans.push_back(path[1]);
  sweep_orphans(m, orphans);
  unsigned long long touched = incremental_reduce(m, frontier);
  return summarize(m, before, true, touched);
}

ChangeSummary delete_set(Mdd& m, const Mdd& tset) {
  if (m.scope() != tset.scope()) throw ScopeError("edit set scope differs from target");
  int r = m.arity();
  MutationStats before = m.mutation_stats();
  bool changed = false;

  if (r == 1) {
    for (size_t s = m.out(m.root()).size(); s-- > 0;) {
      Value v = m.out(m.root())[s].label;
      if (tset.child(tset.root(), v) != kNoNode) {
        m.remove_arc_at(m.root(), static_cast<int>(s));
        changed = true;
      }
    }
    return summarize(m, before, changed, 0);
  }

  IsolationFrontier frontier(r);
  // pair nodes per layer with their origin (target, edit-set) nodes
  std::vector<std::vector<std::pair<NodeId, std::pair<NodeId, NodeId>>>> pairs(r);
  auto pair_node = [&](int layer, NodeId left, NodeId right) {
    NodeId p = frontier.find_pair(layer, left, right);
    if (p == kNoNode) {
      p = m.new_node(layer);
      frontier.remember_pair(layer, left, right, p);
      pairs[layer].push_back({p, {left, right}});
    }
    return p;
  };

  std::vector<NodeId> orphans;
  // first layer: redirect arcs whose label the edit set shares
  for (int s = 0; s < static_cast<int>(m.out(m.root()).size()); ++s) {
    const Mdd::OutArc& a = m.out(m.root())[s];
    NodeId y2 = tset.child(tset.root(), a.label);
    if (y2 == kNoNode) continue;
    NodeId y1 = a.child;
    orphans.push_back(y1);
    m.redirect_arc(m.root(), s, pair_node(1, y1, y2));
  }
  if (pairs[1].empty()) return ChangeSummary{};  // no shared prefix at all

  m.set_reduced(false);
  // intermediate layers: follow both sides; arcs the edit set lacks keep
  // pointing at the original nodes
  for (int l = 1; l < r - 1; ++l) {
    for (size_t k = 0; k < pairs[l].size(); ++k) {
      auto [p, origin] = pairs[l][k];
      auto [x1, x2] = origin;
      for (const Mdd::OutArc& a : m.out(x1)) {
        NodeId y2 = tset.child(x2, a.label);
        if (y2 == kNoNode)
          m.add_arc(p, a.label, a.child);
        else
          m.add_arc(p, a.label, pair_node(l + 1, a.child, y2));
      }
    }
  }
  // last layer: drop the labels both sides carry
  for (auto [p, origin] : pairs[r - 1]) {
    auto [x1, x2] = origin;
    for (const Mdd::OutArc& a : m.out(x1)) {
      if (tset.child(x2, a.label) == kNoNode)
        m.add_arc(p, a.label, m.terminal());
      else
        changed = true;
    }
    orphans.push_back(p);  // may have ended up with no arcs
  }

  sweep_orphans(m, orphans);
  unsigned long long touched = incremental_reduce(m, frontier);
  return summarize(m, before, changed, touched);
}

ChangeSummary add_set(Mdd& m, const Mdd& tset) {
  if (m.scope() != tset.scope()) throw ScopeError("edit set scope differs from target");
  int r = m.arity();
  MutationStats before = m.mutation_stats();
  bool changed = false;

  if (r == 1) {
    for (const Mdd::OutArc& a : tset.out(tset.root())) {
      if (m.child(m.root(), a.label) == kNoNode) {
        m.add_arc(m.root(), a.label, m.terminal());
        changed = true;
      }
    }
    return summarize(m, before, changed, 0);
  }

  constexpr NodeId kNil = IsolationFrontier::kNilOrigin;
  IsolationFrontier frontier(r);
  std::vector<std::vector<std::pair<NodeId, std::pair<NodeId, NodeId>>>> pairs(r);
  auto pair_node = [&](int layer, NodeId left, NodeId right) {
    NodeId p = frontier.find_pair(layer, left, right);
    if (p == kNoNode) {
      p = m.new_node(layer);
      frontier.remember_pair(layer, left, right, p);
      pairs[layer].push_back({p, {left, right}});
    }
    return p;
  };

  std::vector<NodeId> orphans;
  // first layer over the label union of both roots
  for (Value v : label_union(m, m.root(), tset, tset.root())) {
    NodeId y2 = tset.child(tset.root(), v);
    if (y2 == kNoNode) continue;  // only ours: untouched
    int slot = m.out_slot(m.root(), v);
    if (slot >= 0) {
      NodeId y1 = m.out(m.root())[slot].child;
      orphans.push_back(y1);
      m.redirect_arc(m.root(), slot, pair_node(1, y1, y2));
    } else {
      m.add_arc(m.root(), v, pair_node(1, kNil, y2));
    }
  }
  if (pairs[1].empty()) return ChangeSummary{};  // edit set was empty

  m.set_reduced(false);
  for (int l = 1; l < r - 1; ++l) {
    for (size_t k = 0; k < pairs[l].size(); ++k) {
      auto [p, origin] = pairs[l][k];
      auto [x1, x2] = origin;
      for (Value v : label_union(m, x1, tset, x2)) {
        NodeId y1 = x1 == kNil ? kNoNode : m.child(x1, v);
        NodeId y2 = tset.child(x2, v);
        if (y2 == kNoNode)
          m.add_arc(p, v, y1);
        else if (y1 == kNoNode)
          m.add_arc(p, v, pair_node(l + 1, kNil, y2));
        else
          m.add_arc(p, v, pair_node(l + 1, y1, y2));
      }
    }
  }
  // last layer: union of the labels
  for (auto [p, origin] : pairs[r - 1]) {
    auto [x1, x2] = origin;
    for (Value v : label_union(m, x1, tset, x2)) {
      m.add_arc(p, v, m.terminal());
      if (x1 == kNil || m.child(x1, v) == kNoNode) changed = true;
    }
  }

  sweep_orphans(m, orphans);
  unsigned long long touched = incremental_reduce(m, frontier);
  return summarize(m, before, changed, touched);
}

bool duality_check(const Mdd& m, const Mdd& tset) {
  if (m.scope() != tset.scope()) throw ScopeError("edit set scope differs from target");
  Mdd direct = m;
  add_set(direct, tset);
  Mdd flipped = m.complement();
  delete_set(flipped, tset);
  return equivalent(direct, flipped.complement());
}

}  // namespace mddkit::editops
