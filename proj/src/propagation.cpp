#include "mddkit/propagation.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <numeric>
#include <sstream>

#include "mddkit/builders.hpp"
#include "mddkit/editops.hpp"

namespace mddkit {

// --- DomainStore ---

DomainStore::DomainStore(Scope scope) : scope_(std::move(scope)) {
  int r = scope_.arity();
  dense_.resize(r);
  pos_.resize(r);
  live_.resize(r);
  stamp_.assign(r, 0);
  for (int i = 0; i < r; ++i) {
    int d = scope_.domain_size(i);
    dense_[i].resize(d);
    pos_[i].resize(d);
    std::iota(dense_[i].begin(), dense_[i].end(), 0);
    std::iota(pos_[i].begin(), pos_[i].end(), 0);
    live_[i] = d;
  }
}

std::vector<Value> DomainStore::sorted_values(int var) const {
  std::vector<Value> vals(dense_[var].begin(), dense_[var].begin() + live_[var]);
  std::sort(vals.begin(), vals.end());
  return vals;
}

bool DomainStore::wiped() const {
  for (int32_t s : live_)
    if (s == 0) return true;
  return false;
}

bool DomainStore::remove(int var, Value v) {
  if (pos_[var][v] >= live_[var]) return false;
  if (!frames_.empty()) {
    Frame& f = frames_.back();
    if (stamp_[var] != f.serial) {
      stamp_[var] = f.serial;
      f.saved_sizes.emplace_back(var, live_[var]);
    }
  }
  int32_t p = pos_[var][v];
  int32_t last = live_[var] - 1;
  Value w = dense_[var][last];
  dense_[var][p] = w;
  pos_[var][w] = p;
  dense_[var][last] = v;
  pos_[var][v] = last;
  live_[var] = last;
  log_.push_back({static_cast<int32_t>(var), v});
  return true;
}

void DomainStore::assign(int var, Value v) {
  assert(contains(var, v));
  while (live_[var] > 1) {
    Value w = dense_[var][live_[var] - 1];
    if (w == v) w = dense_[var][live_[var] - 2];
    remove(var, w);
  }
}

void DomainStore::push_level() { frames_.push_back({++serial_, log_.size(), {}}); }

void DomainStore::pop_level() {
  assert(!frames_.empty());
  Frame& f = frames_.back();
  // reverse order: a stale stamp can save a variable twice in one frame, and
  // only the first entry holds the size from before the frame
  for (size_t k = f.saved_sizes.size(); k-- > 0;) {
    auto [var, sz] = f.saved_sizes[k];
    live_[var] = sz;
  }
  log_.resize(f.log_len);
  frames_.pop_back();
}

// --- EventCounters ---

std::string EventCounters::dump() const {
  std::ostringstream os;
  os << "arcs_deactivated=" << arcs_deactivated << "\n"
     << "nodes_deactivated=" << nodes_deactivated << "\n"
     << "arcs_restored=" << arcs_restored << "\n"
     << "nodes_restored=" << nodes_restored << "\n"
     << "domain_removals=" << domain_removals << "\n"
     << "element_removals=" << element_removals << "\n"
     << "resets=" << resets << "\n"
     << "list_clears=" << list_clears << "\n"
     << "rebuilds=" << rebuilds << "\n"
     << "propagate_calls=" << propagate_calls << "\n"
     << "nodes_created=" << nodes_created << "\n"
     << "nodes_deleted=" << nodes_deleted << "\n"
     << "arcs_created=" << arcs_created << "\n"
     << "arcs_deleted=" << arcs_deleted << "\n";
  return os.str();
}

// --- MddPropagator ---

MddPropagator::MddPropagator(Mdd mdd, DomainStore& store, ResetPolicy policy)
    : mdd_(std::move(mdd)), store_(&store), policy_(policy) {
  if (mdd_.scope() != store.scope()) throw ScopeError("propagator and store scopes differ");
}

void MddPropagator::rebuild() {
  // a rebuild replaces the whole index outside the event trail, so any
  // frame pushed before this point must refuse to restore and go dirty
  ++version_;
  int r = mdd_.arity();
  int32_t nsup = 0;
  sup_offset_.assign(r, 0);
  for (int i = 0; i < r; ++i) {
    sup_offset_[i] = nsup;
    nsup += mdd_.scope().domain_size(i);
  }

  NodeId bound = mdd_.id_bound();
  out_id_.assign(bound, -1);
  in_id_.assign(bound, -1);
  arc_base_.assign(bound, 0);

  // size the list table once and recycle every item buffer; rebuilds happen
  // per sibling branch after a persistent deletion, so allocator churn here
  // would dominate large searches
  size_t need = static_cast<size_t>(nsup);
  for (int l = 0; l <= r; ++l) need += 2 * mdd_.layer(l).size();
  if (lists_.size() < need) lists_.resize(need);
  auto recycle = [&](size_t at, int8_t kind) {
    RevList& l = lists_[at];
    l.items.clear();
    l.live = 0;
    l.stamp = 0;
    l.kind = kind;
  };
  for (int32_t i = 0; i < nsup; ++i) recycle(i, 0);
  size_t next = static_cast<size_t>(nsup);
  for (int l = 0; l <= r; ++l)
    for (NodeId n : mdd_.layer(l)) {
      out_id_[n] = static_cast<int32_t>(next);
      recycle(next++, 1);
      in_id_[n] = static_cast<int32_t>(next);
      recycle(next++, 2);
    }

  arcs_.clear();
  for (int l = 0; l < r; ++l)
    for (NodeId n : mdd_.layer(l)) {
      arc_base_[n] = static_cast<int32_t>(arcs_.size());
      for (const Mdd::OutArc& a : mdd_.out(n)) {
        int32_t id = static_cast<int32_t>(arcs_.size());
        ArcRec rec{n, a.child, a.label, l, {0, 0, 0}};
        RevList& sup = lists_[sup_id(l, a.label)];
        rec.pos[0] = sup.live++;
        sup.items.push_back(id);
        RevList& po = lists_[out_id_[n]];
        rec.pos[1] = po.live++;
        po.items.push_back(id);
        RevList& ci = lists_[in_id_[a.child]];
        rec.pos[2] = ci.live++;
        ci.items.push_back(id);
        arcs_.push_back(rec);
      }
    }

  dead_.assign(bound, 0);
  scratch_.assign(bound, 0);
  doomed_.assign(arcs_.size(), 0);
  dirty_ = false;
  ++counters_.rebuilds;
}

void MddPropagator::save_size(int32_t list) {
  if (frames_.empty()) return;
  RevList& l = lists_[list];
  uint32_t serial = frames_.back().serial;
  if (l.stamp == serial) return;
  l.stamp = serial;
  events_.push_back({list, l.live, -1});
}

void MddPropagator::remove_from_list(int32_t list, int32_t arc) {
  save_size(list);
  RevList& l = lists_[list];
  int8_t k = l.kind;
  int32_t p = arcs_[arc].pos[k];
  int32_t last = l.live - 1;
  int32_t other = l.items[last];
  l.items[p] = other;
  arcs_[other].pos[k] = p;
  l.items[last] = arc;
  arcs_[arc].pos[k] = last;
  l.live = last;
  ++counters_.element_removals;
}

// Rebuild the live prefix without its doomed members. One trailed event holds
// the previous prefix, so restoration ignores how survivors were reordered.
// The dead suffix past `live` never moves; touching it would make every reset
// cost the structural degree instead of the live one.
void MddPropagator::reset_list(int32_t list) {
  RevList& l = lists_[list];
  int32_t old_live = l.live;
  if (!frames_.empty()) {
    events_.push_back({list, old_live, static_cast<int32_t>(payloads_.size())});
    payloads_.emplace_back(l.items.begin(), l.items.begin() + old_live);
  }
  reset_buf_.clear();
  for (int32_t k = 0; k < old_live; ++k)
    if (!doomed_[l.items[k]]) reset_buf_.push_back(l.items[k]);
  int32_t new_live = static_cast<int32_t>(reset_buf_.size());
  for (int32_t k = 0; k < old_live; ++k)
    if (doomed_[l.items[k]]) reset_buf_.push_back(l.items[k]);
  std::copy(reset_buf_.begin(), reset_buf_.end(), l.items.begin());
  int8_t kd = l.kind;
  for (int32_t j = 0; j < old_live; ++j) arcs_[l.items[j]].pos[kd] = j;
  l.live = new_live;
  ++counters_.resets;
}

void MddPropagator::mark_dead(NodeId n, bool from_in, std::vector<Death>& queue) {
  dead_[n] = 1;
  dead_stack_.push_back(n);
  queue.push_back({n, from_in});
  ++counters_.nodes_deactivated;
}

bool MddPropagator::drop_support(int32_t arc) {
  const ArcRec& rec = arcs_[arc];
  int32_t list = sup_id(rec.var, rec.label);
  remove_from_list(list, arc);
  if (lists_[list].live == 0 && store_->contains(rec.var, rec.label)) {
    ++counters_.domain_removals;
    store_->remove(rec.var, rec.label);
    if (store_->size(rec.var) == 0) return false;
  }
  return true;
}

bool MddPropagator::process_deaths(std::vector<Death>& queue) {
  // a dead node's own side stays frozen: restoring the arcs that killed it
  // brings the node back with its lists intact
  while (!queue.empty()) {
    Death d = queue.back();
    queue.pop_back();
    NodeId n = d.node;
    if (d.from_in) {
      const RevList& out = lists_[out_id_[n]];
      for (int32_t k = 0; k < out.live; ++k) {
        int32_t a = out.items[k];
        ++counters_.arcs_deactivated;
        if (!drop_support(a)) return false;
        NodeId c = arcs_[a].to;
        if (!dead_[c]) {
          remove_from_list(in_id_[c], a);
          if (lists_[in_id_[c]].live == 0 && c != mdd_.terminal()) mark_dead(c, true, queue);
        }
      }
    } else {
      const RevList& in = lists_[in_id_[n]];
      for (int32_t k = 0; k < in.live; ++k) {
        int32_t a = in.items[k];
        ++counters_.arcs_deactivated;
        if (!drop_support(a)) return false;
        NodeId p = arcs_[a].from;
        if (!dead_[p]) {
          remove_from_list(out_id_[p], a);
          if (lists_[out_id_[p]].live == 0 && p != mdd_.root()) mark_dead(p, false, queue);
        }
      }
    }
  }
  return true;
}

bool MddPropagator::kill_values(int var, const std::vector<Value>& vals) {
  batch_.clear();
  for (Value v : vals) {
    int32_t li = sup_id(var, v);
    RevList& l = lists_[li];
    if (l.live == 0) continue;
    batch_.insert(batch_.end(), l.items.begin(), l.items.begin() + l.live);
    save_size(li);
    counters_.arcs_deactivated += l.live;
    l.live = 0;
    ++counters_.list_clears;
  }
  if (batch_.empty()) return true;
  for (int32_t a : batch_) doomed_[a] = 1;

  std::vector<Death> deaths;
  // one side at a time: count doomed arcs per node, reset lists losing more
  // than half, drain the rest element-wise, then collect deaths
  for (int side = 0; side < 2; ++side) {
    const std::vector<int32_t>& ids = side == 0 ? out_id_ : in_id_;
    touched_.clear();
    for (int32_t a : batch_) {
      NodeId n = side == 0 ? arcs_[a].from : arcs_[a].to;
      if (dead_[n]) continue;
      if (scratch_[n]++ == 0) touched_.push_back(n);
    }
    for (NodeId n : touched_) {
      bool use_reset = policy_ == ResetPolicy::kAlwaysReset ||
                       (policy_ == ResetPolicy::kAuto &&
                        reset_wins(lists_[ids[n]].live, static_cast<size_t>(scratch_[n])));
      if (use_reset) {
        reset_list(ids[n]);
        scratch_[n] = -1;
      }
    }
    for (int32_t a : batch_) {
      NodeId n = side == 0 ? arcs_[a].from : arcs_[a].to;
      if (!dead_[n] && scratch_[n] > 0) remove_from_list(ids[n], a);
    }
    for (NodeId n : touched_) {
      scratch_[n] = 0;
      if (dead_[n] || lists_[ids[n]].live > 0) continue;
      if (side == 0 && n != mdd_.root()) mark_dead(n, false, deaths);
      if (side == 1 && n != mdd_.terminal()) mark_dead(n, true, deaths);
    }
  }
  for (int32_t a : batch_) doomed_[a] = 0;
  return process_deaths(deaths);
}

bool MddPropagator::drain() {
  const auto& log = store_->log();
  std::vector<Value> vals;
  while (cursor_ < log.size()) {
    int var = log[cursor_].var;
    vals.clear();
    while (cursor_ < log.size() && log[cursor_].var == var) vals.push_back(log[cursor_++].value);
    if (store_->size(var) == 0) return false;
    if (!kill_values(var, vals)) return false;
  }
  return true;
}

bool MddPropagator::propagate() {
  ++counters_.propagate_calls;
  if (dirty_) {
    rebuild();
    cursor_ = store_->log().size();
    // re-filter from scratch: the structure changed under the marks, so arc
    // consistency restarts against the current domains
    std::vector<Value> one(1);
    for (int i = 0; i < mdd_.arity(); ++i)
      for (Value v = 0; v < mdd_.scope().domain_size(i); ++v) {
        bool in_dom = store_->contains(i, v);
        if (!in_dom && lists_[sup_id(i, v)].live > 0) {
          one[0] = v;
          if (!kill_values(i, one)) return false;
        } else if (in_dom && lists_[sup_id(i, v)].live == 0) {
          ++counters_.domain_removals;
          store_->remove(i, v);
          if (store_->size(i) == 0) return false;
        }
      }
  }
  return drain();
}

void MddPropagator::push_level() {
  ++serial_;
  frames_.push_back(
      {version_, serial_, events_.size(), payloads_.size(), dead_stack_.size(), cursor_});
}

void MddPropagator::pop_level() {
  assert(!frames_.empty());
  Frame f = frames_.back();
  frames_.pop_back();
  if (f.version == version_) {
    for (size_t k = events_.size(); k-- > f.events;) {
      const Event& e = events_[k];
      RevList& l = lists_[e.list];
      if (e.payload >= 0) {
        const std::vector<int32_t>& prefix = payloads_[e.payload];
        std::copy(prefix.begin(), prefix.end(), l.items.begin());
        int8_t kd = l.kind;
        for (size_t j = 0; j < prefix.size(); ++j)
          arcs_[l.items[j]].pos[kd] = static_cast<int32_t>(j);
      }
      if (l.kind == 0) counters_.arcs_restored += static_cast<unsigned long long>(e.old_live - l.live);
      l.live = e.old_live;
    }
    for (size_t k = dead_stack_.size(); k-- > f.deaths;) {
      dead_[dead_stack_[k]] = 0;
      ++counters_.nodes_restored;
    }
  } else {
    // the structure changed since this frame was pushed; its records point
    // at a dead index, so drop them and rebuild lazily
    dirty_ = true;
  }
  events_.resize(f.events);
  payloads_.resize(f.payloads);
  dead_stack_.resize(f.deaths);
  cursor_ = f.cursor;
}

bool MddPropagator::persistent_delete(const TupleTable& tuples) {
  if (tuples.scope != mdd_.scope()) throw ScopeError("persistent delete scope mismatch");
  tuples.check();
  // replay base first: snapshot plus the entries after it reproduce the
  // current structure
  snapshot_ = mdd_;
  snapshot_baked_ = plog_.size();
  plog_.push_back({store_->level(), tuples.rows});

  Mdd tset = builders::build_from_sorted_table(tuples);
  editops::ChangeSummary s = editops::delete_set(mdd_, tset);
  counters_.nodes_created += s.nodes_created;
  counters_.nodes_deleted += s.nodes_deleted;
  counters_.arcs_created += s.arcs_created;
  counters_.arcs_deleted += s.arcs_deleted;
  // any node churn invalidates the index, even when the tuple set kept its
  // content: the reducer may swap a rebuilt twin in for an original node
  if (s.total_modifications() > 0) dirty_ = true;
  return propagate();
}

bool MddPropagator::replay_verifies() const {
  if (!snapshot_) return plog_.empty();
  Mdd copy = *snapshot_;
  for (size_t k = snapshot_baked_; k < plog_.size(); ++k) {
    TupleTable t{copy.scope(), plog_[k].rows, false};
    editops::delete_set(copy, builders::build_from_sorted_table(t));
  }
  return equivalent(copy, mdd_);
}

bool MddPropagator::live_contains(const Tuple& t) const {
  assert(!dirty_);
  mdd_.scope().check_tuple(t);
  NodeId n = mdd_.root();
  for (int i = 0; i < mdd_.arity(); ++i) {
    int slot = mdd_.out_slot(n, t[i]);
    if (slot < 0) return false;
    int32_t a = arc_base_[n] + slot;
    if (arcs_[a].pos[0] >= lists_[sup_id(i, t[i])].live) return false;
    n = arcs_[a].to;
  }
  return true;
}

std::vector<Tuple> MddPropagator::live_tuples() const {
  assert(!dirty_);
  std::vector<Tuple> out;
  Tuple cur(mdd_.arity());
  auto rec = [&](auto&& self, NodeId n, int depth) -> void {
    if (depth == mdd_.arity()) {
      out.push_back(cur);
      return;
    }
    auto span = mdd_.out(n);
    for (size_t s = 0; s < span.size(); ++s) {
      int32_t a = arc_base_[n] + static_cast<int32_t>(s);
      if (arcs_[a].pos[0] >= lists_[sup_id(depth, span[s].label)].live) continue;
      cur[depth] = span[s].label;
      self(self, span[s].child, depth + 1);
    }
  };
  rec(rec, mdd_.root(), 0);
  return out;
}

std::string MddPropagator::state_digest() const {
  assert(!dirty_);
  std::ostringstream os;
  for (int i = 0; i < mdd_.arity(); ++i) {
    os << "d" << i << ":";
    for (Value v : store_->sorted_values(i)) os << " " << v;
    os << "\n";
  }
  std::vector<std::array<int32_t, 3>> live;
  for (size_t a = 0; a < arcs_.size(); ++a)
    if (arcs_[a].pos[0] < lists_[sup_id(arcs_[a].var, arcs_[a].label)].live)
      live.push_back({arcs_[a].from, arcs_[a].label, arcs_[a].to});
  std::sort(live.begin(), live.end());
  for (const auto& t : live) os << "a " << t[0] << " " << t[1] << " " << t[2] << "\n";
  return os.str();
}

bool MddPropagator::check_invariants() const {
  if (dirty_) return false;
  int r = mdd_.arity();
  for (int i = 0; i < r; ++i)
    for (Value v = 0; v < mdd_.scope().domain_size(i); ++v) {
      const RevList& l = lists_[sup_id(i, v)];
      if (store_->contains(i, v) != (l.live > 0)) return false;
      for (int32_t k = 0; k < l.live; ++k) {
        const ArcRec& rec = arcs_[l.items[k]];
        if (rec.var != i || rec.label != v) return false;
        if (rec.pos[0] != k) return false;
        if (dead_[rec.from] || dead_[rec.to]) return false;
        if (rec.pos[1] >= lists_[out_id_[rec.from]].live) return false;
        if (rec.pos[2] >= lists_[in_id_[rec.to]].live) return false;
      }
    }
  for (int l = 1; l < r; ++l)
    for (NodeId n : mdd_.layer(l)) {
      if (dead_[n]) continue;
      if (lists_[out_id_[n]].live == 0 || lists_[in_id_[n]].live == 0) return false;
    }
  return true;
}

}  // namespace mddkit
