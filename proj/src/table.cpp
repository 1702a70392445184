#include "mddkit/table.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace mddkit {

TablePropagator::TablePropagator(TupleTable table, DomainStore& store)
    : scope_(table.scope), store_(&store) {
  table.check();
  rows_ = std::move(table.rows);
  std::sort(rows_.begin(), rows_.end());
  rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
  deleted_.assign(rows_.size(), 0);
}

int TablePropagator::find_row(const Tuple& t) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), t);
  if (it == rows_.end() || *it != t) return -1;
  return static_cast<int>(it - rows_.begin());
}

void TablePropagator::rebuild() {
  // a rebuild replaces the whole index outside the event trail, so any
  // frame pushed before this point must refuse to restore and go dirty
  ++version_;
  int r = scope_.arity();
  int32_t nl = 0;
  offset_.assign(r, 0);
  for (int i = 0; i < r; ++i) {
    offset_[i] = nl;
    nl += scope_.domain_size(i);
  }
  lists_.assign(nl, RevList{});
  pos_.assign(static_cast<size_t>(r) * rows_.size(), -1);
  for (int32_t id = 0; id < static_cast<int32_t>(rows_.size()); ++id) {
    if (deleted_[id]) continue;
    for (int i = 0; i < r; ++i) {
      RevList& l = lists_[list_id(i, rows_[id][i])];
      pos_[static_cast<size_t>(i) * rows_.size() + id] = l.live++;
      l.items.push_back(id);
    }
  }
  dirty_ = false;
  ++counters_.rebuilds;
}

void TablePropagator::save_size(int32_t list) {
  if (frames_.empty()) return;
  RevList& l = lists_[list];
  uint32_t serial = frames_.back().serial;
  if (l.stamp == serial) return;
  l.stamp = serial;
  events_.push_back({list, l.live});
}

void TablePropagator::remove_from_list(int32_t list, int32_t id, int var) {
  save_size(list);
  RevList& l = lists_[list];
  size_t base = static_cast<size_t>(var) * rows_.size();
  int32_t p = pos_[base + id];
  int32_t last = l.live - 1;
  int32_t other = l.items[last];
  l.items[p] = other;
  pos_[base + other] = p;
  l.items[last] = id;
  pos_[base + id] = last;
  l.live = last;
  ++counters_.element_removals;
}

bool TablePropagator::retire_tuple(int32_t id, int killed_var) {
  int r = scope_.arity();
  for (int j = 0; j < r; ++j) {
    if (j == killed_var) continue;
    Value w = rows_[id][j];
    int32_t li = list_id(j, w);
    remove_from_list(li, id, j);
    ++counters_.arcs_deactivated;
    if (lists_[li].live == 0 && store_->contains(j, w)) {
      ++counters_.domain_removals;
      store_->remove(j, w);
      if (store_->size(j) == 0) return false;
    }
  }
  return true;
}

bool TablePropagator::kill_value(int var, Value v) {
  int32_t li = list_id(var, v);
  RevList& l = lists_[li];
  if (l.live == 0) return true;
  save_size(li);
  int32_t k = l.live;
  counters_.arcs_deactivated += static_cast<unsigned long long>(k);
  ++counters_.list_clears;
  l.live = 0;
  bool ok = true;
  for (int32_t s = 0; s < k && ok; ++s) ok = retire_tuple(l.items[s], var);
  return ok;
}

bool TablePropagator::drain() {
  const auto& log = store_->log();
  while (cursor_ < log.size()) {
    int var = log[cursor_].var;
    Value v = log[cursor_++].value;
    if (store_->size(var) == 0) return false;
    if (!kill_value(var, v)) return false;
  }
  return true;
}

bool TablePropagator::propagate() {
  ++counters_.propagate_calls;
  if (dirty_) {
    rebuild();
    cursor_ = store_->log().size();
    for (int i = 0; i < scope_.arity(); ++i)
      for (Value v = 0; v < scope_.domain_size(i); ++v) {
        bool in_dom = store_->contains(i, v);
        if (!in_dom && lists_[list_id(i, v)].live > 0) {
          if (!kill_value(i, v)) return false;
        } else if (in_dom && lists_[list_id(i, v)].live == 0) {
          ++counters_.domain_removals;
          store_->remove(i, v);
          if (store_->size(i) == 0) return false;
        }
      }
  }
  return drain();
}

void TablePropagator::push_level() {
  ++serial_;
  frames_.push_back({version_, serial_, events_.size(), cursor_});
}

void TablePropagator::pop_level() {
  assert(!frames_.empty());
  Frame f = frames_.back();
  frames_.pop_back();
  if (f.version == version_) {
    for (size_t k = events_.size(); k-- > f.events;) {
      RevList& l = lists_[events_[k].list];
      counters_.arcs_restored +=
          static_cast<unsigned long long>(events_[k].old_live - l.live);
      l.live = events_[k].old_live;
    }
  } else {
    dirty_ = true;
  }
  events_.resize(f.events);
  cursor_ = f.cursor;
}

bool TablePropagator::persistent_delete(const TupleTable& tuples) {
  if (tuples.scope != scope_) throw ScopeError("persistent delete scope mismatch");
  tuples.check();
  ++persistent_events_;
  int r = scope_.arity();
  bool any = false;
  for (const Tuple& t : tuples.rows) {
    int id = find_row(t);
    if (id < 0 || deleted_[id]) continue;
    deleted_[id] = 1;
    any = true;
    // one support entry per variable goes away for good
    counters_.arcs_deleted += static_cast<unsigned long long>(r);
  }
  if (any) dirty_ = true;
  return propagate();
}

bool TablePropagator::live_contains(const Tuple& t) const {
  int id = find_row(t);
  if (id < 0 || deleted_[id]) return false;
  for (int i = 0; i < scope_.arity(); ++i)
    if (!store_->contains(i, t[i])) return false;
  return true;
}

std::vector<Tuple> TablePropagator::live_tuples() const {
  std::vector<Tuple> out;
  for (int32_t id = 0; id < static_cast<int32_t>(rows_.size()); ++id) {
    if (deleted_[id]) continue;
    bool live = true;
    for (int i = 0; i < scope_.arity() && live; ++i) live = store_->contains(i, rows_[id][i]);
    if (live) out.push_back(rows_[id]);
  }
  return out;
}

std::vector<Tuple> TablePropagator::remaining_rows() const {
  std::vector<Tuple> out;
  for (int32_t id = 0; id < static_cast<int32_t>(rows_.size()); ++id)
    if (!deleted_[id]) out.push_back(rows_[id]);
  return out;
}

std::string TablePropagator::state_digest() const {
  std::ostringstream os;
  for (int i = 0; i < scope_.arity(); ++i) {
    os << "d" << i << ":";
    for (Value v : store_->sorted_values(i)) os << " " << v;
    os << "\n";
  }
  for (const Tuple& t : live_tuples()) {
    os << "t";
    for (Value v : t) os << " " << v;
    os << "\n";
  }
  return os.str();
}

bool TablePropagator::check_invariants() const {
  if (dirty_) return false;
  int r = scope_.arity();
  for (int i = 0; i < r; ++i)
    for (Value v = 0; v < scope_.domain_size(i); ++v) {
      const RevList& l = lists_[list_id(i, v)];
      if (store_->contains(i, v) != (l.live > 0)) return false;
      for (int32_t k = 0; k < l.live; ++k) {
        int32_t id = l.items[k];
        if (deleted_[id]) return false;
        if (rows_[id][i] != v) return false;
        if (pos_[static_cast<size_t>(i) * rows_.size() + id] != k) return false;
        for (int j = 0; j < r; ++j)
          if (!store_->contains(j, rows_[id][j])) return false;
      }
    }
  return true;
}

}  // namespace mddkit
