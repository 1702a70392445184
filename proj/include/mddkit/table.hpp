#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mddkit/propagation.hpp"
#include "mddkit/types.hpp"

namespace mddkit {

/// Explicit-table filtering baseline with the same outward contract as
/// MddPropagator: per (variable, value) support lists hold tuple ids, sizes
/// are trailed per level, and persistent deletions version the index so a
/// backtrack across one rebuilds and refilters.
///
/// A tuple is live while every one of its values sits in the store and it
/// has not been persistently deleted. Deleting a tuple costs one list
/// removal per variable, so the persistent modification count grows
/// linearly with the number of deleted tuples regardless of table shape.
class TablePropagator {
 public:
  TablePropagator(TupleTable table, DomainStore& store);

  const Scope& scope() const { return scope_; }
  /// Rows never persistently deleted, in lexicographic order.
  std::vector<Tuple> remaining_rows() const;

  /// Drains store removals (and rebuilds first when the index is stale).
  /// False on a domain wipeout; the state stays consistent for pop_level.
  bool propagate();

  void push_level();
  void pop_level();

  /// Removes the given rows for the rest of the search. Rows absent from
  /// the table are ignored. Returns propagate()'s verdict.
  bool persistent_delete(const TupleTable& tuples);

  bool live_contains(const Tuple& t) const;
  std::vector<Tuple> live_tuples() const;
  std::string state_digest() const;
  bool check_invariants() const;

  const EventCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = EventCounters{}; }
  int persistent_log_size() const { return persistent_events_; }

 private:
  struct RevList {
    std::vector<int32_t> items;
    int32_t live = 0;
    uint32_t stamp = 0;
  };
  struct Event {
    int32_t list;
    int32_t old_live;
  };
  struct Frame {
    uint64_t version;
    uint32_t serial;
    size_t events;
    size_t cursor;
  };

  int32_t list_id(int var, Value v) const { return offset_[var] + v; }
  void rebuild();
  bool drain();
  bool kill_value(int var, Value v);
  bool retire_tuple(int32_t id, int killed_var);
  void save_size(int32_t list);
  void remove_from_list(int32_t list, int32_t id, int var);
  int find_row(const Tuple& t) const;

  Scope scope_;
  std::vector<Tuple> rows_;
  std::vector<char> deleted_;

  std::vector<RevList> lists_;
  std::vector<int32_t> offset_;
  // pos_[var * rows + id] = slot of id inside its var list
  std::vector<int32_t> pos_;

  DomainStore* store_;
  uint64_t version_ = 1;
  bool dirty_ = true;
  size_t cursor_ = 0;
  int persistent_events_ = 0;

  std::vector<Event> events_;
  std::vector<Frame> frames_;
  uint32_t serial_ = 0;
  EventCounters counters_;
};

}  // namespace mddkit
