#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mddkit/mdd.hpp"
#include "mddkit/types.hpp"

namespace mddkit {

/// Current variable domains, shared by every constraint of a problem.
/// Removals append to a global log; each propagator keeps its own cursor
/// into that log, so one constraint's filtering wakes up the others.
/// push_level/pop_level give exact size-based restoration.
class DomainStore {
 public:
  struct Removal {
    int32_t var;
    Value value;
  };

  explicit DomainStore(Scope scope);

  const Scope& scope() const { return scope_; }
  int size(int var) const { return live_[var]; }
  bool contains(int var, Value v) const { return pos_[var][v] < live_[var]; }
  Value value_at(int var, int k) const { return dense_[var][k]; }
  std::vector<Value> sorted_values(int var) const;
  bool wiped() const;

  /// False when the value was already gone. Logged and trailed otherwise.
  bool remove(int var, Value v);
  /// Remove every value of the variable except v. v must be present.
  void assign(int var, Value v);

  const std::vector<Removal>& log() const { return log_; }

  void push_level();
  void pop_level();
  int level() const { return static_cast<int>(frames_.size()); }

 private:
  struct Frame {
    uint32_t serial;
    size_t log_len;
    std::vector<std::pair<int32_t, int32_t>> saved_sizes;  // (var, live)
  };

  Scope scope_;
  std::vector<std::vector<Value>> dense_;
  std::vector<std::vector<int32_t>> pos_;
  std::vector<int32_t> live_;
  std::vector<uint32_t> stamp_;  // last frame serial that saved this var
  std::vector<Removal> log_;
  std::vector<Frame> frames_;
  uint32_t serial_ = 0;
};

/// How a batch removal against one support or adjacency list is applied.
/// kAuto rebuilds the list from its survivors when more than half of it is
/// doomed, and removes element by element otherwise; the forced policies
/// exist so tests can check that both strategies land on the same state.
enum class ResetPolicy { kAuto, kAlwaysElementwise, kAlwaysReset };

inline bool reset_wins(size_t live, size_t doomed) { return doomed * 2 > live; }

/// Tallies of everything the propagator does, for the bench harness.
/// The structural group counts in-place edits made by persistent deletions;
/// the rest counts reversible marking work during search.
struct EventCounters {
  unsigned long long arcs_deactivated = 0;
  unsigned long long nodes_deactivated = 0;
  unsigned long long arcs_restored = 0;
  unsigned long long nodes_restored = 0;
  unsigned long long domain_removals = 0;
  unsigned long long element_removals = 0;
  unsigned long long resets = 0;
  unsigned long long list_clears = 0;
  unsigned long long rebuilds = 0;
  unsigned long long propagate_calls = 0;
  unsigned long long nodes_created = 0;
  unsigned long long nodes_deleted = 0;
  unsigned long long arcs_created = 0;
  unsigned long long arcs_deleted = 0;

  unsigned long long structural_modifications() const {
    return nodes_created + nodes_deleted + arcs_created + arcs_deleted;
  }
  std::string dump() const;  // key=value lines
};

/// Arc-consistency propagator for one MDD constraint.
///
/// The owned diagram always equals the originally built tuple set minus
/// every tuple deleted persistently so far; search-time filtering never
/// touches the structure. On top of it sits a flat arc index with one
/// support list per (variable, value) plus live out/in adjacency per node,
/// all as swap-remove lists whose sizes are trailed per level. Removing a
/// domain value kills the arcs of its support list; a node losing its last
/// incoming or outgoing live arc dies and takes its other side's arcs with
/// it; a support list running empty removes that value from the domain.
///
/// A persistent deletion structurally edits the diagram in place (after
/// saving the snapshot for the replay log), which invalidates the flat
/// index: frames pushed before the edit restore nothing of it, and the next
/// propagate() rebuilds the index from the current structure and re-filters
/// against the current domains, which restarts arc consistency from scratch.
class MddPropagator {
 public:
  MddPropagator(Mdd mdd, DomainStore& store, ResetPolicy policy = ResetPolicy::kAuto);

  const Scope& scope() const { return mdd_.scope(); }
  /// The structural diagram: original minus all persistent deletions.
  const Mdd& structural() const { return mdd_; }

  /// Process all domain removals logged since the last call (plus a full
  /// index rebuild when the structure changed), cascading to fixpoint.
  /// False on a domain wipeout; the state stays consistent for pop_level.
  bool propagate();

  void push_level();
  void pop_level();

  /// Delete the tuples for good: survives any later backtrack. Logged,
  /// snapshotted, applied in place, then propagation restarts.
  bool persistent_delete(const TupleTable& tuples);

  /// Replays the persistent log onto the stored snapshot and compares with
  /// the live structure. True when there is nothing to verify yet.
  bool replay_verifies() const;

  /// True when t survives both persistent deletions and current filtering.
  /// Only valid at fixpoint (right after a successful propagate).
  bool live_contains(const Tuple& t) const;
  /// All currently live tuples, in lexicographic order. Test-scale sizes.
  std::vector<Tuple> live_tuples() const;

  /// Domains plus live arc triples, sorted; equal digests = equal states.
  std::string state_digest() const;

  /// Support-list soundness at fixpoint (used by instrumented checks):
  /// a value is in its domain iff its list is non-empty, listed arcs join
  /// live nodes, and live interior nodes keep arcs on both sides.
  bool check_invariants() const;

  const EventCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = EventCounters{}; }

  int persistent_log_size() const { return static_cast<int>(plog_.size()); }

 private:
  struct ArcRec {
    NodeId from;
    NodeId to;
    Value label;
    int32_t var;
    int32_t pos[3];  // position in support / parent-out / child-in list
  };
  struct RevList {
    std::vector<int32_t> items;
    int32_t live = 0;
    uint32_t stamp = 0;
    int8_t kind = 0;  // which pos[] slot this list maintains
  };
  struct Event {
    int32_t list;
    int32_t old_live;
    int32_t payload;  // index into payloads_, or -1 for a plain size event
  };
  struct Frame {
    uint64_t version;
    uint32_t serial;
    size_t events;
    size_t payloads;
    size_t deaths;
    size_t cursor;
  };
  struct Death {
    NodeId node;
    bool from_in;
  };
  struct PlogEntry {
    int level;
    std::vector<Tuple> rows;
  };

  void rebuild();
  bool drain();
  bool kill_values(int var, const std::vector<Value>& vals);
  bool process_deaths(std::vector<Death>& queue);
  bool drop_support(int32_t arc);  // false on domain wipeout
  void remove_from_list(int32_t list, int32_t arc);
  void reset_list(int32_t list);  // drop the arcs flagged in doomed_
  void save_size(int32_t list);
  void mark_dead(NodeId n, bool from_in, std::vector<Death>& queue);

  int32_t sup_id(int var, Value v) const { return sup_offset_[var] + v; }

  Mdd mdd_;
  DomainStore* store_;
  ResetPolicy policy_;
  uint64_t version_ = 1;
  bool dirty_ = true;
  size_t cursor_ = 0;

  std::vector<ArcRec> arcs_;
  std::vector<RevList> lists_;
  std::vector<int32_t> sup_offset_;    // per variable
  std::vector<int32_t> out_id_, in_id_;  // per structural node id
  std::vector<int32_t> arc_base_;      // first arc id of a node's out-arcs
  std::vector<char> dead_;

  std::vector<Event> events_;
  std::vector<std::vector<int32_t>> payloads_;
  std::vector<NodeId> dead_stack_;
  std::vector<Frame> frames_;
  uint32_t serial_ = 0;

  // batch scratch space, sized by rebuild
  std::vector<int32_t> scratch_;  // per node: doomed-arc count in the batch
  std::vector<char> doomed_;      // per arc: member of the current batch
  std::vector<int32_t> batch_;
  std::vector<NodeId> touched_;
  std::vector<int32_t> reset_buf_;

  std::vector<PlogEntry> plog_;
  std::optional<Mdd> snapshot_;
  size_t snapshot_baked_ = 0;

  EventCounters counters_;
};

}  // namespace mddkit
