#include "mddkit/solver.hpp"

#include <chrono>
#include <memory>
#include <sstream>

#include "mddkit/propagation.hpp"
#include "mddkit/table.hpp"

namespace mddkit::solver {

void Problem::check() const {
  int r = scope.arity();
  for (size_t ci = 0; ci < constraints.size(); ++ci) {
    const Constraint& c = constraints[ci];
    std::string where = "constraint " + std::to_string(ci);
    if (c.vars.empty()) throw ScopeError(where + " has no variables");
    if (static_cast<int>(c.vars.size()) != c.mdd.scope().arity())
      throw ScopeError(where + " arity differs from its diagram");
    for (size_t k = 0; k < c.vars.size(); ++k) {
      if (c.vars[k] < 0 || c.vars[k] >= r)
        throw ScopeError(where + " variable index out of range");
      if (k > 0 && c.vars[k] <= c.vars[k - 1])
        throw ScopeError(where + " variables must be strictly increasing");
      if (c.mdd.scope().domain_size(static_cast<int>(k)) != scope.domain_size(c.vars[k]))
        throw ScopeError(where + " domain size differs from the problem at position " +
                         std::to_string(k));
    }
  }
  long long prev = 0;
  for (size_t ei = 0; ei < script.size(); ++ei) {
    const DeletionEvent& e = script[ei];
    std::string where = "script event " + std::to_string(ei);
    if (e.trigger <= prev)
      throw ScopeError(where + " trigger must exceed the previous one (and be >= 1)");
    prev = e.trigger;
    if (e.constraint < 0 || e.constraint >= static_cast<int>(constraints.size()))
      throw ScopeError(where + " targets a missing constraint");
    if (e.tuples.scope != constraints[e.constraint].mdd.scope())
      throw ScopeError(where + " scope differs from its constraint");
    e.tuples.check();
  }
}

std::string SearchStats::dump() const {
  std::ostringstream os;
  os << "nodes_visited=" << nodes_visited << "\n";
  os << "backtracks=" << backtracks << "\n";
  os << "script_events=" << script_events << "\n";
  os << "modifications=" << modifications << "\n";
  os << "solve_ms=" << solve_ms << "\n";
  return os.str();
}

namespace {

/// The slice of the propagator surface the search host needs, so one host
/// drives either backend.
class ConstraintBackend {
 public:
  virtual ~ConstraintBackend() = default;
  virtual bool propagate() = 0;
  virtual void push_level() = 0;
  virtual void pop_level() = 0;
  virtual bool persistent_delete(const TupleTable& tuples) = 0;
  virtual const EventCounters& counters() const = 0;
};

class MddBackend final : public ConstraintBackend {
 public:
  MddBackend(Mdd mdd, DomainStore& store) : prop_(std::move(mdd), store) {}
  bool propagate() override { return prop_.propagate(); }
  void push_level() override { prop_.push_level(); }
  void pop_level() override { prop_.pop_level(); }
  bool persistent_delete(const TupleTable& t) override { return prop_.persistent_delete(t); }
  const EventCounters& counters() const override { return prop_.counters(); }

 private:
  MddPropagator prop_;
};

class TableBackend final : public ConstraintBackend {
 public:
  TableBackend(TupleTable table, DomainStore& store) : prop_(std::move(table), store) {}
  bool propagate() override { return prop_.propagate(); }
  void push_level() override { prop_.push_level(); }
  void pop_level() override { prop_.pop_level(); }
  bool persistent_delete(const TupleTable& t) override { return prop_.persistent_delete(t); }
  const EventCounters& counters() const override { return prop_.counters(); }

 private:
  TablePropagator prop_;
};

/// Per-constraint search state: its own store over the constraint scope,
/// the backend, and two log cursors tying it to the master store.
struct CState {
  const std::vector<int>* vars = nullptr;
  std::vector<int> local_of;  // problem var -> local index, or -1
  std::unique_ptr<DomainStore> store;
  std::unique_ptr<ConstraintBackend> backend;
  size_t master_cursor = 0;  // master log entries already pulled
  size_t local_cursor = 0;   // own log entries already pushed back
};

class Search {
 public:
  Search(const Problem& problem, Backend backend, bool stop_after_first)
      : problem_(problem), master_(problem.scope), stop_after_first_(stop_after_first) {
    for (const Constraint& c : problem.constraints) {
      CState s;
      s.vars = &c.vars;
      s.local_of.assign(problem.scope.arity(), -1);
      for (size_t k = 0; k < c.vars.size(); ++k) s.local_of[c.vars[k]] = static_cast<int>(k);
      s.store = std::make_unique<DomainStore>(c.mdd.scope());
      if (backend == Backend::kMdd)
        s.backend = std::make_unique<MddBackend>(c.mdd, *s.store);
      else
        s.backend = std::make_unique<TableBackend>(c.mdd.enumerate(), *s.store);
      cstates_.push_back(std::move(s));
    }
  }

  SolutionSet run(SearchStats& stats) {
    auto t0 = std::chrono::steady_clock::now();
    if (fixpoint() && enter_node()) dfs(0);
    stats = stats_;
    for (const CState& s : cstates_)
      stats.modifications += s.backend->counters().structural_modifications();
    stats.solve_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return std::move(out_);
  }

 private:
  bool fixpoint() {
    bool progress = true;
    while (progress) {
      progress = false;
      for (CState& s : cstates_) {
        const auto& mlog = master_.log();
        while (s.master_cursor < mlog.size()) {
          const auto& rem = mlog[s.master_cursor++];
          int li = s.local_of[rem.var];
          if (li >= 0 && s.store->contains(li, rem.value)) s.store->remove(li, rem.value);
        }
        if (!s.backend->propagate()) return false;
        const auto& llog = s.store->log();
        while (s.local_cursor < llog.size()) {
          const auto& rem = llog[s.local_cursor++];
          int gv = (*s.vars)[rem.var];
          if (master_.contains(gv, rem.value)) {
            master_.remove(gv, rem.value);
            if (master_.size(gv) == 0) return false;
            progress = true;
          }
        }
      }
    }
    return true;
  }

  /// Counts the node and fires any due scripted deletions. False when a
  /// deletion wipes the node out (the deletion itself still sticks).
  bool enter_node() {
    ++stats_.nodes_visited;
    const auto& script = problem_.script;
    while (next_event_ < script.size() &&
           script[next_event_].trigger <= stats_.nodes_visited) {
      const DeletionEvent& e = script[next_event_++];
      ++stats_.script_events;
      bool ok = cstates_[e.constraint].backend->persistent_delete(e.tuples);
      if (!ok) return false;
      if (!fixpoint()) return false;
    }
    return true;
  }

  void push_all() {
    master_.push_level();
    for (CState& s : cstates_) {
      s.store->push_level();
      s.backend->push_level();
      saved_cursors_.emplace_back(s.master_cursor, s.local_cursor);
    }
  }

  void pop_all() {
    size_t base = saved_cursors_.size() - cstates_.size();
    for (size_t k = 0; k < cstates_.size(); ++k) {
      CState& s = cstates_[k];
      s.backend->pop_level();
      s.store->pop_level();
      auto [mc, lc] = saved_cursors_[base + k];
      s.master_cursor = mc;
      s.local_cursor = lc;
    }
    saved_cursors_.resize(base);
    master_.pop_level();
  }

  bool dfs(int var) {  // true = stop the whole search
    if (var == problem_.scope.arity()) {
      Tuple t(problem_.scope.arity());
      for (int i = 0; i < problem_.scope.arity(); ++i) t[i] = master_.value_at(i, 0);
      out_.solutions.push_back(std::move(t));
      return stop_after_first_;
    }
    std::vector<Value> candidates = master_.sorted_values(var);
    for (Value v : candidates) {
      if (!master_.contains(var, v)) continue;
      push_all();
      master_.assign(var, v);
      bool ok = fixpoint() && enter_node();
      bool stop = false;
      if (ok)
        stop = dfs(var + 1);
      else
        ++stats_.backtracks;
      pop_all();
      if (stop) return true;
    }
    return false;
  }

  const Problem& problem_;
  DomainStore master_;
  std::vector<CState> cstates_;
  std::vector<std::pair<size_t, size_t>> saved_cursors_;
  size_t next_event_ = 0;
  bool stop_after_first_;
  SearchStats stats_;
  SolutionSet out_;
};

}  // namespace

SolutionSet solve_all(const Problem& problem, Backend backend, SearchStats* stats) {
  problem.check();
  SearchStats local;
  Search search(problem, backend, false);
  SolutionSet out = search.run(local);
  if (stats) *stats = local;
  return out;
}

std::optional<Tuple> solve_one(const Problem& problem, Backend backend, SearchStats* stats) {
  problem.check();
  SearchStats local;
  Search search(problem, backend, true);
  SolutionSet out = search.run(local);
  if (stats) *stats = local;
  if (out.solutions.empty()) return std::nullopt;
  return out.solutions.front();
}

}  // namespace mddkit::solver
