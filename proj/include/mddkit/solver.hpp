#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mddkit/mdd.hpp"
#include "mddkit/types.hpp"

namespace mddkit::solver {

/// Which propagator drives each constraint during search.
enum class Backend { kMdd, kTable };

/// One constraint: a tuple set over a subsequence of the problem variables.
/// The diagram's scope must match the projected problem domains position by
/// position.
struct Constraint {
  std::vector<int> vars;
  Mdd mdd;
};

/// A scripted persistent deletion. Fires the first time the visited node
/// count reaches `trigger` (the root counts as node 1). Once fired, the
/// rows are gone from that constraint for the rest of the search.
struct DeletionEvent {
  long long trigger;
  int constraint;
  TupleTable tuples;
};

struct Problem {
  Scope scope;
  std::vector<Constraint> constraints;
  std::vector<DeletionEvent> script;

  /// Throws ScopeError on malformed constraints or script: variable indices
  /// must be strictly increasing and in range, constraint scopes must match
  /// the projected domains, triggers must be >= 1 and strictly increasing,
  /// and every event must target an existing constraint with its scope.
  void check() const;
};

struct SearchStats {
  long long nodes_visited = 0;
  long long backtracks = 0;
  long long script_events = 0;
  /// Structural work done by persistent deletions, summed over constraints.
  unsigned long long modifications = 0;
  double solve_ms = 0.0;

  std::string dump() const;  // key=value lines
};

struct SolutionSet {
  std::vector<Tuple> solutions;  // lexicographic by construction
  long long count() const { return static_cast<long long>(solutions.size()); }
};

/// Depth-first search for every solution: smallest-index variable first,
/// ascending values, constraints propagated round-robin to fixpoint after
/// each assignment. Scripted deletions fire at node entry; a deletion that
/// wipes the current node still sticks, the search just backtracks. Events
/// the search never reaches stay unfired.
SolutionSet solve_all(const Problem& problem, Backend backend = Backend::kMdd,
                      SearchStats* stats = nullptr);

/// Same search, stopped at the first (lexicographically smallest) solution.
std::optional<Tuple> solve_one(const Problem& problem, Backend backend = Backend::kMdd,
                               SearchStats* stats = nullptr);

}  // namespace mddkit::solver
