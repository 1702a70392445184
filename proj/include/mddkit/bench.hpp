#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mddkit/solver.hpp"
#include "mddkit/types.hpp"

namespace mddkit::bench {

/// One synthetic instance: a single table constraint over `arity` variables
/// with uniform domains of `dsize` values, filled with a uniform sample of
/// the full product at the given tightness, plus a deletion script that
/// removes `deletions` of the sampled rows spread over `events` batches.
/// events == 0 picks one batch per 500 deleted rows, capped at 20.
struct InstanceParams {
  std::uint64_t seed = 0;
  int arity = 6;
  int dsize = 5;
  double tightness = 0.15;
  long long deletions = 0;
  int events = 0;

  void check() const;
  int event_count() const;
};

/// Measurements from running one instance through both backends. The two
/// searches must agree on solutions and visited nodes; run_instance throws
/// if they ever diverge.
struct RunResult {
  InstanceParams params;
  long long tuples = 0;
  long long solutions = 0;
  long long nodes_visited = 0;
  long long events_fired = 0;
  double mdd_build_ms = 0.0;
  double mdd_solve_ms = 0.0;
  unsigned long long mdd_modifications = 0;
  double table_build_ms = 0.0;
  double table_solve_ms = 0.0;
  unsigned long long table_modifications = 0;
};

/// Sample floor(tightness * dsize^arity) distinct tuples uniformly, sorted.
/// Deterministic for a given parameter set, independent of the platform's
/// distribution implementations.
TupleTable random_instance(const InstanceParams& params);

/// Draw the deletion script for an instance: `deletions` distinct rows of
/// the table split into near-equal batches, triggers spread across the
/// expected span of the search.
std::vector<solver::DeletionEvent> random_script(const InstanceParams& params,
                                                 const TupleTable& table);

/// Build the instance and solve it for all solutions with both backends,
/// with the script applied, collecting times and modification counters.
RunResult run_instance(const InstanceParams& params);

/// CSV serialization with a fixed, versioned schema. Every data row starts
/// with the schema tag. with_timing == false zeroes the wall-clock columns
/// so a fixed seed reproduces the file byte for byte.
std::string csv_header();
std::string csv_row(const RunResult& result, bool with_timing);

}  // namespace mddkit::bench
