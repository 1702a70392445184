#include "mddkit/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "mddkit/builders.hpp"
#include "mddkit/propagation.hpp"
#include "mddkit/table.hpp"

namespace mddkit::bench {

namespace {

// Bounded draw by mask rejection on the raw engine output. Distribution
// adaptors differ between standard libraries; this keeps a seed's sample
// identical everywhere.
unsigned long long draw_below(std::mt19937_64& rng, unsigned long long bound) {
  if (bound <= 1) return 0;
  unsigned long long mask = ~0ULL >> std::countl_zero(bound - 1);
  for (;;) {
    unsigned long long v = rng() & mask;
    if (v < bound) return v;
  }
}

Tuple decode(unsigned long long index, const Scope& scope) {
  Tuple t(scope.arity());
  for (int i = scope.arity() - 1; i >= 0; --i) {
    unsigned long long d = static_cast<unsigned long long>(scope.domain_size(i));
    t[i] = static_cast<Value>(index % d);
    index /= d;
  }
  return t;
}

double ms_since(std::chrono::steady_clock::time_point start) {
  auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count();
}

std::string format_ms(double ms, bool with_timing) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << (with_timing ? ms : 0.0);
  return out.str();
}

}  // namespace

void InstanceParams::check() const {
  if (arity < 1 || arity > 16) throw DescriptorError("bench arity must be in [1, 16]");
  if (dsize < 1) throw DescriptorError("bench domain size must be positive");
  if (tightness < 0.0 || tightness > 1.0)
    throw DescriptorError("bench tightness must be in [0, 1]");
  if (deletions < 0) throw DescriptorError("bench deletion count must be nonnegative");
  if (events < 0) throw DescriptorError("bench event count must be nonnegative");
  double universe = 1.0;
  for (int i = 0; i < arity; ++i) universe *= dsize;
  if (universe > 9e15) throw DescriptorError("bench universe too large to index");
}

int InstanceParams::event_count() const {
  if (deletions == 0) return 0;
  if (events > 0) return static_cast<int>(std::min<long long>(events, deletions));
  long long batches = (deletions + 499) / 500;
  return static_cast<int>(std::min<long long>(batches, 20));
}

TupleTable random_instance(const InstanceParams& params) {
  params.check();
  Scope scope(std::vector<int>(params.arity, params.dsize));
  unsigned long long universe = scope.universe_size();
  unsigned long long want =
      static_cast<unsigned long long>(params.tightness * static_cast<double>(universe));
  want = std::min(want, universe);

  std::mt19937_64 rng(params.seed);
  std::unordered_set<unsigned long long> picked;
  picked.reserve(want * 2 + 16);
  while (picked.size() < want) picked.insert(draw_below(rng, universe));

  std::vector<unsigned long long> indices(picked.begin(), picked.end());
  std::sort(indices.begin(), indices.end());
  TupleTable table;
  table.scope = scope;
  table.sorted = true;
  table.rows.reserve(indices.size());
  for (unsigned long long idx : indices) table.rows.push_back(decode(idx, scope));
  return table;
}

std::vector<solver::DeletionEvent> random_script(const InstanceParams& params,
                                                 const TupleTable& table) {
  params.check();
  long long rows = static_cast<long long>(table.rows.size());
  long long total = std::min<long long>(params.deletions, rows);
  int batches = params.event_count();
  if (total == 0 || batches == 0) return {};
  batches = static_cast<int>(std::min<long long>(batches, total));

  // A separate stream from the instance sample, so the same table can carry
  // differently sized scripts without resampling.
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<long long> order(rows);
  for (long long i = 0; i < rows; ++i) order[i] = i;
  for (long long i = 0; i < total; ++i) {
    long long j = i + static_cast<long long>(draw_below(rng, rows - i));
    std::swap(order[i], order[j]);
  }

  long long spacing = std::max<long long>(1, rows / (batches + 1));
  std::vector<solver::DeletionEvent> script;
  script.reserve(batches);
  long long used = 0;
  for (int b = 0; b < batches; ++b) {
    long long take = total / batches + (b < total % batches ? 1 : 0);
    std::vector<Tuple> chunk;
    chunk.reserve(take);
    for (long long i = 0; i < take; ++i) chunk.push_back(table.rows[order[used + i]]);
    used += take;
    std::sort(chunk.begin(), chunk.end());
    solver::DeletionEvent ev;
    ev.trigger = 2 + static_cast<long long>(b) * spacing;
    ev.constraint = 0;
    ev.tuples = TupleTable{table.scope, std::move(chunk), true};
    script.push_back(std::move(ev));
  }
  return script;
}

RunResult run_instance(const InstanceParams& params) {
  RunResult r;
  r.params = params;
  TupleTable table = random_instance(params);
  r.tuples = static_cast<long long>(table.rows.size());

  auto t0 = std::chrono::steady_clock::now();
  Mdd mdd = builders::build_from_sorted_table(table);
  r.mdd_build_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  {
    DomainStore probe(table.scope);
    TablePropagator index(table, probe);
    index.propagate();
  }
  r.table_build_ms = ms_since(t0);

  solver::Problem problem;
  problem.scope = table.scope;
  std::vector<int> vars(params.arity);
  for (int i = 0; i < params.arity; ++i) vars[i] = i;
  problem.constraints.push_back(solver::Constraint{vars, std::move(mdd)});
  problem.script = random_script(params, table);
  problem.check();

  solver::SearchStats mdd_stats;
  solver::SolutionSet mdd_out = solver::solve_all(problem, solver::Backend::kMdd, &mdd_stats);
  solver::SearchStats table_stats;
  solver::SolutionSet table_out =
      solver::solve_all(problem, solver::Backend::kTable, &table_stats);

  if (mdd_out.solutions != table_out.solutions ||
      mdd_stats.nodes_visited != table_stats.nodes_visited ||
      mdd_stats.script_events != table_stats.script_events)
    throw std::logic_error("bench backends diverged on instance seed " +
                           std::to_string(params.seed));

  r.solutions = mdd_out.count();
  r.nodes_visited = mdd_stats.nodes_visited;
  r.events_fired = mdd_stats.script_events;
  r.mdd_solve_ms = mdd_stats.solve_ms;
  r.mdd_modifications = mdd_stats.modifications;
  r.table_solve_ms = table_stats.solve_ms;
  r.table_modifications = table_stats.modifications;
  return r;
}

std::string csv_header() {
  return "schema,seed,arity,dsize,tightness,deletions,events,tuples,solutions,"
         "nodes_visited,mdd_build_ms,mdd_solve_ms,mdd_modifications,"
         "table_build_ms,table_solve_ms,table_modifications";
}

std::string csv_row(const RunResult& result, bool with_timing) {
  std::ostringstream out;
  out << "mddbench-1," << result.params.seed << ',' << result.params.arity << ','
      << result.params.dsize << ',';
  out << std::setprecision(6) << result.params.tightness << ',';
  out << result.params.deletions << ',' << result.events_fired << ',' << result.tuples << ','
      << result.solutions << ',' << result.nodes_visited << ','
      << format_ms(result.mdd_build_ms, with_timing) << ','
      << format_ms(result.mdd_solve_ms, with_timing) << ',' << result.mdd_modifications << ','
      << format_ms(result.table_build_ms, with_timing) << ','
      << format_ms(result.table_solve_ms, with_timing) << ',' << result.table_modifications;
  return out.str();
}

}  // namespace mddkit::bench
