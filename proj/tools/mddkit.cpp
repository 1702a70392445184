// Command line front end: build diagrams from set descriptions, edit them in
// place, solve table problems with scripted deletions, and benchmark the two
// propagation backends against each other.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mddkit/bench.hpp"
#include "mddkit/builders.hpp"
#include "mddkit/editops.hpp"
#include "mddkit/io.hpp"
#include "mddkit/mdd.hpp"
#include "mddkit/solver.hpp"
#include "mddkit/types.hpp"

namespace {

using namespace mddkit;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kParseFailure = 2;
constexpr int kSemanticFailure = 3;
constexpr int kUnsatisfiable = 4;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

/// Read a tuple-set description in any supported format and build a reduced
/// diagram for it.
Mdd load_set(const std::string& path, const std::string& format) {
  std::ifstream in = open_input(path);
  if (format == "table") return builders::build_from_sorted_table(io::read_table(in));
  if (format == "gcs") return builders::build_from_gcs(io::read_gcs(in));
  if (format == "seq") return builders::build_from_tuple_sequence(io::read_sequence(in));
  if (format == "seqset") return builders::build_from_disjoint_sequences(io::read_sequence_set(in));
  throw std::runtime_error("unknown format " + format);
}

void print_mdd_stats(const Mdd& m) {
  std::cout << "nodes " << m.node_count() << " arcs " << m.arc_count() << " tuples "
            << m.count_tuples() << "\n";
}

int cmd_build(const std::string& input, const std::string& format, const std::string& output) {
  Mdd m = load_set(input, format);
  std::ofstream out = open_output(output);
  io::write_mdd(out, m);
  print_mdd_stats(m);
  return kOk;
}

int cmd_edit(const std::string& mdd_path, const std::string& op, const std::string& input,
             const std::string& format, const std::string& output) {
  Mdd m = [&] {
    std::ifstream in = open_input(mdd_path);
    return io::read_mdd(in);
  }();
  Mdd tset = load_set(input, format);
  editops::ChangeSummary s =
      op == "add" ? editops::add_set(m, tset) : editops::delete_set(m, tset);
  std::ofstream out = open_output(output);
  io::write_mdd(out, m);
  print_mdd_stats(m);
  std::cout << "changed " << (s.changed ? 1 : 0) << " modifications " << s.total_modifications()
            << "\n";
  return kOk;
}

int cmd_solve(const std::string& problem_path, bool all, const std::string& script_path,
              const std::string& backend_name) {
  solver::Problem problem = [&] {
    std::ifstream in = open_input(problem_path);
    return io::read_problem(in);
  }();
  if (!script_path.empty()) {
    std::ifstream in = open_input(script_path);
    std::vector<solver::DeletionEvent> extra = io::read_script(in);
    for (auto& ev : extra) problem.script.push_back(std::move(ev));
    std::stable_sort(problem.script.begin(), problem.script.end(),
                     [](const auto& a, const auto& b) { return a.trigger < b.trigger; });
  }
  problem.check();
  solver::Backend backend =
      backend_name == "table" ? solver::Backend::kTable : solver::Backend::kMdd;

  solver::SearchStats stats;
  if (all) {
    solver::SolutionSet out = solver::solve_all(problem, backend, &stats);
    for (const Tuple& t : out.solutions) {
      for (size_t i = 0; i < t.size(); ++i) std::cout << (i ? " " : "") << t[i];
      std::cout << "\n";
    }
    std::cout << "count " << out.count() << "\n" << stats.dump();
    return kOk;
  }
  std::optional<Tuple> first = solver::solve_one(problem, backend, &stats);
  if (!first) {
    std::cout << stats.dump();
    std::cerr << "unsatisfiable\n";
    return kUnsatisfiable;
  }
  for (size_t i = 0; i < first->size(); ++i) std::cout << (i ? " " : "") << (*first)[i];
  std::cout << "\n" << stats.dump();
  return kOk;
}

int cmd_bench(std::uint64_t seed, int runs, int arity, int dsize,
              const std::vector<double>& tightness, long long deletions, int events,
              const std::string& csv_path, bool no_timing) {
  std::ostringstream csv;
  csv << bench::csv_header() << "\n";
  long long rows = 0;
  for (int run = 0; run < runs; ++run) {
    for (double t : tightness) {
      bench::InstanceParams p;
      p.seed = seed + static_cast<std::uint64_t>(run);
      p.arity = arity;
      p.dsize = dsize;
      p.tightness = t;
      p.deletions = deletions;
      p.events = events;
      bench::RunResult r = bench::run_instance(p);
      csv << bench::csv_row(r, !no_timing) << "\n";
      ++rows;
    }
  }
  if (csv_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out = open_output(csv_path);
    out << csv.str();
    std::cout << "wrote " << rows << " rows to " << csv_path << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layered decision diagram toolkit"};
  app.require_subcommand(1);

  std::string input, output, format = "table";
  CLI::App* build = app.add_subcommand("build", "build a diagram from a tuple-set description");
  build->add_option("--input", input, "set description file")->required()->check(CLI::ExistingFile);
  build->add_option("--format", format, "input format")
      ->check(CLI::IsMember({"table", "gcs", "seq", "seqset"}));
  build->add_option("--output", output, "canonical diagram text destination")->required();

  std::string mdd_path, op;
  CLI::App* edit = app.add_subcommand("edit", "add or delete a tuple set in place");
  edit->add_option("--mdd", mdd_path, "diagram to edit")->required()->check(CLI::ExistingFile);
  edit->add_option("--op", op, "edit operation")
      ->required()
      ->check(CLI::IsMember({"add", "delete"}));
  edit->add_option("--input", input, "tuple set to add or delete")
      ->required()
      ->check(CLI::ExistingFile);
  edit->add_option("--format", format, "edit-set format")
      ->check(CLI::IsMember({"table", "gcs", "seq", "seqset"}));
  edit->add_option("--output", output, "destination for the edited diagram")->required();

  std::string problem_path, script_path, backend = "mdd";
  bool all = false;
  CLI::App* solve = app.add_subcommand("solve", "search a problem file for solutions");
  solve->add_option("--problem", problem_path, "problem file")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_flag("--all", all, "enumerate every solution instead of the first");
  solve->add_option("--script", script_path, "extra deletion events merged into the problem's")
      ->check(CLI::ExistingFile);
  solve->add_option("--backend", backend, "propagation backend")
      ->check(CLI::IsMember({"mdd", "table"}));

  std::uint64_t seed = 0;
  int runs = 1, arity = 6, dsize = 5, events = 0;
  long long deletions = 0;
  std::vector<double> tightness{0.15};
  std::string csv_path;
  bool no_timing = false;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run both backends on random instances");
  bench_cmd->add_option("--seed", seed, "base seed; run i uses seed + i");
  bench_cmd->add_option("--runs", runs, "instances per tightness value")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--arity", arity, "variables per instance");
  bench_cmd->add_option("--dsize", dsize, "domain size of every variable");
  bench_cmd->add_option("--tightness", tightness, "fraction of the full product, repeatable")
      ->expected(-1);
  bench_cmd->add_option("--deletions", deletions, "tuples deleted by the generated script");
  bench_cmd->add_option("--events", events, "script batches (0 picks a default)");
  bench_cmd->add_option("--csv", csv_path, "write rows here instead of stdout");
  bench_cmd->add_flag("--no-timing", no_timing, "zero the wall-clock columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (build->parsed()) return cmd_build(input, format, output);
    if (edit->parsed()) return cmd_edit(mdd_path, op, input, format, output);
    if (solve->parsed()) return cmd_solve(problem_path, all, script_path, backend);
    return cmd_bench(seed, runs, arity, dsize, tightness, deletions, events, csv_path, no_timing);
  } catch (const mddkit::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ScopeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemanticFailure;
  } catch (const DescriptorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemanticFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemanticFailure;
  }
}
