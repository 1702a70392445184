#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "mddkit/builders.hpp"
#include "mddkit/io.hpp"
#include "mddkit/oracle.hpp"
#include "mddkit/solver.hpp"
#include "test_util.hpp"

using namespace mddkit;
using namespace mddkit::testutil;

namespace {

template <typename T, typename Reader>
T parse(const std::string& text, Reader reader) {
  std::istringstream in(text);
  return reader(in);
}

TupleTable parse_table(const std::string& text) {
  std::istringstream in(text);
  return io::read_table(in);
}

}  // namespace

TEST_CASE("table files round-trip through text") {
  TupleTable table{Scope({3, 3}), {{0, 0}, {0, 1}, {2, 0}, {2, 1}, {2, 2}}, true};
  std::ostringstream out;
  io::write_table(out, table);
  TupleTable back = parse_table(out.str());
  CHECK(back.scope == table.scope);
  CHECK(back.rows == table.rows);

  std::ostringstream again;
  io::write_table(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("table parser skips blanks and comments") {
  TupleTable t = parse_table("# roster\n\ntable 2\ndomains 2 2\n\n0 1\n# middle\n1 0\n");
  CHECK(t.rows == std::vector<Tuple>{{0, 1}, {1, 0}});
}

TEST_CASE("table parser reports the offending line") {
  try {
    parse_table("table 2\ndomains 2 2\n0 0\n0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_table("table 2\ndomains 2\n"), ParseError);
  CHECK_THROWS_AS(parse_table("table 2\ndomains 2 2\n0 x\n"), ParseError);
  CHECK_THROWS_AS(parse_table("gcs 2\ndomains 2 2\n"), ParseError);
  CHECK_THROWS_AS(parse_table("table 2\ndomains 2 2\n0 5\n"), ScopeError);
}

TEST_CASE("gcs files round-trip and normalize their sets") {
  builders::Gcs g = parse<builders::Gcs>("gcs 3\ndomains 4 4 4\nset 1 1\nset 3 3 0 1\nset 1 1\n",
                                         [](std::istream& in) { return io::read_gcs(in); });
  CHECK(g.value_sets[0] == std::vector<Value>{1});
  CHECK(g.value_sets[1] == std::vector<Value>{0, 1, 3});

  std::ostringstream out;
  io::write_gcs(out, g);
  builders::Gcs back =
      parse<builders::Gcs>(out.str(), [](std::istream& in) { return io::read_gcs(in); });
  CHECK(back.value_sets == g.value_sets);
  CHECK_THROWS_AS(
      parse<builders::Gcs>("gcs 2\ndomains 2 2\nset 2 0\nset 1 0\n",
                           [](std::istream& in) { return io::read_gcs(in); }),
      ParseError);
}

TEST_CASE("sequence files carry their bounds") {
  std::string text = "gcs 2\ndomains 3 3\nset 2 0 2\nset 2 1 2\ntmin 0 1\ntmax 2 1\n";
  builders::TupleSequence s = parse<builders::TupleSequence>(
      text, [](std::istream& in) { return io::read_sequence(in); });
  CHECK(s.tmin == Tuple{0, 1});
  CHECK(s.tmax == Tuple{2, 1});

  std::ostringstream out;
  io::write_sequence(out, s);
  std::ostringstream again;
  io::write_sequence(again, parse<builders::TupleSequence>(
                                out.str(), [](std::istream& in) { return io::read_sequence(in); }));
  CHECK(again.str() == out.str());

  CHECK_THROWS_AS(parse<builders::TupleSequence>(
                      "gcs 1\ndomains 2\nset 1 0\ntmin 0\n",
                      [](std::istream& in) { return io::read_sequence(in); }),
                  ParseError);
}

TEST_CASE("sequence sets hold several blocks") {
  std::mt19937 rng = rng_for(7);
  std::vector<builders::TupleSequence> seqs;
  for (int k = 0; k < 3; ++k) seqs.push_back(random_sequence(rng, Scope({3, 4, 2})));
  std::ostringstream out;
  io::write_sequence_set(out, seqs);
  auto back = parse<std::vector<builders::TupleSequence>>(
      out.str(), [](std::istream& in) { return io::read_sequence_set(in); });
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].tmin == seqs[k].tmin);
    CHECK(back[k].tmax == seqs[k].tmax);
    CHECK(back[k].gcs.value_sets == seqs[k].gcs.value_sets);
  }
  CHECK_THROWS_AS(parse<std::vector<builders::TupleSequence>>(
                      "seqset 2\ngcs 1\ndomains 2\nset 1 0\ntmin 0\ntmax 0\n",
                      [](std::istream& in) { return io::read_sequence_set(in); }),
                  ParseError);
}

TEST_CASE("mdd files reproduce the canonical text byte for byte") {
  std::mt19937 rng = rng_for(11);
  Scope scope = random_scope(rng, 5, 4);
  Mdd m = mdd_of(scope, random_table(rng, scope, 30).rows);
  std::ostringstream out;
  io::write_mdd(out, m);
  Mdd back = parse<Mdd>(out.str(), [](std::istream& in) { return io::read_mdd(in); });
  CHECK(back.to_canonical_text() == m.to_canonical_text());
  CHECK(equivalent(back, m));
}

TEST_CASE("problem files assemble constraints from mixed blocks") {
  std::string text =
      "problem 3\n"
      "domains 3 3 3\n"
      "constraint 2 0 1\n"
      "table 2\n"
      "domains 3 3\n"
      "0 0\n0 1\n2 0\n2 1\n2 2\n"
      "constraint 2 1 2\n"
      "gcs 2\n"
      "domains 3 3\n"
      "set 2 0 1\n"
      "set 3 0 1 2\n";
  solver::Problem p =
      parse<solver::Problem>(text, [](std::istream& in) { return io::read_problem(in); });
  p.check();
  REQUIRE(p.constraints.size() == 2);
  CHECK(p.constraints[0].vars == std::vector<int>{0, 1});
  CHECK(p.constraints[0].mdd.count_tuples() == 5);
  CHECK(p.constraints[1].mdd.count_tuples() == 6);
  CHECK(p.script.empty());

  solver::SolutionSet all = solver::solve_all(p);
  // first constraint fixes (x0,x1), second needs x1 in {0,1}: drops (2,2,*)
  CHECK(all.count() == 4 * 3);
}

TEST_CASE("problem files may end with script events") {
  std::string text =
      "problem 2\n"
      "domains 2 2\n"
      "constraint 2 0 1\n"
      "table 2\n"
      "domains 2 2\n"
      "0 0\n1 1\n"
      "delete_at 2 0\n"
      "table 2\n"
      "domains 2 2\n"
      "0 0\n";
  solver::Problem p =
      parse<solver::Problem>(text, [](std::istream& in) { return io::read_problem(in); });
  p.check();
  REQUIRE(p.script.size() == 1);
  CHECK(p.script[0].trigger == 2);
  CHECK(p.script[0].constraint == 0);
  CHECK(p.script[0].tuples.rows == std::vector<Tuple>{{0, 0}});

  solver::SearchStats stats;
  solver::SolutionSet all = solver::solve_all(p, solver::Backend::kMdd, &stats);
  CHECK(all.solutions == std::vector<Tuple>{{1, 1}});
  CHECK(stats.script_events == 1);
}

TEST_CASE("script files parse standalone events") {
  std::string text =
      "delete_at 3 0\n"
      "table 2\ndomains 2 2\n0 0\n"
      "delete_at 9 1\n"
      "table 1\ndomains 3\n2\n";
  auto script = parse<std::vector<solver::DeletionEvent>>(
      text, [](std::istream& in) { return io::read_script(in); });
  REQUIRE(script.size() == 2);
  CHECK(script[0].trigger == 3);
  CHECK(script[1].constraint == 1);
  CHECK(script[1].tuples.rows == std::vector<Tuple>{{2}});
  CHECK_THROWS_AS(parse<std::vector<solver::DeletionEvent>>(
                      "delete_at 3\ntable 1\ndomains 2\n0\n",
                      [](std::istream& in) { return io::read_script(in); }),
                  ParseError);
}

TEST_CASE("problem files embed mdd blocks and sequences") {
  Mdd m = mdd_of(Scope({2, 2}), {{0, 1}, {1, 0}});
  std::ostringstream text;
  text << "problem 3\ndomains 2 2 3\nconstraint 2 0 1\n";
  io::write_mdd(text, m);
  text << "constraint 1 2\n"
       << "gcs 1\ndomains 3\nset 2 0 2\ntmin 0\ntmax 2\n";
  solver::Problem p = parse<solver::Problem>(
      text.str(), [](std::istream& in) { return io::read_problem(in); });
  p.check();
  REQUIRE(p.constraints.size() == 2);
  CHECK(equivalent(p.constraints[0].mdd, m));
  CHECK(p.constraints[1].mdd.count_tuples() == 2);
  CHECK(solver::solve_all(p).count() == 2 * 2);
}

TEST_CASE("problem validation surfaces through check after parsing") {
  std::string text =
      "problem 2\n"
      "domains 2 2\n"
      "constraint 2 0 1\n"
      "table 2\n"
      "domains 2 3\n"
      "0 0\n";
  solver::Problem p =
      parse<solver::Problem>(text, [](std::istream& in) { return io::read_problem(in); });
  CHECK_THROWS_AS(p.check(), ScopeError);  // block domains exceed the problem's
}
