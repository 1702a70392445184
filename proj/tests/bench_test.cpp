#include "mddkit/bench.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "mddkit/oracle.hpp"
#include "test_util.hpp"

using namespace mddkit;

TEST_CASE("instance sampling is uniform-sized, distinct, and sorted") {
  bench::InstanceParams p;
  p.seed = 7;
  p.arity = 4;
  p.dsize = 4;
  p.tightness = 0.25;
  TupleTable t = bench::random_instance(p);
  CHECK(t.rows.size() == 64);  // 0.25 * 4^4
  CHECK(t.sorted);
  CHECK(std::is_sorted(t.rows.begin(), t.rows.end()));
  std::set<Tuple> distinct(t.rows.begin(), t.rows.end());
  CHECK(distinct.size() == t.rows.size());
  t.check();
}

TEST_CASE("the same seed reproduces the same instance and script") {
  bench::InstanceParams p;
  p.seed = 41;
  p.arity = 3;
  p.dsize = 5;
  p.tightness = 0.4;
  p.deletions = 12;
  p.events = 3;
  TupleTable a = bench::random_instance(p);
  TupleTable b = bench::random_instance(p);
  CHECK(a.rows == b.rows);
  auto sa = bench::random_script(p, a);
  auto sb = bench::random_script(p, b);
  REQUIRE(sa.size() == sb.size());
  for (size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].trigger == sb[i].trigger);
    CHECK(sa[i].tuples.rows == sb[i].tuples.rows);
  }

  bench::InstanceParams q = p;
  q.seed = 42;
  CHECK(bench::random_instance(q).rows != a.rows);
}

TEST_CASE("tightness extremes produce the empty and the full table") {
  bench::InstanceParams p;
  p.seed = 3;
  p.arity = 3;
  p.dsize = 3;
  p.tightness = 0.0;
  CHECK(bench::random_instance(p).rows.empty());
  p.tightness = 1.0;
  TupleTable full = bench::random_instance(p);
  CHECK(full.rows.size() == 27);
  oracle::ExplicitSet uni = oracle::o_universe(full.scope);
  CHECK(oracle::ExplicitSet::from_rows(full.scope, full.rows).tuples == uni.tuples);
}

TEST_CASE("scripts delete distinct table rows in increasing batches") {
  bench::InstanceParams p;
  p.seed = 11;
  p.arity = 4;
  p.dsize = 5;
  p.tightness = 0.3;
  p.deletions = 40;
  p.events = 5;
  TupleTable t = bench::random_instance(p);
  auto script = bench::random_script(p, t);
  REQUIRE(script.size() == 5);
  std::set<Tuple> seen;
  long long prev = 0;
  long long total = 0;
  for (const auto& ev : script) {
    CHECK(ev.trigger > prev);
    prev = ev.trigger;
    CHECK(ev.constraint == 0);
    for (const Tuple& row : ev.tuples.rows) {
      CHECK(std::binary_search(t.rows.begin(), t.rows.end(), row));
      CHECK(seen.insert(row).second);
    }
    total += static_cast<long long>(ev.tuples.rows.size());
  }
  CHECK(total == 40);
}

TEST_CASE("event batching defaults scale with the deletion count") {
  bench::InstanceParams p;
  CHECK(p.event_count() == 0);
  p.deletions = 1;
  CHECK(p.event_count() == 1);
  p.deletions = 500;
  CHECK(p.event_count() == 1);
  p.deletions = 501;
  CHECK(p.event_count() == 2);
  p.deletions = 10000;
  CHECK(p.event_count() == 20);
  p.deletions = 100000;
  CHECK(p.event_count() == 20);
  p.events = 7;
  CHECK(p.event_count() == 7);
  p.deletions = 3;
  CHECK(p.event_count() == 3);
}

TEST_CASE("run_instance solves the sampled table and reports its size") {
  bench::InstanceParams p;
  p.seed = 19;
  p.arity = 4;
  p.dsize = 4;
  p.tightness = 0.2;
  bench::RunResult r = bench::run_instance(p);
  CHECK(r.tuples == 51);  // floor(0.2 * 256)
  CHECK(r.solutions == r.tuples);
  CHECK(r.nodes_visited > r.solutions);
  CHECK(r.events_fired == 0);
  CHECK(r.mdd_modifications == 0);
  CHECK(r.table_modifications == 0);
}

TEST_CASE("run_instance applies its script and counts the damage") {
  bench::InstanceParams p;
  p.seed = 23;
  p.arity = 4;
  p.dsize = 4;
  p.tightness = 0.3;
  p.deletions = 20;
  p.events = 4;
  bench::RunResult r = bench::run_instance(p);
  CHECK(r.tuples == 76);
  CHECK(r.events_fired == 4);
  CHECK(r.solutions < r.tuples);
  CHECK(r.mdd_modifications > 0);
  // The explicit baseline retires one support entry per variable per row.
  CHECK(r.table_modifications == 20ULL * 4);
}

TEST_CASE("csv rows are stable without timing and follow the header") {
  bench::InstanceParams p;
  p.seed = 5;
  p.arity = 3;
  p.dsize = 4;
  p.tightness = 0.5;
  p.deletions = 8;
  bench::RunResult a = bench::run_instance(p);
  bench::RunResult b = bench::run_instance(p);
  std::string row = bench::csv_row(a, false);
  CHECK(row == bench::csv_row(b, false));
  CHECK(row.substr(0, 11) == "mddbench-1,");

  std::string header = bench::csv_header();
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
  CHECK(header.substr(0, 7) == "schema,");
  CHECK(row.find(",0.000,") != std::string::npos);

  std::string timed = bench::csv_row(a, true);
  CHECK(std::count(timed.begin(), timed.end(), ',') ==
        std::count(header.begin(), header.end(), ','));
}

TEST_CASE("bench parameter validation rejects nonsense") {
  bench::InstanceParams p;
  p.arity = 0;
  CHECK_THROWS_AS(p.check(), DescriptorError);
  p.arity = 17;
  CHECK_THROWS_AS(p.check(), DescriptorError);
  p.arity = 4;
  p.tightness = 1.5;
  CHECK_THROWS_AS(p.check(), DescriptorError);
  p.tightness = -0.1;
  CHECK_THROWS_AS(p.check(), DescriptorError);
  p.tightness = 0.5;
  p.deletions = -1;
  CHECK_THROWS_AS(p.check(), DescriptorError);
  p.deletions = 0;
  p.check();
}
