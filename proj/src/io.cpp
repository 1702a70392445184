#include "mddkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mddkit::io {

namespace {

/// Tokenized line reader with one line of pushback, so block parsers can
/// stop at a keyword that belongs to the next block.
class Lines {
 public:
  explicit Lines(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& toks) {
    if (buffered_) {
      toks = last_;
      buffered_ = false;
      return true;
    }
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      toks.clear();
      std::istringstream ss(raw);
      std::string t;
      while (ss >> t) toks.push_back(t);
      if (toks.empty() || toks[0][0] == '#') continue;
      last_ = toks;
      return true;
    }
    return false;
  }

  void push_back() { buffered_ = true; }

  int line() const { return line_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }

  long long to_int(const std::string& tok) const {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      fail("expected an integer, got '" + tok + "'");
    return v;
  }

 private:
  std::istream& in_;
  int line_ = 0;
  std::vector<std::string> last_;
  bool buffered_ = false;
};

std::vector<std::string> expect_line(Lines& in, const std::string& keyword) {
  std::vector<std::string> toks;
  if (!in.next(toks)) throw ParseError(in.line() + 1, "expected '" + keyword + "', got end of input");
  if (toks[0] != keyword) in.fail("expected '" + keyword + "', got '" + toks[0] + "'");
  return toks;
}

int expect_count(Lines& in, const std::vector<std::string>& toks) {
  if (toks.size() != 2) in.fail("'" + toks[0] + "' takes exactly one count");
  long long n = in.to_int(toks[1]);
  if (n < 0 || n > 1 << 20) in.fail("count " + toks[1] + " out of range");
  return static_cast<int>(n);
}

Scope read_domains(Lines& in, int r) {
  std::vector<std::string> toks = expect_line(in, "domains");
  if (static_cast<int>(toks.size()) != r + 1)
    in.fail("domains line needs " + std::to_string(r) + " sizes");
  std::vector<int> sizes(r);
  for (int i = 0; i < r; ++i) {
    long long d = in.to_int(toks[i + 1]);
    if (d < 1 || d > 1 << 20) in.fail("domain size " + toks[i + 1] + " out of range");
    sizes[i] = static_cast<int>(d);
  }
  return Scope(sizes);
}

Tuple read_values(Lines& in, const std::vector<std::string>& toks, size_t from, int r) {
  if (static_cast<int>(toks.size() - from) != r)
    in.fail("expected " + std::to_string(r) + " values, got " +
            std::to_string(toks.size() - from));
  Tuple t(r);
  for (int i = 0; i < r; ++i) {
    long long v = in.to_int(toks[from + i]);
    if (v < 0 || v > 1 << 20) in.fail("value " + toks[from + i] + " out of range");
    t[i] = static_cast<Value>(v);
  }
  return t;
}

/// Rows until end of input, or until a keyword line when embedded.
TupleTable read_table_block(Lines& in, bool embedded) {
  std::vector<std::string> toks = expect_line(in, "table");
  int r = expect_count(in, toks);
  if (r < 1) in.fail("table needs at least one variable");
  Scope scope = read_domains(in, r);
  std::vector<Tuple> rows;
  while (in.next(toks)) {
    if (embedded && !toks[0].empty() && !std::isdigit(static_cast<unsigned char>(toks[0][0])) &&
        toks[0][0] != '-') {
      in.push_back();
      break;
    }
    rows.push_back(read_values(in, toks, 0, r));
  }
  TupleTable table{scope, std::move(rows), false};
  table.check();
  return table;
}

builders::Gcs read_gcs_block(Lines& in) {
  std::vector<std::string> toks = expect_line(in, "gcs");
  int r = expect_count(in, toks);
  if (r < 1) in.fail("gcs needs at least one variable");
  Scope scope = read_domains(in, r);
  std::vector<std::vector<Value>> sets(r);
  for (int i = 0; i < r; ++i) {
    toks = expect_line(in, "set");
    if (toks.size() < 2) in.fail("set line needs a count");
    long long k = in.to_int(toks[1]);
    if (k < 1 || static_cast<size_t>(k) != toks.size() - 2)
      in.fail("set count does not match the listed values");
    Tuple vals = read_values(in, toks, 2, static_cast<int>(k));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    sets[i] = std::move(vals);
  }
  builders::Gcs gcs{scope, std::move(sets)};
  gcs.check();
  return gcs;
}

builders::TupleSequence read_sequence_block(Lines& in) {
  builders::Gcs gcs = read_gcs_block(in);
  int r = gcs.scope.arity();
  std::vector<std::string> toks = expect_line(in, "tmin");
  Tuple tmin = read_values(in, toks, 1, r);
  toks = expect_line(in, "tmax");
  Tuple tmax = read_values(in, toks, 1, r);
  builders::TupleSequence seq{std::move(gcs), std::move(tmin), std::move(tmax)};
  seq.check();
  return seq;
}

/// Header, domains, then `arc` lines; embedded blocks end at any other
/// keyword. Delegates to the core parser, shifting its line numbers into
/// this file's coordinates.
Mdd read_mdd_block(Lines& in) {
  std::vector<std::string> toks = expect_line(in, "mdd");
  int first_line = in.line();
  std::ostringstream block;
  for (const std::string& t : toks) block << t << ' ';
  block << '\n';
  if (!in.next(toks) || toks[0] != "domains")
    throw ParseError(in.line(), "mdd block needs a domains line");
  for (const std::string& t : toks) block << t << ' ';
  block << '\n';
  while (in.next(toks)) {
    if (toks[0] != "arc") {
      in.push_back();
      break;
    }
    for (const std::string& t : toks) block << t << ' ';
    block << '\n';
  }
  try {
    return Mdd::from_canonical_text(block.str());
  } catch (const ParseError& e) {
    throw ParseError(first_line + e.line() - 1, e.what());
  }
}

void write_scope(std::ostream& out, const Scope& scope) {
  out << "domains";
  for (int i = 0; i < scope.arity(); ++i) out << ' ' << scope.domain_size(i);
  out << '\n';
}

void write_row(std::ostream& out, const Tuple& t) {
  for (size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << t[i];
  out << '\n';
}

}  // namespace

TupleTable read_table(std::istream& in) {
  Lines lines(in);
  return read_table_block(lines, false);
}

builders::Gcs read_gcs(std::istream& in) {
  Lines lines(in);
  return read_gcs_block(lines);
}

builders::TupleSequence read_sequence(std::istream& in) {
  Lines lines(in);
  return read_sequence_block(lines);
}

std::vector<builders::TupleSequence> read_sequence_set(std::istream& in) {
  Lines lines(in);
  std::vector<std::string> toks = expect_line(lines, "seqset");
  int n = expect_count(lines, toks);
  std::vector<builders::TupleSequence> seqs;
  seqs.reserve(n);
  for (int k = 0; k < n; ++k) seqs.push_back(read_sequence_block(lines));
  return seqs;
}

Mdd read_mdd(std::istream& in) {
  std::ostringstream all;
  all << in.rdbuf();
  return Mdd::from_canonical_text(all.str());
}

solver::Problem read_problem(std::istream& in) {
  Lines lines(in);
  std::vector<std::string> toks = expect_line(lines, "problem");
  int r = expect_count(lines, toks);
  if (r < 1) lines.fail("problem needs at least one variable");
  solver::Problem problem;
  problem.scope = read_domains(lines, r);

  while (lines.next(toks)) {
    if (toks[0] != "constraint") {
      lines.push_back();
      break;
    }
    if (toks.size() < 2) lines.fail("constraint line needs a count");
    long long k = lines.to_int(toks[1]);
    if (k < 1 || static_cast<size_t>(k) != toks.size() - 2)
      lines.fail("constraint count does not match the listed variables");
    std::vector<int> vars(k);
    for (long long i = 0; i < k; ++i) {
      long long v = lines.to_int(toks[2 + i]);
      if (v < 0 || v >= r) lines.fail("variable index " + toks[2 + i] + " out of range");
      vars[i] = static_cast<int>(v);
    }
    if (!lines.next(toks)) lines.fail("constraint needs an inline tuple-set block");
    lines.push_back();
    Mdd mdd = [&]() -> Mdd {
      if (toks[0] == "table") return builders::build_from_sorted_table(read_table_block(lines, true));
      if (toks[0] == "gcs") {
        // a sequence block is a gcs block followed by bounds
        builders::Gcs gcs = read_gcs_block(lines);
        std::vector<std::string> peek;
        if (lines.next(peek)) {
          lines.push_back();
          if (peek[0] == "tmin") {
            int kr = gcs.scope.arity();
            std::vector<std::string> bt = expect_line(lines, "tmin");
            Tuple tmin = read_values(lines, bt, 1, kr);
            bt = expect_line(lines, "tmax");
            Tuple tmax = read_values(lines, bt, 1, kr);
            builders::TupleSequence seq{std::move(gcs), std::move(tmin), std::move(tmax)};
            seq.check();
            return builders::build_from_tuple_sequence(seq);
          }
        }
        return builders::build_from_gcs(gcs);
      }
      if (toks[0] == "mdd") return read_mdd_block(lines);
      lines.fail("unknown constraint block '" + toks[0] + "'");
    }();
    problem.constraints.push_back({std::move(vars), std::move(mdd)});
  }

  while (lines.next(toks)) {
    if (toks[0] != "delete_at") lines.fail("unexpected '" + toks[0] + "'");
    if (toks.size() != 3) lines.fail("delete_at takes a trigger and a constraint index");
    long long trigger = lines.to_int(toks[1]);
    long long ci = lines.to_int(toks[2]);
    if (ci < 0 || ci > 1 << 20) lines.fail("constraint index " + toks[2] + " out of range");
    TupleTable tuples = read_table_block(lines, true);
    problem.script.push_back({trigger, static_cast<int>(ci), std::move(tuples)});
  }
  return problem;
}

std::vector<solver::DeletionEvent> read_script(std::istream& in) {
  Lines lines(in);
  std::vector<solver::DeletionEvent> script;
  std::vector<std::string> toks;
  while (lines.next(toks)) {
    if (toks[0] != "delete_at") lines.fail("expected 'delete_at', got '" + toks[0] + "'");
    if (toks.size() != 3) lines.fail("delete_at takes a trigger and a constraint index");
    long long trigger = lines.to_int(toks[1]);
    long long ci = lines.to_int(toks[2]);
    if (ci < 0 || ci > 1 << 20) lines.fail("constraint index " + toks[2] + " out of range");
    TupleTable tuples = read_table_block(lines, true);
    script.push_back({trigger, static_cast<int>(ci), std::move(tuples)});
  }
  return script;
}

void write_table(std::ostream& out, const TupleTable& table) {
  out << "table " << table.scope.arity() << '\n';
  write_scope(out, table.scope);
  for (const Tuple& t : table.rows) write_row(out, t);
}

void write_gcs(std::ostream& out, const builders::Gcs& gcs) {
  out << "gcs " << gcs.scope.arity() << '\n';
  write_scope(out, gcs.scope);
  for (const auto& set : gcs.value_sets) {
    out << "set " << set.size();
    for (Value v : set) out << ' ' << v;
    out << '\n';
  }
}

void write_sequence(std::ostream& out, const builders::TupleSequence& seq) {
  write_gcs(out, seq.gcs);
  out << "tmin";
  for (Value v : seq.tmin) out << ' ' << v;
  out << "\ntmax";
  for (Value v : seq.tmax) out << ' ' << v;
  out << '\n';
}

void write_sequence_set(std::ostream& out, const std::vector<builders::TupleSequence>& seqs) {
  out << "seqset " << seqs.size() << '\n';
  for (const auto& s : seqs) write_sequence(out, s);
}

void write_mdd(std::ostream& out, const Mdd& mdd) { out << mdd.to_canonical_text(); }

}  // namespace mddkit::io
