#include "mddkit/oracle.hpp"

#include <algorithm>

namespace mddkit::oracle {

ExplicitSet ExplicitSet::from_rows(const Scope& scope, std::vector<Tuple> rows) {
  for (const Tuple& t : rows) scope.check_tuple(t);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return ExplicitSet{scope, std::move(rows)};
}

bool ExplicitSet::contains(const Tuple& t) const {
  return std::binary_search(tuples.begin(), tuples.end(), t);
}

ExplicitSet o_difference(const ExplicitSet& a, const ExplicitSet& b) {
  if (a.scope != b.scope) throw ScopeError("difference needs matching scopes");
  ExplicitSet out{a.scope, {}};
  for (const Tuple& t : a.tuples)
    if (!b.contains(t)) out.tuples.push_back(t);
  return out;
}

ExplicitSet o_union(const ExplicitSet& a, const ExplicitSet& b) {
  if (a.scope != b.scope) throw ScopeError("union needs matching scopes");
  std::vector<Tuple> rows = a.tuples;
  rows.insert(rows.end(), b.tuples.begin(), b.tuples.end());
  return ExplicitSet::from_rows(a.scope, std::move(rows));
}

ExplicitSet o_universe(const Scope& scope) {
  ExplicitSet out{scope, {}};
  int r = scope.arity();
  Tuple t(r, 0);
  for (;;) {
    out.tuples.push_back(t);
    int i = r - 1;
    while (i >= 0 && t[i] + 1 == scope.domain_size(i)) t[i--] = 0;
    if (i < 0) break;
    ++t[i];
  }
  return out;
}

ExplicitSet o_complement(const ExplicitSet& a) {
  return o_difference(o_universe(a.scope), a);
}

ExplicitSet o_sequence_expand(const Scope& scope, const std::vector<std::vector<Value>>& value_sets,
                              const Tuple& tmin, const Tuple& tmax) {
  int r = scope.arity();
  if (static_cast<int>(value_sets.size()) != r)
    throw DescriptorError("need one value set per variable");
  scope.check_tuple(tmin);
  scope.check_tuple(tmax);
  for (int i = 0; i < r; ++i) {
    if (value_sets[i].empty()) throw DescriptorError("empty value set");
    for (Value v : value_sets[i])
      if (v < 0 || v >= scope.domain_size(i)) throw DescriptorError("value set outside domain");
    auto in_set = [&](Value v) {
      return std::find(value_sets[i].begin(), value_sets[i].end(), v) != value_sets[i].end();
    };
    if (!in_set(tmin[i]) || !in_set(tmax[i]))
      throw DescriptorError("bounds must be members of the described product");
  }
  if (tmax < tmin) throw DescriptorError("lower bound above upper bound");

  ExplicitSet out{scope, {}};
  for (const Tuple& t : o_universe(scope).tuples) {
    bool in_product = true;
    for (int i = 0; i < r && in_product; ++i)
      in_product = std::find(value_sets[i].begin(), value_sets[i].end(), t[i]) != value_sets[i].end();
    if (in_product && !(t < tmin) && !(tmax < t)) out.tuples.push_back(t);
  }
  return out;
}

std::vector<std::vector<Value>> o_ac_supports(const ExplicitSet& a,
                                              const std::vector<std::vector<Value>>& domains) {
  int r = a.scope.arity();
  std::vector<std::vector<char>> dom_flag(r);
  for (int i = 0; i < r; ++i) {
    dom_flag[i].assign(a.scope.domain_size(i), 0);
    for (Value v : domains[i]) dom_flag[i][v] = 1;
  }
  std::vector<std::vector<char>> supported(r);
  for (int i = 0; i < r; ++i) supported[i].assign(a.scope.domain_size(i), 0);
  for (const Tuple& t : a.tuples) {
    bool live = true;
    for (int i = 0; i < r && live; ++i) live = dom_flag[i][t[i]] != 0;
    if (!live) continue;
    for (int i = 0; i < r; ++i) supported[i][t[i]] = 1;
  }
  std::vector<std::vector<Value>> out(r);
  for (int i = 0; i < r; ++i)
    for (Value v = 0; v < a.scope.domain_size(i); ++v)
      if (supported[i][v]) out[i].push_back(v);
  return out;
}

}  // namespace mddkit::oracle
