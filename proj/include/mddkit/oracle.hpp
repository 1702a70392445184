#pragma once

#include <vector>

#include "mddkit/types.hpp"

namespace mddkit::oracle {

// Ground-truth implementations used by the test suites. Everything here is a
// full scan over explicit tuple vectors on purpose: no code or data structure
// is shared with the diagram modules, so a bug cannot hide in both sides of a
// comparison. Keep scopes small when calling these.

/// Explicit tuple set: sorted, duplicate-free rows.
struct ExplicitSet {
  Scope scope;
  std::vector<Tuple> tuples;

  static ExplicitSet from_rows(const Scope& scope, std::vector<Tuple> rows);
  bool contains(const Tuple& t) const;
};

/// Tuples of a and not of b.
ExplicitSet o_difference(const ExplicitSet& a, const ExplicitSet& b);

/// Tuples of a or of b.
ExplicitSet o_union(const ExplicitSet& a, const ExplicitSet& b);

/// All tuples of the full product, in lexicographic order.
ExplicitSet o_universe(const Scope& scope);

/// Tuples of the full product not in a.
ExplicitSet o_complement(const ExplicitSet& a);

/// Members of the product of the given value sets that lie within the
/// inclusive bounds [tmin, tmax]. Value sets must be non-empty subsets of the
/// scope's domains and both bounds members of the product with tmin <= tmax.
ExplicitSet o_sequence_expand(const Scope& scope, const std::vector<std::vector<Value>>& value_sets,
                              const Tuple& tmin, const Tuple& tmax);

/// For each variable, the values that appear in at least one tuple of `a`
/// whose every coordinate is currently in `domains`.
std::vector<std::vector<Value>> o_ac_supports(const ExplicitSet& a,
                                              const std::vector<std::vector<Value>>& domains);

}  // namespace mddkit::oracle
