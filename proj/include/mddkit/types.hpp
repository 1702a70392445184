#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mddkit {

using Value = int32_t;
using Tuple = std::vector<Value>;

/// Thrown when an operation mixes objects with incompatible scopes, or a
/// tuple's arity / values do not fit the scope it is used with.
class ScopeError : public std::runtime_error {
 public:
  explicit ScopeError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown for malformed set descriptors (empty value sets, bounds outside the
/// described product, non-disjoint inputs to a disjoint merge, ...).
class DescriptorError : public std::runtime_error {
 public:
  explicit DescriptorError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by the text-format readers; carries the offending 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Ordered list of variables with their finite domain sizes. Variable i takes
/// values in [0, domain_size(i)).
class Scope {
 public:
  Scope() = default;
  explicit Scope(std::vector<int> domain_sizes) : sizes_(std::move(domain_sizes)) {
    if (sizes_.empty()) throw ScopeError("scope needs at least one variable");
    for (int d : sizes_)
      if (d < 1) throw ScopeError("domain sizes must be positive");
  }

  int arity() const { return static_cast<int>(sizes_.size()); }
  int domain_size(int var) const { return sizes_[var]; }
  int max_domain_size() const {
    int m = 0;
    for (int d : sizes_) m = std::max(m, d);
    return m;
  }
  const std::vector<int>& domain_sizes() const { return sizes_; }

  bool operator==(const Scope& o) const { return sizes_ == o.sizes_; }
  bool operator!=(const Scope& o) const { return !(*this == o); }

  /// Total number of tuples in the full product. Callers keep scopes small
  /// enough for this not to overflow (desk-scale instances).
  unsigned long long universe_size() const {
    unsigned long long u = 1;
    for (int d : sizes_) u *= static_cast<unsigned long long>(d);
    return u;
  }

  void check_tuple(const Tuple& t) const {
    if (static_cast<int>(t.size()) != arity())
      throw ScopeError("tuple arity " + std::to_string(t.size()) + " does not match scope arity " +
                       std::to_string(arity()));
    for (int i = 0; i < arity(); ++i)
      if (t[i] < 0 || t[i] >= sizes_[i])
        throw ScopeError("value " + std::to_string(t[i]) + " outside domain of variable " +
                         std::to_string(i));
  }

 private:
  std::vector<int> sizes_;
};

/// A set of tuples in row form. `sorted` promises lexicographically sorted,
/// duplicate-free rows; builders sort and dedupe themselves when it is unset.
struct TupleTable {
  Scope scope;
  std::vector<Tuple> rows;
  bool sorted = false;

  void check() const {
    for (const Tuple& t : rows) scope.check_tuple(t);
  }
};

}  // namespace mddkit
