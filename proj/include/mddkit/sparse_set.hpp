#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace mddkit {

/// Sparse set over a fixed universe [0, n). Membership, removal and re-entry
/// are O(1); members are dense_[0..size). Removals and restores only permute
/// the prefix that was live when a snapshot of size() was taken, so saving
/// size() is enough to rewind any sequence of remove/clear/restore calls that
/// never introduces an element that was dead at snapshot time.
class SparseSet {
 public:
  SparseSet() = default;

  void reset_full(int n) {
    dense_.resize(n);
    pos_.resize(n);
    for (int i = 0; i < n; ++i) dense_[i] = pos_[i] = i;
    size_ = n;
  }

  void reset_empty(int n) {
    reset_full(n);
    size_ = 0;
  }

  int universe() const { return static_cast<int>(dense_.size()); }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(int k) const { return pos_[k] < size_; }
  int operator[](int i) const { return dense_[i]; }

  void remove(int k) {
    assert(contains(k));
    swap_to(k, size_ - 1);
    --size_;
  }

  /// Re-enters k; k must currently be out of the set.
  void restore(int k) {
    assert(!contains(k));
    swap_to(k, size_);
    ++size_;
  }

  void clear() { size_ = 0; }

  /// Rewind to a previously observed size.
  void resize_to(int s) {
    assert(s >= 0 && s <= static_cast<int>(dense_.size()));
    size_ = s;
  }

 private:
  void swap_to(int k, int target) {
    int p = pos_[k];
    int other = dense_[target];
    dense_[target] = k;
    dense_[p] = other;
    pos_[other] = p;
    pos_[k] = target;
  }

  std::vector<int32_t> dense_;
  std::vector<int32_t> pos_;
  int32_t size_ = 0;
};

}  // namespace mddkit
