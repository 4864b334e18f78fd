#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "seedbank/rng.hpp"

namespace seedbank {

struct RateMultiplicity {
  double rate;
  std::size_t multiplicity;

  bool operator==(const RateMultiplicity&) const = default;
};

/// The integer-valued measure m = sum_i m_i delta_{l_i}, kept as one slot
/// per dormant block.
///
/// Slots live in the leaves of an implicit complete binary tree whose
/// internal nodes hold the rate sum of their subtree; every internal node is
/// recomputed as fl(left + right) on each mutation, so the root never drifts
/// from the leaves by more than tree-depth rounding. Removal tombstones a
/// leaf (weight 0); the tree compacts once tombstones exceed half the used
/// leaves.
///
/// Blocks with equal rate never merge: identity is the slot id, which stays
/// stable across compactions.
class DormantBank {
 public:
  using SlotId = std::uint64_t;

  DormantBank() = default;
  explicit DormantBank(const std::vector<double>& rates);

  /// Adds one dormant block. Throws std::invalid_argument unless rate > 0.
  SlotId insert(double rate);

  /// Removes one block chosen with probability rate / total_rate and returns
  /// it. Throws std::logic_error on an empty bank.
  std::pair<SlotId, double> sample_activation(Rng& rng);

  std::size_t count() const { return alive_; }
  bool empty() const { return alive_ == 0; }
  double total_rate() const { return alive_ == 0 ? 0.0 : tree_[1]; }

  /// Alive blocks grouped by exact rate, ascending.
  std::vector<RateMultiplicity> snapshot() const;

  /// Sum of alive rates recomputed from scratch, left to right.
  double resummed_rate() const;

  /// Leaf storage size, alive or not. Exposed for tests.
  std::size_t used_slots() const { return used_; }

  template <class F>
  void for_each_alive(F&& f) const {
    for (std::size_t i = 0; i < used_; ++i) {
      const double r = tree_[capacity_ + i];
      if (r > 0.0) f(ids_[i], r);
    }
  }

 private:
  void rebuild(std::size_t min_capacity);
  void update_path(std::size_t leaf);

  std::vector<double> tree_;  // [1, capacity) internal, [capacity, 2 capacity) leaves
  std::vector<SlotId> ids_;
  std::size_t capacity_ = 0;
  std::size_t used_ = 0;
  std::size_t alive_ = 0;
  SlotId next_id_ = 0;
};

}  // namespace seedbank
