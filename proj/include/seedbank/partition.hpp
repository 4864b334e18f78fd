#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seedbank/measure.hpp"
#include "seedbank/rng.hpp"

namespace seedbank {

inline constexpr int kMaxPartitionSize = 64;

/// One block of a marked partition of {0, ..., K-1}: members as a bitmask,
/// flag 0 = active, flag > 0 = dormant with that wake-up rate.
struct MarkedBlock {
  std::uint64_t members = 0;
  double flag = 0.0;

  /// Lowest member; the graphical construction keeps this as the label.
  int label() const;
};

struct MarkedPartition {
  int size = 0;
  std::vector<MarkedBlock> blocks;  // ordered by label

  std::size_t block_count() const { return blocks.size(); }
  std::size_t active_count() const;
  std::size_t dormant_count() const { return block_count() - active_count(); }
  bool same_block(int i, int j) const;
  /// Blocks are disjoint, nonempty, cover {0..K-1}, flags >= 0, sorted.
  bool is_valid() const;
  /// Restricted-growth string: entry i is the index of i's block in label
  /// order. Two partitions are equal as set partitions iff codes match.
  std::vector<std::uint8_t> code() const;
  /// "{0;2|0}{1|1.5}": 0-based members, flag after the bar. No commas, so
  /// it drops into a CSV field as is.
  std::string to_string() const;
};

/// Image of the partition under a relabeling of individuals:
/// i ~ j in the result iff sigma^{-1}(i) ~ sigma^{-1}(j); flags travel with
/// their blocks.
MarkedPartition relabel(const MarkedPartition& p, const std::vector<int>& sigma);

enum class PartitionEventKind : std::uint8_t { Merge, Deactivate, Activate };

const char* to_string(PartitionEventKind kind);

/// Merge: `label` absorbed `other` (label < other). Deactivate: block
/// `label` got flag `rate`. Activate: block `label` went back to flag 0.
struct PartitionEvent {
  double time;
  PartitionEventKind kind;
  int label;
  int other;
  double rate;
};

/// Event log of one run from singletons {0}, ..., {K-1} with the given
/// initial flags. Replays to the partition at any time in [0, horizon].
class PartitionHistory {
 public:
  PartitionHistory(int size, std::vector<double> initial_flags, double horizon);

  int size() const { return size_; }
  double horizon() const { return horizon_; }
  const std::vector<double>& initial_flags() const { return initial_flags_; }
  const std::vector<PartitionEvent>& events() const { return events_; }
  /// First time the partition is a single active block.
  std::optional<double> tmrca() const { return tmrca_; }

  MarkedPartition initial() const;
  /// State after every event with time <= t. Throws for t outside
  /// [0, horizon].
  MarkedPartition partition_at(double t) const;
  std::size_t block_count_at(double t) const;

  // Used by the simulators.
  void record(const PartitionEvent& e) { events_.push_back(e); }
  void set_tmrca(double t) { tmrca_ = t; }

 private:
  int size_;
  std::vector<double> initial_flags_;
  double horizon_;
  std::vector<PartitionEvent> events_;
  std::optional<double> tmrca_;
};

/// The graphical construction: a unit-rate Poisson clock for each pair of
/// current labels (next rings held lazily in a priority queue, ties broken
/// by pair), alternating renewal flags per label (active Exp(c), dormant
/// Exp(lambda) with lambda ~ nu drawn at each dormancy onset). A ring merges
/// the two labels into the lower one when both are active.
///
/// Runs to `horizon`; with an infinite horizon it stops at the MRCA.
/// `initial_flags` must have K entries (0 = active); an empty vector means
/// all active. Requires 1 <= K <= 64.
PartitionHistory simulate_graphical(int size, const RateMeasure& mu, double horizon,
                                    std::vector<double> initial_flags, Rng& rng);

/// Jump chain of the marked-partition process: each active block turns
/// dormant at rate c with lambda ~ nu, each dormant block wakes at its
/// rate, each pair of active blocks merges at rate 1.
PartitionHistory simulate_direct(int size, const RateMeasure& mu, double horizon,
                                 std::vector<double> initial_flags, Rng& rng);

struct ExchangeabilityResult {
  double p_value;
  std::size_t categories;  // distinct partitions observed
  /// Frequencies of "i ~ j at t" for every pair i < j, lexicographic, in
  /// the identity run and the relabeled run.
  std::vector<double> pair_freq_identity;
  std::vector<double> pair_freq_relabeled;
};

/// Compares the law of the partition at t between `reps` identity runs and
/// `reps` independent runs mapped through sigma (a permutation of
/// {0..K-1}), by a chi-square homogeneity test over partition categories.
/// All individuals start active, so sigma leaves the initial state fixed.
ExchangeabilityResult exchangeability_test(int size, const RateMeasure& mu, double t,
                                           const std::vector<int>& sigma, std::size_t reps,
                                           std::uint64_t seed, unsigned workers = 0);

/// Validates that sigma is a permutation of {0..K-1}.
void check_permutation(const std::vector<int>& sigma, int size);

}  // namespace seedbank
