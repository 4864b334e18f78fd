#include "seedbank/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "seedbank/csv.hpp"
#include "seedbank/parallel.hpp"
#include "seedbank/stats.hpp"

namespace seedbank {

int MarkedBlock::label() const { return members == 0 ? -1 : std::countr_zero(members); }

std::size_t MarkedPartition::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(blocks.begin(), blocks.end(), [](const MarkedBlock& b) { return b.flag == 0.0; }));
}

bool MarkedPartition::same_block(int i, int j) const {
  const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
  return std::any_of(blocks.begin(), blocks.end(),
                     [&](const MarkedBlock& b) { return (b.members & mask) == mask; });
}

bool MarkedPartition::is_valid() const {
  if (size < 1 || size > kMaxPartitionSize) return false;
  const std::uint64_t all = size == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << size) - 1;
  std::uint64_t seen = 0;
  int prev_label = -1;
  for (const auto& b : blocks) {
    if (b.members == 0 || (b.members & seen) != 0 || (b.members & ~all) != 0) return false;
    if (!(b.flag >= 0.0) || !std::isfinite(b.flag)) return false;
    if (b.label() <= prev_label) return false;
    prev_label = b.label();
    seen |= b.members;
  }
  return seen == all;
}

std::vector<std::uint8_t> MarkedPartition::code() const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(size), 0);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (std::uint64_t m = blocks[k].members; m != 0; m &= m - 1) {
      out[static_cast<std::size_t>(std::countr_zero(m))] = static_cast<std::uint8_t>(k);
    }
  }
  return out;
}

std::string MarkedPartition::to_string() const {
  std::ostringstream os;
  for (const auto& b : blocks) {
    os << '{';
    bool first = true;
    for (std::uint64_t m = b.members; m != 0; m &= m - 1) {
      if (!first) os << ';';
      os << std::countr_zero(m);
      first = false;
    }
    os << '|' << format_double(b.flag) << '}';
  }
  return os.str();
}

void check_permutation(const std::vector<int>& sigma, int size) {
  if (static_cast<int>(sigma.size()) != size) {
    throw std::invalid_argument("permutation must have one entry per individual");
  }
  std::vector<bool> hit(sigma.size(), false);
  for (int s : sigma) {
    if (s < 0 || s >= size || hit[static_cast<std::size_t>(s)]) {
      throw std::invalid_argument("not a permutation");
    }
    hit[static_cast<std::size_t>(s)] = true;
  }
}

MarkedPartition relabel(const MarkedPartition& p, const std::vector<int>& sigma) {
  check_permutation(sigma, p.size);
  MarkedPartition out{p.size, {}};
  for (const auto& b : p.blocks) {
    std::uint64_t image = 0;
    for (std::uint64_t m = b.members; m != 0; m &= m - 1) {
      image |= std::uint64_t{1} << sigma[static_cast<std::size_t>(std::countr_zero(m))];
    }
    out.blocks.push_back({image, b.flag});
  }
  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const MarkedBlock& a, const MarkedBlock& b) { return a.label() < b.label(); });
  return out;
}

const char* to_string(PartitionEventKind kind) {
  switch (kind) {
    case PartitionEventKind::Merge: return "merge";
    case PartitionEventKind::Deactivate: return "deactivate";
    case PartitionEventKind::Activate: return "activate";
  }
  return "?";
}

namespace {

std::vector<double> normalize_flags(int size, std::vector<double> flags) {
  if (size < 1 || size > kMaxPartitionSize) {
    throw std::invalid_argument("partition size must be in [1, 64]");
  }
  if (flags.empty()) flags.assign(static_cast<std::size_t>(size), 0.0);
  if (static_cast<int>(flags.size()) != size) {
    throw std::invalid_argument("need one initial flag per individual");
  }
  for (double f : flags) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("flags must be finite and >= 0");
  }
  return flags;
}

void check_horizon(double horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
}

}  // namespace

PartitionHistory::PartitionHistory(int size, std::vector<double> initial_flags, double horizon)
    : size_(size), initial_flags_(std::move(initial_flags)), horizon_(horizon) {}

MarkedPartition PartitionHistory::initial() const {
  MarkedPartition p{size_, {}};
  for (int i = 0; i < size_; ++i) {
    p.blocks.push_back({std::uint64_t{1} << i, initial_flags_[static_cast<std::size_t>(i)]});
  }
  return p;
}

MarkedPartition PartitionHistory::partition_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) throw std::out_of_range("time outside the simulated window");
  std::vector<std::uint64_t> members(static_cast<std::size_t>(size_));
  std::vector<double> flag = initial_flags_;
  for (int i = 0; i < size_; ++i) members[static_cast<std::size_t>(i)] = std::uint64_t{1} << i;
  for (const auto& e : events_) {
    if (e.time > t) break;
    const auto a = static_cast<std::size_t>(e.label);
    switch (e.kind) {
      case PartitionEventKind::Merge: {
        const auto b = static_cast<std::size_t>(e.other);
        members[a] |= members[b];
        members[b] = 0;
        break;
      }
      case PartitionEventKind::Deactivate: flag[a] = e.rate; break;
      case PartitionEventKind::Activate: flag[a] = 0.0; break;
    }
  }
  MarkedPartition p{size_, {}};
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] != 0) p.blocks.push_back({members[i], flag[i]});
  }
  return p;
}

std::size_t PartitionHistory::block_count_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) throw std::out_of_range("time outside the simulated window");
  std::size_t n = static_cast<std::size_t>(size_);
  for (const auto& e : events_) {
    if (e.time > t) break;
    if (e.kind == PartitionEventKind::Merge) --n;
  }
  return n;
}

PartitionHistory simulate_graphical(int size, const RateMeasure& mu, double horizon,
                                    std::vector<double> initial_flags, Rng& rng) {
  check_horizon(horizon);
  initial_flags = normalize_flags(size, std::move(initial_flags));
  PartitionHistory history(size, initial_flags, horizon);
  const double c = mu.total_mass();

  // (time, kind, a, b): kind 0 = pair clock ring, 1 = flag switch of label a.
  using Entry = std::tuple<double, int, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  std::vector<double> flag = initial_flags;
  std::vector<bool> alive(static_cast<std::size_t>(size), true);
  int alive_count = size;

  auto schedule_flag = [&](int p, double now) {
    const double f = flag[static_cast<std::size_t>(p)];
    if (f > 0.0) {
      queue.emplace(now + exponential(rng, f), 1, p, -1);
    } else if (c > 0.0) {
      queue.emplace(now + exponential(rng, c), 1, p, -1);
    }
  };

  for (int p = 0; p < size; ++p) schedule_flag(p, 0.0);
  for (int p = 0; p < size; ++p) {
    for (int q = p + 1; q < size; ++q) queue.emplace(exponential(rng, 1.0), 0, p, q);
  }

  auto absorbed = [&] {
    if (alive_count != 1) return false;
    for (int p = 0; p < size; ++p) {
      if (alive[static_cast<std::size_t>(p)]) return flag[static_cast<std::size_t>(p)] == 0.0;
    }
    return false;
  };

  if (absorbed()) {
    history.set_tmrca(0.0);
    if (std::isinf(horizon)) return history;
  }

  while (!queue.empty()) {
    const auto [time, kind, a, b] = queue.top();
    if (time > horizon) break;
    queue.pop();
    const auto ia = static_cast<std::size_t>(a);
    if (!alive[ia]) continue;
    if (kind == 1) {
      if (flag[ia] == 0.0) {
        flag[ia] = mu.sample_rate(rng);
        history.record({time, PartitionEventKind::Deactivate, a, -1, flag[ia]});
      } else {
        flag[ia] = 0.0;
        history.record({time, PartitionEventKind::Activate, a, -1, 0.0});
      }
      schedule_flag(a, time);
    } else {
      const auto ib = static_cast<std::size_t>(b);
      if (!alive[ib]) continue;
      if (flag[ia] == 0.0 && flag[ib] == 0.0) {
        alive[ib] = false;
        --alive_count;
        history.record({time, PartitionEventKind::Merge, a, b, 0.0});
      } else {
        queue.emplace(time + exponential(rng, 1.0), 0, a, b);
      }
    }
    if (!history.tmrca() && absorbed()) {
      history.set_tmrca(time);
      if (std::isinf(horizon)) break;
    }
  }
  return history;
}

PartitionHistory simulate_direct(int size, const RateMeasure& mu, double horizon,
                                 std::vector<double> initial_flags, Rng& rng) {
  check_horizon(horizon);
  initial_flags = normalize_flags(size, std::move(initial_flags));
  PartitionHistory history(size, initial_flags, horizon);
  const double c = mu.total_mass();

  std::vector<int> labels(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) labels[static_cast<std::size_t>(i)] = i;
  std::vector<double> flag = initial_flags;
  std::vector<int> active, dormant;
  double t = 0.0;

  auto absorbed = [&] { return labels.size() == 1 && flag[static_cast<std::size_t>(labels[0])] == 0.0; };
  if (absorbed()) {
    history.set_tmrca(0.0);
    if (std::isinf(horizon)) return history;
  }

  for (;;) {
    active.clear();
    dormant.clear();
    double wake = 0.0;
    for (int l : labels) {
      const double f = flag[static_cast<std::size_t>(l)];
      if (f == 0.0) {
        active.push_back(l);
      } else {
        dormant.push_back(l);
        wake += f;
      }
    }
    const auto na = static_cast<double>(active.size());
    const double coal = na * (na - 1.0) / 2.0;
    const double deact = c * na;
    const double total = coal + deact + wake;
    if (!(total > 0.0)) break;
    const double next = t + exponential(rng, total);
    if (next > horizon) break;
    t = next;
    const double u = uniform01(rng) * total;
    if (u < coal) {
      // floor(u) is uniform over the active pairs.
      auto k = static_cast<std::size_t>(u);
      std::size_t i = 0;
      while (k >= active.size() - 1 - i) {
        k -= active.size() - 1 - i;
        ++i;
      }
      const int a = active[i];
      const int b = active[i + 1 + k];
      labels.erase(std::find(labels.begin(), labels.end(), b));
      history.record({t, PartitionEventKind::Merge, a, b, 0.0});
    } else if (u < coal + deact || dormant.empty()) {
      auto k = static_cast<std::size_t>((u - coal) / c);
      k = std::min(k, active.size() - 1);
      const int a = active[k];
      flag[static_cast<std::size_t>(a)] = mu.sample_rate(rng);
      history.record({t, PartitionEventKind::Deactivate, a, -1, flag[static_cast<std::size_t>(a)]});
    } else {
      double v = u - coal - deact;
      int pick = dormant.back();
      for (int l : dormant) {
        const double f = flag[static_cast<std::size_t>(l)];
        if (v < f) {
          pick = l;
          break;
        }
        v -= f;
      }
      flag[static_cast<std::size_t>(pick)] = 0.0;
      history.record({t, PartitionEventKind::Activate, pick, -1, 0.0});
    }
    if (!history.tmrca() && absorbed()) {
      history.set_tmrca(t);
      if (std::isinf(horizon)) break;
    }
  }
  return history;
}

ExchangeabilityResult exchangeability_test(int size, const RateMeasure& mu, double t,
                                           const std::vector<int>& sigma, std::size_t reps,
                                           std::uint64_t seed, unsigned workers) {
  check_permutation(sigma, size);
  if (reps < 2) throw std::invalid_argument("exchangeability_test needs reps >= 2");
  if (!(t >= 0.0) || std::isinf(t)) throw std::invalid_argument("t must be finite and >= 0");

  using Code = std::vector<std::uint8_t>;
  const auto samples = parallel_map(reps, workers, [&](std::size_t r) {
    Rng ra = make_stream(seed, StreamTag::Exchangeability, r, 0);
    Rng rb = make_stream(seed, StreamTag::Exchangeability, r, 1);
    const Code a = simulate_graphical(size, mu, t, {}, ra).partition_at(t).code();
    const Code b = relabel(simulate_graphical(size, mu, t, {}, rb).partition_at(t), sigma).code();
    return std::pair<Code, Code>(a, b);
  });

  std::map<Code, std::size_t> index;
  for (const auto& [a, b] : samples) {
    index.try_emplace(a, 0);
    index.try_emplace(b, 0);
  }
  std::size_t k = 0;
  for (auto& [code, idx] : index) idx = k++;
  std::vector<std::uint64_t> count_a(k, 0), count_b(k, 0);

  const auto pairs = static_cast<std::size_t>(size * (size - 1) / 2);
  ExchangeabilityResult out{1.0, k, std::vector<double>(pairs, 0.0), std::vector<double>(pairs, 0.0)};
  for (const auto& [a, b] : samples) {
    ++count_a[index.at(a)];
    ++count_b[index.at(b)];
    std::size_t pi = 0;
    for (int i = 0; i < size; ++i) {
      for (int j = i + 1; j < size; ++j, ++pi) {
        if (a[static_cast<std::size_t>(i)] == a[static_cast<std::size_t>(j)]) out.pair_freq_identity[pi] += 1.0;
        if (b[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)]) out.pair_freq_relabeled[pi] += 1.0;
      }
    }
  }
  for (std::size_t pi = 0; pi < pairs; ++pi) {
    out.pair_freq_identity[pi] /= static_cast<double>(reps);
    out.pair_freq_relabeled[pi] /= static_cast<double>(reps);
  }
  out.p_value = chi_square_homogeneity_p(count_a, count_b);
  return out;
}

}  // namespace seedbank
