#include "seedbank/dormant_bank.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace seedbank {

namespace {
constexpr std::size_t kMinCapacity = 16;
}

DormantBank::DormantBank(const std::vector<double>& rates) {
  rebuild(rates.size());
  for (double r : rates) insert(r);
}

void DormantBank::rebuild(std::size_t min_capacity) {
  std::vector<double> rates;
  std::vector<SlotId> ids;
  rates.reserve(alive_);
  ids.reserve(alive_);
  for_each_alive([&](SlotId id, double r) {
    ids.push_back(id);
    rates.push_back(r);
  });

  capacity_ = std::bit_ceil(std::max({min_capacity, rates.size() * 2, kMinCapacity}));
  tree_.assign(2 * capacity_, 0.0);
  ids_.assign(capacity_, 0);
  std::copy(rates.begin(), rates.end(), tree_.begin() + static_cast<std::ptrdiff_t>(capacity_));
  std::copy(ids.begin(), ids.end(), ids_.begin());
  used_ = rates.size();
  alive_ = rates.size();
  for (std::size_t node = capacity_ - 1; node >= 1; --node) {
    tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }
}

void DormantBank::update_path(std::size_t leaf) {
  for (std::size_t node = (capacity_ + leaf) / 2; node >= 1; node /= 2) {
    tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }
}

DormantBank::SlotId DormantBank::insert(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("dormant rates must be positive and finite");
  }
  if (used_ == capacity_) rebuild(2 * (alive_ + 1));
  const std::size_t leaf = used_++;
  tree_[capacity_ + leaf] = rate;
  ids_[leaf] = next_id_;
  ++alive_;
  update_path(leaf);
  return next_id_++;
}

std::pair<DormantBank::SlotId, double> DormantBank::sample_activation(Rng& rng) {
  if (alive_ == 0) throw std::logic_error("sample_activation on an empty dormant bank");
  double u = uniform01(rng) * tree_[1];
  std::size_t node = 1;
  while (node < capacity_) {
    const std::size_t left = 2 * node;
    // Only ever step into a subtree with positive mass, so rounding in u
    // cannot land on a tombstone.
    if (u < tree_[left] || !(tree_[left + 1] > 0.0)) {
      node = left;
    } else {
      u -= tree_[left];
      node = left + 1;
    }
  }
  const std::size_t leaf = node - capacity_;
  const double rate = tree_[node];
  const SlotId id = ids_[leaf];
  tree_[node] = 0.0;
  --alive_;
  update_path(leaf);
  if (used_ > kMinCapacity && 2 * alive_ < used_) rebuild(0);
  return {id, rate};
}

std::vector<RateMultiplicity> DormantBank::snapshot() const {
  std::vector<double> rates;
  rates.reserve(alive_);
  for_each_alive([&](SlotId, double r) { rates.push_back(r); });
  std::sort(rates.begin(), rates.end());
  std::vector<RateMultiplicity> out;
  for (double r : rates) {
    if (!out.empty() && out.back().rate == r) {
      ++out.back().multiplicity;
    } else {
      out.push_back({r, 1});
    }
  }
  return out;
}

double DormantBank::resummed_rate() const {
  double s = 0.0;
  for_each_alive([&](SlotId, double r) { s += r; });
  return s;
}

}  // namespace seedbank
