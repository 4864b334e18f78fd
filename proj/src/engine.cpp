#include "seedbank/engine.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace seedbank {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Coalescence: return "coalescence";
    case EventKind::Deactivation: return "deactivation";
    case EventKind::Activation: return "activation";
  }
  return "?";
}

Variant Variant::decelerated(double alpha, std::int64_t threshold) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw std::invalid_argument("decelerated variant needs 1/2 < alpha < 1");
  }
  if (threshold < 2) throw std::invalid_argument("decelerated variant needs threshold >= 2");
  return {Kind::Decelerated, alpha, threshold};
}

std::string to_string(Variant::Kind kind) {
  switch (kind) {
    case Variant::Kind::Standard: return "standard";
    case Variant::Kind::Accelerated: return "accelerated";
    case Variant::Kind::Decelerated: return "decelerated";
  }
  return "?";
}

Variant::Kind parse_variant_kind(const std::string& name) {
  if (name == "standard") return Variant::Kind::Standard;
  if (name == "accelerated") return Variant::Kind::Accelerated;
  if (name == "decelerated") return Variant::Kind::Decelerated;
  throw std::invalid_argument("unknown variant \"" + name + "\"");
}

std::int64_t gate_level(std::int64_t total, double alpha) {
  const double v = std::pow(static_cast<double>(total), alpha);
  const double r = std::nearbyint(v);
  if (std::fabs(v - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(v));
}

ChannelRates channel_rates(const BlockCountState& state, const Variant& variant,
                           const RateMeasure& mu) {
  const auto n = static_cast<double>(state.active);
  ChannelRates r;
  r.coalescence = n * (n - 1.0) / 2.0;
  if (variant.kind == Variant::Kind::Decelerated) {
    const std::int64_t total = state.total();
    if (total >= variant.threshold && state.active < gate_level(total, variant.alpha)) {
      r.coalescence = 0.0;
    }
  }
  r.deactivation = mu.total_mass() * n;
  r.activation = state.bank.total_rate();
  return r;
}

bool is_absorbed(const BlockCountState& state, const Variant& variant) {
  if (variant.kind == Variant::Kind::Accelerated) return state.total() <= 1;
  return state.active == 1 && state.bank.empty();
}

EventKind step(BlockCountState& state, const Variant& variant, const RateMeasure& mu, Rng& rng,
               const ChannelRates& rates, double hold) {
  state.time += hold;
  const double u = uniform01(rng) * rates.total();
  if (u < rates.coalescence) {
    --state.active;
    return EventKind::Coalescence;
  }
  if (u < rates.coalescence + rates.deactivation || rates.activation <= 0.0) {
    --state.active;
    state.bank.insert(mu.sample_rate(rng));
    return EventKind::Deactivation;
  }
  state.bank.sample_activation(rng);
  if (variant.kind != Variant::Kind::Accelerated) ++state.active;
  return EventKind::Activation;
}

EventKind step(BlockCountState& state, const Variant& variant, const RateMeasure& mu, Rng& rng) {
  const ChannelRates rates = channel_rates(state, variant, mu);
  const double total = rates.total();
  if (!(total > 0.0)) throw StuckStateError();
  return step(state, variant, mu, rng, rates, exponential(rng, total));
}

SimOutcome run_to_absorption(BlockCountState& state, const Variant& variant,
                             const RateMeasure& mu, Rng& rng, const RunOptions& options) {
  return run_until(
      state, variant, mu, rng, [&](const BlockCountState& s) { return is_absorbed(s, variant); },
      options);
}

SimOutcome sample_tmrca(std::int64_t n0, const std::vector<double>& dormant_rates,
                        const Variant& variant, const RateMeasure& mu, Rng& rng,
                        const RunOptions& options) {
  if (n0 < 0 || n0 + static_cast<std::int64_t>(dormant_rates.size()) < 1) {
    throw std::invalid_argument("sample_tmrca needs at least one initial block");
  }
  BlockCountState state{n0, DormantBank(dormant_rates), 0.0};
  return run_to_absorption(state, variant, mu, rng, options);
}

std::vector<double> draw_initial_rates(std::size_t m, const RateMeasure& mu, Rng& rng) {
  std::vector<double> rates;
  rates.reserve(m);
  for (std::size_t i = 0; i < m; ++i) rates.push_back(mu.sample_rate(rng));
  return rates;
}

std::uint64_t measure_A(std::int64_t n, const Variant& variant, const RateMeasure& mu, Rng& rng,
                        std::int64_t target_active) {
  if (n < 1) throw std::invalid_argument("measure_A needs n >= 1");
  BlockCountState state{n, DormantBank{}, 0.0};
  std::int64_t record_low = n;
  std::uint64_t count = 0;
  while (record_low > target_active) {
    const ChannelRates rates = channel_rates(state, variant, mu);
    const double total = rates.total();
    if (!(total > 0.0)) break;
    const EventKind kind = step(state, variant, mu, rng, rates, exponential(rng, total));
    if (state.active < record_low) {
      record_low = state.active;
      if (kind == EventKind::Deactivation) ++count;
    }
  }
  return count;
}

double expected_A_exact(std::int64_t n, double c) {
  if (n < 1 || c < 0.0) throw std::invalid_argument("expected_A_exact needs n >= 1, c >= 0");
  double s = 0.0;
  for (std::int64_t j = 2; j <= n; ++j) s += 2.0 * c / (static_cast<double>(j) + 2.0 * c - 1.0);
  return s;
}

double pure_death_extinction_mean(std::int64_t n, const RateMeasure& mu) {
  if (n < 1) throw std::invalid_argument("pure_death_extinction_mean needs N >= 1");
  if (mu.is_empty()) throw std::domain_error("pure_death_extinction_mean: no dormancy possible");
  const double inf = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  if (mu.is_gamma()) {
    const auto& g = mu.gamma_params();
    for (std::int64_t i = 1; i <= n; ++i) {
      const double ai = g.shape * static_cast<double>(i);
      if (ai <= 1.0) return inf;
      sum += g.rate / (ai - 1.0);
    }
    return sum;
  }
  const auto atoms = mu.atom_list();
  if (atoms.size() == 1) {
    for (std::int64_t i = 1; i <= n; ++i) sum += 1.0 / (static_cast<double>(i) * atoms[0].rate);
    return sum;
  }
  using boost::math::quadrature::gauss_kronrod;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double power = static_cast<double>(i);
    auto f = [&](double t) { return std::pow(mu.survival_laplace(t), power); };
    sum += gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 15, 1e-12);
  }
  return sum;
}

std::int64_t decelerated_threshold(double c, double lam_lo, double lam_hi, double alpha,
                                   double eps) {
  if (!(alpha > 0.5 && alpha < 1.0) || !(eps > 0.0) || !(lam_lo > 0.0) || lam_hi < lam_lo) {
    throw std::invalid_argument("decelerated_threshold: bad parameters");
  }
  const double a = std::pow((lam_lo + 2.0 * c * (1.0 + eps)) / (lam_lo * eps), 1.0 / (1.0 - alpha));
  const double b = lam_hi - c;
  const double d = std::pow(1.0 + (2.0 / eps - 2.0) * lam_lo, 1.0 / (2.0 * alpha - 1.0));
  return static_cast<std::int64_t>(std::ceil(std::max({a, b, d})));
}

}  // namespace seedbank
