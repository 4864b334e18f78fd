#include "seedbank/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "seedbank/engine.hpp"
#include "seedbank/kernels.hpp"
#include "seedbank/oracles.hpp"
#include "seedbank/parallel.hpp"

namespace seedbank {

namespace {
constexpr std::size_t kBlock = 64;

simd::EmParams em_params(const DiscreteModel& model, double dt) {
  return {model.atoms(), model.weights.data(), model.rates.data(), model.c, dt, std::sqrt(dt)};
}

void check_start(const DiscreteModel& model, double x0, std::span<const double> y0) {
  if (y0.size() != model.atoms()) throw std::invalid_argument("need one y0 entry per atom");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("x0 must be in [0, 1]");
  for (double y : y0) {
    if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("y0 entries must be in [0, 1]");
  }
}

std::int64_t resample_size(const DiscreteModel& model, double dt) {
  const double inv = 1.0 / dt;
  const double n = std::nearbyint(inv);
  if (!(n >= 1.0) || std::fabs(inv - n) > 1e-9 * n) {
    throw std::invalid_argument("the resample scheme needs 1/dt to be an integer");
  }
  double fastest = model.c;
  for (double r : model.rates) fastest = std::max(fastest, r);
  if (fastest * dt > 1.0) throw std::invalid_argument("the resample scheme needs dt * max(c, lambda) <= 1");
  return static_cast<std::int64_t>(n);
}

double resample(double x, std::int64_t n, Rng& rng) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  std::binomial_distribution<std::int64_t> draw(n, x);
  return static_cast<double>(draw(rng)) / static_cast<double>(n);
}

std::size_t steps_for(double t, double dt) {
  const double s = t / dt;
  const double r = std::nearbyint(s);
  if (std::fabs(s - r) > 1e-9 * std::max(1.0, r)) {
    throw std::invalid_argument("checkpoint times must be multiples of dt");
  }
  return static_cast<std::size_t>(r);
}
}  // namespace

const char* to_string(DiffusionScheme scheme) {
  return scheme == DiffusionScheme::Resample ? "resample" : "clamped-em";
}

DiffusionScheme parse_scheme(const std::string& name) {
  if (name == "resample") return DiffusionScheme::Resample;
  if (name == "clamped-em") return DiffusionScheme::ClampedEm;
  throw std::invalid_argument("unknown scheme \"" + name + "\" (resample, clamped-em)");
}

bool DiffusionState::in_domain() const {
  if (!(x >= 0.0 && x <= 1.0)) return false;
  return std::all_of(y.begin(), y.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

DiscreteModel DiscreteModel::from(const RateMeasure& mu) {
  if (mu.is_gamma()) throw std::invalid_argument("the diffusion needs a discrete measure");
  DiscreteModel m;
  for (const auto& a : mu.atom_list()) {
    m.rates.push_back(a.rate);
    m.weights.push_back(a.weight);
  }
  m.c = mu.total_mass();
  return m;
}

void step_em_with_noise(DiffusionState& state, const RateMeasure& mu, double dt, double z) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const DiscreteModel model = DiscreteModel::from(mu);
  check_start(model, state.x, state.y);
  const simd::EmParams prm = em_params(model, dt);
  simd::active_kernels().em_step(prm, &state.x, state.y.data(), 1, &z, 1);
  state.t += dt;
}

void step_em(DiffusionState& state, const RateMeasure& mu, double dt, Rng& rng) {
  std::normal_distribution<double> normal;
  step_em_with_noise(state, mu, dt, normal(rng));
}

void step_resample(DiffusionState& state, const RateMeasure& mu, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const DiscreteModel model = DiscreteModel::from(mu);
  check_start(model, state.x, state.y);
  const std::int64_t n = resample_size(model, dt);
  const simd::EmParams prm = em_params(model, dt);
  simd::active_kernels().drift_step(prm, &state.x, state.y.data(), 1, 1);
  state.x = resample(state.x, n, rng);
  state.t += dt;
}

std::vector<std::vector<std::vector<double>>> simulate_paths(const RateMeasure& mu,
                                                             const EnsembleSpec& spec,
                                                             std::span<const double> checkpoints,
                                                             std::span<const Observable> observables) {
  const DiscreteModel model = DiscreteModel::from(mu);
  check_start(model, spec.x0, spec.y0);
  if (!(spec.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const std::size_t k = model.atoms();
  for (const auto& o : observables) {
    if (o.kind == Observable::Kind::Dual && o.m.size() != k) {
      throw std::invalid_argument("dual observable needs one power per atom");
    }
  }
  std::vector<std::size_t> at_step;
  for (double t : checkpoints) {
    at_step.push_back(steps_for(t, spec.dt));
    if (at_step.size() > 1 && at_step.back() < at_step[at_step.size() - 2]) {
      throw std::invalid_argument("checkpoints must be nondecreasing");
    }
  }

  double den = 1.0;
  std::vector<double> ratio(k);
  for (std::size_t i = 0; i < k; ++i) {
    ratio[i] = model.weights[i] / model.rates[i];
    den += ratio[i];
  }
  const bool resampled = spec.scheme == DiffusionScheme::Resample;
  const std::int64_t pop = resampled ? resample_size(model, spec.dt) : 0;
  const simd::EmParams prm = em_params(model, spec.dt);
  const simd::Kernels& kern = simd::active_kernels();
  const std::size_t blocks = (spec.paths + kBlock - 1) / kBlock;

  // Per block: [observable][checkpoint][path in block].
  using BlockOut = std::vector<std::vector<std::vector<double>>>;
  const auto per_block = parallel_map(blocks, spec.workers, [&](std::size_t b) {
    const std::size_t first = b * kBlock;
    const std::size_t count = std::min(kBlock, spec.paths - first);
    std::vector<Rng> rngs;
    rngs.reserve(count);
    for (std::size_t p = 0; p < count; ++p) rngs.push_back(make_stream(spec.seed, spec.tag, first + p, spec.sub));
    std::vector<std::normal_distribution<double>> normals(count);
    std::vector<double> x(count, spec.x0), y(k * count), z(count), tmp(count);
    for (std::size_t i = 0; i < k; ++i) std::fill_n(y.begin() + static_cast<std::ptrdiff_t>(i * count), count, spec.y0[i]);

    BlockOut out(observables.size(), std::vector<std::vector<double>>(checkpoints.size()));
    auto record = [&](std::size_t cp) {
      for (std::size_t o = 0; o < observables.size(); ++o) {
        const Observable& obs = observables[o];
        switch (obs.kind) {
          case Observable::Kind::X: tmp.assign(x.begin(), x.end()); break;
          case Observable::Kind::Dual:
            kern.dual_functional(x.data(), y.data(), count, k, obs.n, obs.m.data(), tmp.data(), count);
            break;
          case Observable::Kind::Fixation:
            kern.fixation_functional(x.data(), y.data(), count, k, ratio.data(), den, tmp.data(), count);
            break;
        }
        out[o][cp] = tmp;
      }
    };
    std::size_t step = 0;
    for (std::size_t cp = 0; cp < at_step.size(); ++cp) {
      for (; step < at_step[cp]; ++step) {
        if (resampled) {
          kern.drift_step(prm, x.data(), y.data(), count, count);
          for (std::size_t p = 0; p < count; ++p) x[p] = resample(x[p], pop, rngs[p]);
        } else {
          for (std::size_t p = 0; p < count; ++p) z[p] = normals[p](rngs[p]);
          kern.em_step(prm, x.data(), y.data(), count, z.data(), count);
        }
      }
      record(cp);
    }
    return out;
  });

  std::vector<std::vector<std::vector<double>>> result(
      observables.size(), std::vector<std::vector<double>>(checkpoints.size()));
  for (std::size_t o = 0; o < observables.size(); ++o) {
    for (std::size_t cp = 0; cp < checkpoints.size(); ++cp) {
      auto& dst = result[o][cp];
      dst.reserve(spec.paths);
      for (const auto& blk : per_block) dst.insert(dst.end(), blk[o][cp].begin(), blk[o][cp].end());
    }
  }
  return result;
}

McSummary dual_moment_lhs(const RateMeasure& mu, double x0, std::span<const double> y0, int n,
                          std::span<const int> m, double t, double dt, std::size_t paths,
                          std::uint64_t seed, unsigned workers, DiffusionScheme scheme) {
  EnsembleSpec spec{x0, {y0.begin(), y0.end()}, paths, dt, seed, StreamTag::DualLhs, 0, workers, scheme};
  const Observable obs = Observable::dual(n, {m.begin(), m.end()});
  const double times[] = {t};
  const auto values = simulate_paths(mu, spec, times, std::span(&obs, 1));
  return summarize(values[0][0]);
}

McSummary dual_moment_rhs(const RateMeasure& mu, double x0, std::span<const double> y0, int n,
                          std::span<const int> m, double t, std::size_t reps, std::uint64_t seed,
                          unsigned workers) {
  const DiscreteModel model = DiscreteModel::from(mu);
  check_start(model, x0, y0);
  if (m.size() != model.atoms()) throw std::invalid_argument("need one multiplicity per atom");
  if (n < 0 || std::any_of(m.begin(), m.end(), [](int v) { return v < 0; })) {
    throw std::invalid_argument("multiplicities must be >= 0");
  }
  std::vector<double> init_rates;
  for (std::size_t i = 0; i < m.size(); ++i) init_rates.insert(init_rates.end(), static_cast<std::size_t>(m[i]), model.rates[i]);
  if (n == 0 && init_rates.empty()) throw std::invalid_argument("need at least one block");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");

  const Variant standard = Variant::standard();
  const auto values = parallel_map(reps, workers, [&](std::size_t r) {
    Rng rng = make_stream(seed, StreamTag::DualRhs, r);
    BlockCountState state{n, DormantBank(init_rates), 0.0};
    run_until(
        state, standard, mu, rng,
        [&](const BlockCountState& s) { return !(channel_rates(s, standard, mu).total() > 0.0); },
        RunOptions{t, false});
    double v = 1.0;
    for (std::int64_t j = 0; j < state.active; ++j) v *= x0;
    state.bank.for_each_alive([&](DormantBank::SlotId, double rate) {
      const auto it = std::lower_bound(model.rates.begin(), model.rates.end(), rate);
      v *= y0[static_cast<std::size_t>(it - model.rates.begin())];
    });
    return v;
  });
  return summarize(values);
}

FixationReport fixation_check(const RateMeasure& mu, double x0, std::span<const double> y0,
                              double t_long, double dt, std::size_t paths, std::uint64_t seed,
                              unsigned workers, DiffusionScheme scheme) {
  if (std::isinf(mu.integrate_reciprocal())) throw std::domain_error("fixation needs int 1/lambda dmu < inf");
  EnsembleSpec spec{x0, {y0.begin(), y0.end()}, paths, dt, seed, StreamTag::DualLhs, 1, workers, scheme};
  const Observable obs = Observable::x_value();
  const double times[] = {t_long};
  const auto xs = simulate_paths(mu, spec, times, std::span(&obs, 1))[0][0];
  std::size_t interior = 0;
  for (double x : xs) {
    if (std::min(x, 1.0 - x) > 0.05) ++interior;
  }
  const McSummary s = summarize(xs);
  return {static_cast<double>(interior) / static_cast<double>(paths), s.mean, s.se,
          fixation_weight(x0, y0, mu), paths};
}

std::vector<McSummary> zero_drift_functional(const RateMeasure& mu, double x0,
                                             std::span<const double> y0,
                                             std::span<const double> times, double dt,
                                             std::size_t paths, std::uint64_t seed,
                                             unsigned workers, DiffusionScheme scheme) {
  EnsembleSpec spec{x0, {y0.begin(), y0.end()}, paths, dt, seed, StreamTag::DualLhs, 2, workers, scheme};
  const Observable obs = Observable::fixation();
  const auto values = simulate_paths(mu, spec, times, std::span(&obs, 1));
  std::vector<McSummary> out;
  for (const auto& v : values[0]) out.push_back(summarize(v));
  return out;
}

}  // namespace seedbank
