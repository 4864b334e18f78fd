#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seedbank/measure.hpp"
#include "seedbank/rng.hpp"
#include "seedbank/stats.hpp"

namespace seedbank {

/// Active frequency x and one seed-bank frequency per atom of a discrete mu.
struct DiffusionState {
  double x = 0.0;
  std::vector<double> y;
  double t = 0.0;

  bool in_domain() const;
};

/// Atom rates and masses of a discrete measure, as flat arrays. The empty
/// measure gives no atoms (the diffusion is then plain Wright-Fisher).
struct DiscreteModel {
  std::vector<double> rates;
  std::vector<double> weights;
  double c = 0.0;

  /// Throws std::invalid_argument for a Gamma measure.
  static DiscreteModel from(const RateMeasure& mu);
  std::size_t atoms() const { return rates.size(); }
};

/// How ensembles advance one step of length dt.
///
/// Resample: Euler drift step, then x <- Binomial(N, x) / N with N = 1/dt
/// (the Wright-Fisher resampling the diffusion is the limit of). Mean
/// preserving, variance x(1-x) dt, stays in [0, 1] without clamping, and
/// absorbs at 0 and 1. Needs 1/dt integral and dt max(c, lambda_i) <= 1.
///
/// ClampedEm: Euler-Maruyama with a normal increment, then clamp to [0, 1].
/// Clamping at a boundary adds mean, and once x sits at 0 the inflow from
/// the bank pushes it back out faster than the true dynamics do. The bias
/// does not vanish as dt -> 0: paths settle near an interior point instead
/// of fixing. Kept for comparison.
enum class DiffusionScheme : std::uint8_t { Resample, ClampedEm };

const char* to_string(DiffusionScheme scheme);
DiffusionScheme parse_scheme(const std::string& name);

/// One Euler-Maruyama step with a standard normal drawn from rng; x and y
/// are clamped to [0, 1] afterwards.
void step_em(DiffusionState& state, const RateMeasure& mu, double dt, Rng& rng);
/// Same step with the normal increment supplied (z = 0 gives the drift).
void step_em_with_noise(DiffusionState& state, const RateMeasure& mu, double dt, double z);
/// One Resample step: the drift of step_em, then binomial resampling of x.
void step_resample(DiffusionState& state, const RateMeasure& mu, double dt, Rng& rng);

/// What to record along the paths.
struct Observable {
  enum class Kind : std::uint8_t { X, Dual, Fixation };
  Kind kind = Kind::X;
  int n = 0;           // Dual: power of x
  std::vector<int> m;  // Dual: power of each y_i

  static Observable x_value() { return {}; }
  static Observable dual(int n, std::vector<int> m) { return {Kind::Dual, n, std::move(m)}; }
  static Observable fixation() { return {Kind::Fixation, 0, {}}; }
};

struct EnsembleSpec {
  double x0 = 0.0;
  std::vector<double> y0;
  std::size_t paths = 0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  StreamTag tag = StreamTag::DualLhs;
  std::uint64_t sub = 0;
  unsigned workers = 0;
  DiffusionScheme scheme = DiffusionScheme::Resample;
};

/// Runs spec.paths independent paths from (x0, y0), each with its own
/// normal stream keyed by (seed, tag, path, sub), and records every
/// observable at every checkpoint time. Checkpoints must be nondecreasing
/// multiples of dt. Result indexed [observable][checkpoint][path]. Output
/// does not depend on the worker count or the kernel variant.
std::vector<std::vector<std::vector<double>>> simulate_paths(const RateMeasure& mu,
                                                             const EnsembleSpec& spec,
                                                             std::span<const double> checkpoints,
                                                             std::span<const Observable> observables);

/// MC mean of x(t)^n prod_i y_i(t)^{m_i} over Euler-Maruyama paths.
McSummary dual_moment_lhs(const RateMeasure& mu, double x0, std::span<const double> y0, int n,
                          std::span<const int> m, double t, double dt, std::size_t paths,
                          std::uint64_t seed, unsigned workers = 0,
                          DiffusionScheme scheme = DiffusionScheme::Resample);

/// MC mean of x0^{N_t} prod_i y0_i^{M_{i,t}} over Standard block-counting
/// runs from n active blocks and m_i dormant blocks at atom i.
McSummary dual_moment_rhs(const RateMeasure& mu, double x0, std::span<const double> y0, int n,
                          std::span<const int> m, double t, std::size_t reps, std::uint64_t seed,
                          unsigned workers = 0);

struct FixationReport {
  double interior_fraction;  // paths with min(x, 1 - x) > 0.05
  double mean_x;
  double se_x;
  double weight;             // fixation_weight(x0, y0)
  std::size_t paths;
};

FixationReport fixation_check(const RateMeasure& mu, double x0, std::span<const double> y0,
                              double t_long, double dt, std::size_t paths, std::uint64_t seed,
                              unsigned workers = 0,
                              DiffusionScheme scheme = DiffusionScheme::Resample);

/// Mean of (x + sum y_i c_i/lambda_i)/(1 + sum c_i/lambda_i) at each time.
std::vector<McSummary> zero_drift_functional(const RateMeasure& mu, double x0,
                                             std::span<const double> y0,
                                             std::span<const double> times, double dt,
                                             std::size_t paths, std::uint64_t seed,
                                             unsigned workers = 0,
                                             DiffusionScheme scheme = DiffusionScheme::Resample);

}  // namespace seedbank
