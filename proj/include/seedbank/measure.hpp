#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seedbank/rng.hpp"

namespace seedbank {

/// One atom of a discrete rate measure: mass `weight` at wake-up rate `rate`.
struct Atom {
  double rate;
  double weight;
};

/// Gamma family in rate form: density of the normalized measure is
/// proportional to l^(shape-1) exp(-rate l). This is the convention under
/// which the dormancy time is Lomax, K(t) = 1 - (1 + t/rate)^(-shape).
struct GammaFamily {
  double shape;
  double rate;
  double total_mass;
};

/// The finite measure mu on (0, inf) that drives deactivation. A block that
/// falls dormant draws its wake-up rate from nu = mu / c, c = mu((0, inf)).
///
/// Immutable after construction. The empty measure (c = 0) is the Kingman
/// degenerate mode: no block ever becomes dormant.
class RateMeasure {
 public:
  /// Rates must be positive and pairwise distinct, weights positive.
  static RateMeasure atoms(std::vector<Atom> atoms);
  static RateMeasure dirac(double rate, double weight = 1.0);
  static RateMeasure gamma(double shape, double rate, double total_mass);
  static RateMeasure empty();

  bool is_empty() const { return std::holds_alternative<std::monostate>(repr_); }
  bool is_discrete() const { return std::holds_alternative<Discrete>(repr_); }
  bool is_gamma() const { return std::holds_alternative<GammaFamily>(repr_); }

  /// Atoms sorted by rate. Empty unless is_discrete().
  std::span<const Atom> atom_list() const;
  const GammaFamily& gamma_params() const;

  double total_mass() const { return total_mass_; }

  /// Draw a rate from nu. Throws std::domain_error for the empty measure.
  double sample_rate(Rng& rng) const;

  /// Integral of 1/l against mu: the mean dormancy time scaled by c.
  /// Returns +inf when it diverges (Gamma with shape <= 1).
  double integrate_reciprocal() const;

  /// Integral of 1/l against mu restricted to (lo, hi].
  double integrate_reciprocal(double lo, double hi) const;

  /// Dormancy-time CDF K(t) = int (1 - e^{-l t}) nu(dl), computed as
  /// 1 - survival_laplace(t).
  double dormancy_cdf(double t) const;

  /// int e^{-l t} nu(dl): probability that a dormant block with a fresh
  /// nu-rate is still asleep at t.
  double survival_laplace(double t) const;

  /// Dormancy-time density k(t) = int l e^{-l t} nu(dl).
  double dormancy_density(double t) const;

  /// int l nu(dl); +inf never happens for the supported families.
  double mean_rate() const;

  /// Support bounds (discrete: min/max atom; Gamma: 0 / +inf). Empty for
  /// the empty measure.
  std::optional<double> support_min() const;
  std::optional<double> support_max() const;

  std::string describe() const;

 private:
  struct Discrete {
    std::vector<Atom> atoms;
    std::vector<double> cumulative;  // running weight sums, for sampling
  };

  using Repr = std::variant<std::monostate, Discrete, GammaFamily>;

  RateMeasure(Repr repr, double mass) : repr_(std::move(repr)), total_mass_(mass) {}

  void require_nonempty(const char* what) const;

  Repr repr_;
  double total_mass_ = 0.0;
};

}  // namespace seedbank
