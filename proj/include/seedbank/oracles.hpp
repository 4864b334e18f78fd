#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "seedbank/measure.hpp"
#include "seedbank/stats.hpp"

namespace seedbank {

/// E[T_MRCA] from two dormant blocks, both at rate lambda, with mu = c delta_lambda:
/// 1 + (4c+3)/(2 lambda) + (2c^2+c)/(2 lambda^2).
double tmrca_two_single_bank(double c, double lambda);

/// Expected first-passage times of the two-block chain for a discrete mu.
/// f(lambda): from one active and one dormant block (rate lambda) to two
/// active blocks. f(lambda, lambda'): from two dormant blocks to two
/// active blocks.
struct RecurrenceSolution {
  std::vector<double> rates;    // atom rates lambda_j
  std::vector<double> weights;  // atom masses c_j
  std::vector<double> f_values;
  std::vector<std::vector<double>> pair_values;  // f(lambda_i, lambda_j)
  double rcond = 0.0;  // reciprocal condition number estimate of the system

  /// f at any lambda > 0 (need not be an atom), from the solved atom values.
  double f(double lambda) const;
  double f_pair(double lambda, double lambda2) const;

  /// E[T_MRCA(2, 0)] = 1 + 2 int f dmu.
  double tmrca_two_active() const;
  /// E[T_MRCA(1, delta_lambda)] = f(lambda) + E[T_MRCA(2, 0)].
  double tmrca_one_dormant(double lambda) const;
  /// E[T_MRCA(0, delta_lambda + delta_lambda')] = f(lambda, lambda') + E[T_MRCA(2, 0)].
  double tmrca_two_dormant(double lambda, double lambda2) const;
};

/// Solves (1 + S_i) f_i - sum_j c_j f_j / (lambda_i + lambda_j) = (1 + S_i) / lambda_i,
/// S_i = sum_j c_j / (lambda_i + lambda_j), by dense LU with partial pivoting.
/// Requires a discrete mu with at most 100 atoms; throws std::runtime_error
/// on a numerically singular system.
RecurrenceSolution solve_f(const RateMeasure& mu);

/// Expected hitting time of m from j for the walk on {0, 1, ...} reflected
/// at 0 with up-probability p. Requires 0 < p <= 1, p != 1/2, 0 <= j < m.
double rw_hitting_time(double p, std::int64_t j, std::int64_t m);
/// The j = 0 and j = m - 1 specializations.
double rw_hitting_time_from_origin(double p, std::int64_t m);
double rw_hitting_time_last_step(double p, std::int64_t m);

/// Monte Carlo hitting time from j to m where the up-probability at
/// position k in [1, m) is up_prob[k] (entry 0 unused: the origin always
/// steps up). Requires up_prob.size() >= m.
McSummary rw_hitting_mc(std::span<const double> up_prob, std::int64_t j, std::int64_t m,
                        std::size_t reps, std::uint64_t seed, std::uint64_t stream = 0);
McSummary rw_hitting_mc(double p, std::int64_t j, std::int64_t m, std::size_t reps,
                        std::uint64_t seed, std::uint64_t stream = 0);

/// Monte Carlo count of attempts until the first success, where attempt k
/// (1-based) succeeds with probability success_prob(k).
McSummary first_success_mc(const std::function<double(std::uint64_t)>& success_prob,
                           std::size_t reps, std::uint64_t seed);

struct AncestralLimit {
  double active_prob;
  bool degenerate;  // int 1/lambda dmu = inf, the line ends up asleep
};

/// Long-run probability that an ancestral line is active:
/// 1 / (1 + int 1/lambda dmu).
AncestralLimit ancestral_active_prob_limit(const RateMeasure& mu);

/// Long-run probability that the line is dormant with rate in (lo, hi]:
/// int_(lo,hi] 1/lambda dmu / (1 + int 1/lambda dmu).
double ancestral_dormant_weight(const RateMeasure& mu, double lo, double hi);

/// lambda/(c+lambda) + c/(c+lambda) e^{-(c+lambda) t}.
double single_bank_active_prob(double c, double lambda, double t);

struct RenewalResult {
  std::vector<double> values;  // P_t at each requested time
  double step = 0.0;           // final grid step
  double max_change = 0.0;     // max |P_h - P_{h/2}| over requested times
  bool converged = false;      // max_change < 1e-4
};

/// Probability that a line started active is active at each t: one cycle is
/// an Exp(c) active period followed by a dormancy with CDF K. Solves
///   P = e^{-ct} + (c e^{-c.}) * Q,   Q = k * P
/// (Q the density of cycle ends) with the trapezoidal rule on a uniform grid
/// of step h, then again with h/2. Values are from the finer grid.
RenewalResult renewal_active_prob(const RateMeasure& mu, std::span<const double> times,
                                  double step = 1e-3);

struct OdeResult {
  double p = 0.0;
  std::vector<double> q;
  double step = 0.0;
};

/// Forward equation of one ancestral line for a discrete mu:
/// p' = -c p + sum_i lambda_i q_i,  q_i' = -lambda_i q_i + c_i p,
/// classical RK4 with the step halved until the result moves by < 1e-8.
OdeResult ode_ancestral_distribution(const RateMeasure& mu, double p0, std::span<const double> q0,
                                     double t);

/// (x + sum_i y_i c_i / lambda_i) / (1 + sum_i c_i / lambda_i).
double fixation_weight(double x, std::span<const double> y, const RateMeasure& mu);

// Exploratory probes. They only tabulate; nothing is asserted about the
// shape of the results.

struct ProbeRow {
  double a;
  double b;
  double value;
  double slope;  // centered finite difference in a
};

/// f(lambda) and its finite-difference slope at each lambda.
std::vector<ProbeRow> probe_f_monotonicity(const RateMeasure& mu, std::span<const double> lambdas);
/// f(lambda, lambda') on a grid; slope is in the first argument.
std::vector<ProbeRow> probe_f_pair(const RateMeasure& mu, std::span<const double> lambdas);
/// P_t under mu (value) and under mu2 (b) at each time a; slope unused.
std::vector<ProbeRow> probe_active_prob_dominance(const RateMeasure& mu, const RateMeasure& mu2,
                                                  std::span<const double> times);

}  // namespace seedbank
