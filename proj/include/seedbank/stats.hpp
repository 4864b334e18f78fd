#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace seedbank {

/// Monte Carlo mean with standard error. Carries the centered second moment
/// so summaries merge exactly (pooled moments).
struct McSummary {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t reps = 0;
  double m2 = 0.0;  // sum of squared deviations from the mean
  std::map<std::string, double> extras;

  double variance() const { return reps > 1 ? m2 / static_cast<double>(reps - 1) : 0.0; }
};

/// Throws std::invalid_argument for fewer than two samples.
McSummary summarize(std::span<const double> samples);

/// Pooled-moments combination; either side may be an empty summary.
McSummary merge(const McSummary& a, const McSummary& b);

/// |a - b| <= k * (se_a + se_b) + slack.
bool within_se(double a, double se_a, double b, double se_b, double k, double slack = 0.0);

struct KsResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with the
/// small-sample correction of Stephens.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_q(double x);

/// Pearson goodness of fit of counts against category probabilities.
double chi_square_gof_p(std::span<const std::uint64_t> observed, std::span<const double> probs);

/// Pearson test of homogeneity for two count vectors over the same
/// categories. Categories empty in both samples are dropped.
double chi_square_homogeneity_p(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace seedbank
