#include "seedbank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace seedbank {

McSummary summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("summarize needs at least two samples");
  McSummary s;
  s.reps = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(s.reps);
  for (double x : samples) s.m2 += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(s.variance() / static_cast<double>(s.reps));
  return s;
}

McSummary merge(const McSummary& a, const McSummary& b) {
  if (a.reps == 0) return b;
  if (b.reps == 0) return a;
  McSummary out;
  const auto na = static_cast<double>(a.reps);
  const auto nb = static_cast<double>(b.reps);
  const double n = na + nb;
  const double delta = b.mean - a.mean;
  out.reps = a.reps + b.reps;
  out.mean = a.mean + delta * nb / n;
  out.m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
  out.se = std::sqrt(out.variance() / n);
  return out;
}

bool within_se(double a, double se_a, double b, double se_b, double k, double slack) {
  return std::fabs(a - b) <= k * (se_a + se_b) + slack;
}

double kolmogorov_q(double x) {
  if (x < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * x * x);
    sum += term;
    if (std::fabs(term) <= 1e-12 * std::fabs(sum) || std::fabs(term) <= 1e-300) {
      return std::clamp(2.0 * sum, 0.0, 1.0);
    }
    sign = -sign;
  }
  return 1.0;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

namespace {
double chi_square_sf(double stat, double df) {
  if (df <= 0.0) return 1.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, stat));
}
}  // namespace

double chi_square_gof_p(std::span<const std::uint64_t> observed, std::span<const double> probs) {
  if (observed.size() != probs.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square_gof_p: mismatched or too few categories");
  }
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probs[i];
    if (!(e > 0.0)) throw std::invalid_argument("chi_square_gof_p: zero expected count");
    const double diff = static_cast<double>(observed[i]) - e;
    stat += diff * diff / e;
  }
  return chi_square_sf(stat, static_cast<double>(observed.size() - 1));
}

double chi_square_homogeneity_p(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_homogeneity_p: size mismatch");
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi_square_homogeneity_p: empty sample");
  const double n = na + nb;
  double stat = 0.0;
  int categories = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    ++categories;
    const double ea = na * col / n;
    const double eb = nb * col / n;
    stat += (static_cast<double>(a[i]) - ea) * (static_cast<double>(a[i]) - ea) / ea;
    stat += (static_cast<double>(b[i]) - eb) * (static_cast<double>(b[i]) - eb) / eb;
  }
  return chi_square_sf(stat, static_cast<double>(categories - 1));
}

}  // namespace seedbank
