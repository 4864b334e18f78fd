#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "seedbank/stats.hpp"

using namespace seedbank;

TEST_CASE("summarize") {
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const auto s = summarize(ones);
  CHECK(s.mean == 1.0);
  CHECK(s.se == 0.0);
  CHECK(s.reps == 3);

  const std::vector<double> xs = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const auto t = summarize(xs);
  CHECK(t.mean == 5.0);
  CHECK(t.variance() == doctest::Approx(32.0 / 7.0).epsilon(1e-15));
  CHECK(t.se == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)).epsilon(1e-15));

  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(summarize(one), std::invalid_argument);
}

TEST_CASE("merge is the pooled summary") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(10.0, 3.0);
  std::vector<double> a(137), b(1009);
  for (auto& v : a) v = normal(gen);
  for (auto& v : b) v = normal(gen) * 2.0;
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto m = merge(summarize(a), summarize(b));
  const auto w = summarize(all);
  CHECK(std::fabs(m.mean - w.mean) < 1e-12 * std::fabs(w.mean));
  CHECK(std::fabs(m.se - w.se) < 1e-12 * w.se);
  CHECK(m.reps == w.reps);
  const auto m2 = merge(summarize(b), summarize(a));
  CHECK(std::fabs(m2.mean - m.mean) < 1e-12 * std::fabs(w.mean));
  CHECK(std::fabs(m2.se - m.se) < 1e-12 * w.se);
  const auto e = merge(McSummary{}, summarize(a));
  CHECK(e.mean == summarize(a).mean);
}

TEST_CASE("standard error follows the square-root law") {
  std::mt19937_64 gen(5);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> small(10000), large(40000);
  for (auto& v : small) v = expo(gen);
  for (auto& v : large) v = expo(gen);
  const double ratio = summarize(small).se / summarize(large).se;
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("within_se") {
  CHECK(within_se(1.0, 0.1, 1.5, 0.1, 3.0));
  CHECK_FALSE(within_se(1.0, 0.1, 1.7, 0.1, 3.0));
  CHECK(within_se(1.0, 0.1, 1.7, 0.1, 3.0, 0.1));
}

TEST_CASE("Kolmogorov-Smirnov") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_q(5.0) < 1e-20);

  const auto disjoint = ks_two_sample({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  CHECK(disjoint.statistic == 1.0);
  const auto same = ks_two_sample({1.0, 2.0, 3.0}, {3.0, 2.0, 1.0});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(ks_two_sample({1.0, 2.0, 3.0, 4.0}, {2.5}).statistic == 0.5);

  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal;
  int rejections = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(300), b(200);
    for (auto& v : a) v = normal(gen);
    for (auto& v : b) v = normal(gen);
    rejections += ks_two_sample(a, b).p_value < 0.05;
  }
  // Under the null the rejection rate is at most about 5%.
  CHECK(rejections < 0.05 * trials + 3.0 * std::sqrt(0.05 * 0.95 * trials));
  std::vector<double> a(2000), b(2000);
  for (auto& v : a) v = normal(gen);
  for (auto& v : b) v = normal(gen) + 0.3;
  CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("chi-square") {
  // Two degrees of freedom: the survival function is exp(-x/2).
  const std::vector<std::uint64_t> obs = {30, 45, 25};
  const std::vector<double> probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const double e = 100.0 / 3.0;
  const double stat = ((30 - e) * (30 - e) + (45 - e) * (45 - e) + (25 - e) * (25 - e)) / e;
  CHECK(chi_square_gof_p(obs, probs) == doctest::Approx(std::exp(-stat / 2.0)).epsilon(1e-10));
  const std::vector<std::uint64_t> even = {50, 50};
  const std::vector<double> half = {0.5, 0.5};
  CHECK(chi_square_gof_p(even, half) == doctest::Approx(1.0));

  // 2x2 table: one degree of freedom, survival erfc(sqrt(x/2)).
  const std::vector<std::uint64_t> a = {40, 60, 0}, b = {55, 45, 0};
  const double n = 200.0, col0 = 95.0, col1 = 105.0;
  double s = 0.0;
  const double oa[] = {40, 60}, ob[] = {55, 45}, col[] = {col0, col1};
  for (int i = 0; i < 2; ++i) {
    const double ea = 100.0 * col[i] / n, eb = 100.0 * col[i] / n;
    s += (oa[i] - ea) * (oa[i] - ea) / ea + (ob[i] - eb) * (ob[i] - eb) / eb;
  }
  CHECK(chi_square_homogeneity_p(a, b) == doctest::Approx(std::erfc(std::sqrt(s / 2.0))).epsilon(1e-10));
  CHECK(chi_square_homogeneity_p(a, a) == doctest::Approx(1.0));

  const std::vector<std::uint64_t> short_obs = {1};
  const std::vector<double> short_p = {1.0};
  CHECK_THROWS_AS(chi_square_gof_p(short_obs, short_p), std::invalid_argument);
  const std::vector<std::uint64_t> empty = {0, 0, 0};
  CHECK_THROWS_AS(chi_square_homogeneity_p(a, empty), std::invalid_argument);
}
