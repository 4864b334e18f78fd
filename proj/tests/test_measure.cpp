#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "seedbank/measure.hpp"
#include "seedbank/measure_config.hpp"
#include "support/reference.hpp"

using namespace seedbank;

namespace {

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("total mass") {
  CHECK(RateMeasure::atoms({{0.5, 2.0}}).total_mass() == 2.0);
  CHECK(RateMeasure::gamma(2.0, 3.0, 1.0).total_mass() == 1.0);
  CHECK(RateMeasure::empty().total_mass() == 0.0);
  CHECK(RateMeasure::atoms({{1.0, 0.25}, {2.0, 0.5}, {7.0, 1.25}}).total_mass() == 2.0);
}

TEST_CASE("construction is validated") {
  CHECK_THROWS_AS(RateMeasure::atoms({}), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::atoms({{-1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::atoms({{0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::atoms({{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::atoms({{1.0, 1.0}, {1.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::gamma(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::gamma(1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RateMeasure::gamma(1.0, 1.0, 0.0), std::invalid_argument);

  const auto mu = RateMeasure::atoms({{3.0, 1.0}, {1.0, 2.0}});
  REQUIRE(mu.atom_list().size() == 2);
  CHECK(mu.atom_list()[0].rate == 1.0);
  CHECK(mu.atom_list()[1].rate == 3.0);
  CHECK(*mu.support_min() == 1.0);
  CHECK(*mu.support_max() == 3.0);
}

TEST_CASE("sample_rate") {
  Rng rng(11);
  SUBCASE("single atom") {
    const auto mu = RateMeasure::dirac(1.0);
    for (int i = 0; i < 1000; ++i) CHECK(mu.sample_rate(rng) == 1.0);
  }
  SUBCASE("weight-proportional choice") {
    const auto mu = RateMeasure::atoms({{1.0, 1.0}, {3.0, 3.0}});
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += mu.sample_rate(rng) == 3.0;
    const double freq = static_cast<double>(hits) / n;
    const double se = std::sqrt(0.75 * 0.25 / n);
    CHECK(std::fabs(freq - 0.75) < 3.0 * se);
  }
  SUBCASE("gamma draws have mean shape / rate and match the Lomax survival") {
    const auto mu = RateMeasure::gamma(2.0, 3.0, 1.0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, e = 0.0, e2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double l = mu.sample_rate(rng);
      CHECK_MESSAGE(l > 0.0, "nonpositive rate");
      s += l;
      s2 += l * l;
      const double w = std::exp(-3.0 * l);
      e += w;
      e2 += w * w;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - 2.0 / 3.0) < 3.0 * se);
    // E[exp(-3 l)] is the dormancy survival at t = 3: (1 + 3/3)^-2.
    const double lap = e / n;
    const double lap_se = std::sqrt((e2 / n - lap * lap) / n);
    CHECK(std::fabs(lap - 0.25) < 3.0 * lap_se);
  }
  SUBCASE("empty measure") {
    const auto mu = RateMeasure::empty();
    try {
      mu.sample_rate(rng);
      FAIL("expected a throw");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("no dormancy possible") != std::string::npos);
    }
  }
}

TEST_CASE("integrate_reciprocal") {
  CHECK(RateMeasure::atoms({{0.5, 2.0}}).integrate_reciprocal() == 4.0);
  CHECK(RateMeasure::empty().integrate_reciprocal() == 0.0);

  SUBCASE("gamma shape 1 diverges") {
    CHECK(std::isinf(RateMeasure::gamma(1.0, 1.0, 1.0).integrate_reciprocal()));
    // Truncated integrals of l^{-1} e^{-l} grow like log(1/eps).
    double prev = 0.0;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double tail = ref::simpson([](double u) { return std::exp(-std::exp(u)); },
                                       std::log(eps), std::log(60.0), 1e-10);
      if (prev > 0.0) CHECK(tail - prev == doctest::Approx(std::log(100.0)).epsilon(0.01));
      prev = tail;
    }
  }
  SUBCASE("gamma against quadrature") {
    struct Case {
      double a, b, c;
    };
    for (const Case k : {Case{2.0, 1.0, 1.0}, Case{3.5, 0.7, 2.0}, Case{1.5, 2.0, 0.5}}) {
      const auto mu = RateMeasure::gamma(k.a, k.b, k.c);
      const double quad =
          k.c * ref::half_line([&](double l) { return l > 0.0 ? ref::gamma_pdf(l, k.a, k.b) / l : 0.0; }, 1e-12);
      CHECK(rel_err(mu.integrate_reciprocal(), quad) < 1e-8);
    }
    CHECK(RateMeasure::gamma(2.0, 1.0, 1.0).integrate_reciprocal() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("restricted range") {
    const auto d = RateMeasure::atoms({{0.5, 1.0}, {1.0, 2.0}, {4.0, 3.0}});
    CHECK(d.integrate_reciprocal(0.0, 1.0) == doctest::Approx(2.0 + 2.0).epsilon(1e-12));
    CHECK(d.integrate_reciprocal(1.0, 10.0) == doctest::Approx(0.75).epsilon(1e-12));
    const auto g = RateMeasure::gamma(2.5, 1.5, 2.0);
    const double quad = 2.0 * ref::simpson([](double l) { return ref::gamma_pdf(l, 2.5, 1.5) / l; }, 0.5, 3.0, 1e-13);
    CHECK(rel_err(g.integrate_reciprocal(0.5, 3.0), quad) < 1e-8);
    const auto g1 = RateMeasure::gamma(0.8, 1.0, 1.0);
    const double quad1 = ref::simpson([](double l) { return ref::gamma_pdf(l, 0.8, 1.0) / l; }, 0.2, 5.0, 1e-13);
    CHECK(rel_err(g1.integrate_reciprocal(0.2, 5.0), quad1) < 1e-8);
    CHECK(std::isinf(g1.integrate_reciprocal(0.0, 5.0)));
  }
}

TEST_CASE("dormancy cdf and survival") {
  CHECK(RateMeasure::gamma(2.0, 3.0, 1.0).dormancy_cdf(0.0) == 0.0);
  CHECK(RateMeasure::dirac(1.0).dormancy_cdf(0.0) == 0.0);
  CHECK(RateMeasure::gamma(2.0, 3.0, 1.0).dormancy_cdf(3.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(RateMeasure::dirac(1.0).dormancy_cdf(std::numbers::ln2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(RateMeasure::gamma(2.0, 3.0, 1.0).survival_laplace(0.0) == 1.0);
  CHECK(RateMeasure::gamma(2.0, 3.0, 1.0).survival_laplace(3.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(RateMeasure::dirac(2.0).survival_laplace(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(RateMeasure::empty().dormancy_cdf(1.0), std::domain_error);
  CHECK_THROWS_AS(RateMeasure::empty().survival_laplace(1.0), std::domain_error);

  const RateMeasure measures[] = {RateMeasure::dirac(1.0), RateMeasure::atoms({{0.1, 1.0}, {2.0, 0.5}, {9.0, 2.0}}),
                                  RateMeasure::gamma(2.0, 3.0, 1.0), RateMeasure::gamma(0.5, 1.0, 3.0)};
  for (const auto& mu : measures) {
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double t = 0.05 * i * i;
      const double k = mu.dormancy_cdf(t);
      CHECK(k >= prev);
      CHECK(k + mu.survival_laplace(t) == 1.0);
      prev = k;
    }
    CHECK(mu.dormancy_cdf(1e12) > 1.0 - 1e-5);
  }
}

TEST_CASE("discrete integrals equal explicit sums") {
  const double rates[] = {0.3, 1.0, 2.5, 8.0};
  const double weights[] = {0.7, 0.2, 1.1, 0.4};
  const auto mu = RateMeasure::atoms({{0.3, 0.7}, {1.0, 0.2}, {2.5, 1.1}, {8.0, 0.4}});
  const double c = 0.7 + 0.2 + 1.1 + 0.4;
  double rec = 0.0, mean_rate = 0.0;
  for (int i = 0; i < 4; ++i) {
    rec += weights[i] / rates[i];
    mean_rate += weights[i] * rates[i] / c;
  }
  CHECK(std::fabs(mu.integrate_reciprocal() - rec) < 1e-12);
  CHECK(std::fabs(mu.mean_rate() - mean_rate) < 1e-12);
  for (double t : {0.0, 0.1, 1.0, 3.7, 25.0}) {
    double surv = 0.0, dens = 0.0;
    for (int i = 0; i < 4; ++i) {
      surv += weights[i] / c * std::exp(-rates[i] * t);
      dens += weights[i] / c * rates[i] * std::exp(-rates[i] * t);
    }
    CHECK(std::fabs(mu.survival_laplace(t) - surv) < 1e-12);
    CHECK(std::fabs(mu.dormancy_cdf(t) - (1.0 - surv)) < 1e-12);
    CHECK(std::fabs(mu.dormancy_density(t) - dens) < 1e-12);
  }
}

TEST_CASE("gamma integrals agree with quadrature") {
  struct Case {
    double a, b;
  };
  for (const Case k : {Case{2.0, 3.0}, Case{0.7, 1.3}, Case{4.0, 0.25}}) {
    const auto mu = RateMeasure::gamma(k.a, k.b, 1.7);
    for (double t : {0.1, 1.0, 5.0, 40.0}) {
      const double surv = ref::half_line([&](double l) { return std::exp(-l * t) * ref::gamma_pdf(l, k.a, k.b); }, 1e-13);
      const double dens =
          ref::half_line([&](double l) { return l * std::exp(-l * t) * ref::gamma_pdf(l, k.a, k.b); }, 1e-13);
      CHECK(rel_err(mu.survival_laplace(t), surv) < 1e-8);
      CHECK(rel_err(mu.dormancy_density(t), dens) < 1e-8);
    }
    const double mean = ref::half_line([&](double l) { return l * ref::gamma_pdf(l, k.a, k.b); }, 1e-13);
    CHECK(rel_err(mu.mean_rate(), mean) < 1e-8);
  }
}

TEST_CASE("json config") {
  const auto a = parse_measure(R"({"type":"atoms","atoms":[[2.0,1.0],[1.0,0.5]]})");
  CHECK(a.is_discrete());
  CHECK(a.total_mass() == 1.5);
  const auto g = parse_measure(R"({"type":"gamma","a":2,"b":3,"c":1})");
  CHECK(g.is_gamma());
  CHECK(g.gamma_params().rate == 3.0);
  CHECK(parse_measure(R"({"type":"empty"})").is_empty());

  CHECK_THROWS_AS(parse_measure("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure(R"({"type":"beta"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure(R"({"type":"gamma","a":2})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure(R"({"type":"atoms","atoms":[[1.0]]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure(R"({"type":"atoms","atoms":[[1.0,1.0],[1.0,2.0]]})"), std::invalid_argument);

  for (const auto& mu : {a, g, RateMeasure::empty()}) {
    const auto back = measure_from_json(measure_to_json(mu));
    CHECK(measure_to_json(back) == measure_to_json(mu));
    CHECK(back.total_mass() == mu.total_mass());
  }
}
