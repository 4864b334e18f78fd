#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedbank/diffusion.hpp"
#include "seedbank/kernels.hpp"
#include "seedbank/oracles.hpp"

using namespace seedbank;

namespace {

// Written-out Euler-Maruyama step for a discrete measure.
void reference_step(double& x, std::vector<double>& y, const std::vector<double>& rates,
                    const std::vector<double>& weights, double dt, double z) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    s += weights[i] * y[i];
    c += weights[i];
  }
  const double nx = x + (s - c * x) * dt + std::sqrt(std::max(0.0, x * (1.0 - x))) * (std::sqrt(dt) * z);
  for (std::size_t i = 0; i < rates.size(); ++i) y[i] = std::clamp(y[i] + rates[i] * (x - y[i]) * dt, 0.0, 1.0);
  x = std::clamp(nx, 0.0, 1.0);
}

// P(two lineages have not met by t) for delta_1 with c = 1, by RK4 on the
// forward equation of the chain (2,0) -> {met, (1,d)}, (1,d) <-> (0,2d).
double two_lineage_survival(double t) {
  auto rhs = [](const std::array<double, 3>& p) {
    return std::array<double, 3>{-3.0 * p[0] + p[1], 2.0 * p[0] - 2.0 * p[1] + 2.0 * p[2], p[1] - 2.0 * p[2]};
  };
  std::array<double, 3> p{1.0, 0.0, 0.0};
  const int steps = 20000;
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(p);
    std::array<double, 3> q;
    for (int i = 0; i < 3; ++i) q[i] = p[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(q);
    for (int i = 0; i < 3; ++i) q[i] = p[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(q);
    for (int i = 0; i < 3; ++i) q[i] = p[i] + h * k3[i];
    const auto k4 = rhs(q);
    for (int i = 0; i < 3; ++i) p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return p[0] + p[1] + p[2];
}

// Per-path x(1 - x) at each checkpoint, summarized.
std::vector<McSummary> heterozygosity(const RateMeasure& mu, const EnsembleSpec& spec,
                                      std::span<const double> times) {
  const Observable obs = Observable::x_value();
  const auto xs = simulate_paths(mu, spec, times, std::span(&obs, 1))[0];
  std::vector<McSummary> out;
  for (const auto& v : xs) {
    std::vector<double> h;
    for (double x : v) h.push_back(x * (1.0 - x));
    out.push_back(summarize(h));
  }
  return out;
}

}  // namespace

TEST_CASE("Euler-Maruyama step") {
  const auto unit = RateMeasure::dirac(1.0);
  Rng rng(1);
  SUBCASE("absorbing corners") {
    for (double v : {0.0, 1.0}) {
      DiffusionState s{v, {v}, 0.0};
      for (int i = 0; i < 1000; ++i) step_em(s, unit, 1e-2, rng);
      CHECK(s.x == v);
      CHECK(s.y[0] == v);
      CHECK(s.t == doctest::Approx(10.0));
    }
  }
  SUBCASE("drift only") {
    DiffusionState s{1.0, {0.0}, 0.0};
    step_em_with_noise(s, unit, 0.01, 0.0);
    CHECK(s.x == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(s.y[0] == doctest::Approx(0.01).epsilon(1e-15));
  }
  SUBCASE("matches the written-out step") {
    const std::vector<double> rates = {0.5, 2.0, 6.0}, weights = {1.0, 0.3, 0.7};
    const auto mu = RateMeasure::atoms({{0.5, 1.0}, {2.0, 0.3}, {6.0, 0.7}});
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 200; ++trial) {
      DiffusionState s{uniform01(rng), {uniform01(rng), uniform01(rng), uniform01(rng)}, 0.0};
      double x = s.x;
      std::vector<double> y = s.y;
      for (int k = 0; k < 50; ++k) {
        const double z = 3.0 * normal(rng);
        step_em_with_noise(s, mu, 0.02, z);
        reference_step(x, y, rates, weights, 0.02, z);
        REQUIRE(s.in_domain());
      }
      CHECK(s.x == doctest::Approx(x).epsilon(1e-13));
      for (std::size_t i = 0; i < 3; ++i) CHECK(s.y[i] == doctest::Approx(y[i]).epsilon(1e-13));
    }
  }
  SUBCASE("state stays in the domain") {
    const auto mu = RateMeasure::atoms({{0.1, 2.0}, {9.0, 3.0}});
    for (int trial = 0; trial < 100; ++trial) {
      DiffusionState s{uniform01(rng), {uniform01(rng), uniform01(rng)}, 0.0};
      for (int k = 0; k < 2000; ++k) {
        step_em(s, mu, 0.05, rng);
        REQUIRE(s.in_domain());
      }
    }
  }
  DiffusionState g{0.5, {0.5}, 0.0};
  CHECK_THROWS_AS(step_em_with_noise(g, RateMeasure::gamma(2.0, 1.0, 1.0), 0.01, 0.0), std::invalid_argument);
}

TEST_CASE("resampling step") {
  const auto unit = RateMeasure::dirac(1.0);
  Rng rng(2);
  SUBCASE("absorbing corners") {
    for (double v : {0.0, 1.0}) {
      DiffusionState s{v, {v}, 0.0};
      for (int i = 0; i < 1000; ++i) step_resample(s, unit, 1e-2, rng);
      CHECK(s.x == v);
      CHECK(s.y[0] == v);
      CHECK(s.t == doctest::Approx(10.0));
    }
  }
  SUBCASE("one step: lattice values, mean and variance of the drifted point") {
    // Drift from (0.3, 0.8) with dt = 0.01: x_d = 0.3 + 0.5 * 0.01 = 0.305.
    const double xd = 0.305;
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      DiffusionState st{0.3, {0.8}, 0.0};
      step_resample(st, unit, 0.01, rng);
      REQUIRE(st.y[0] == doctest::Approx(0.8 - 0.005).epsilon(1e-15));
      REQUIRE(std::fabs(st.x * 100.0 - std::nearbyint(st.x * 100.0)) < 1e-9);
      s += st.x;
      s2 += st.x * st.x;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    const double want_var = xd * (1.0 - xd) * 0.01;
    CHECK(std::fabs(mean - xd) < 3.0 * std::sqrt(want_var / n));
    // sd of the sample variance is about var * sqrt(2 / n) for a near-normal law.
    CHECK(std::fabs(var - want_var) < 4.0 * want_var * std::sqrt(2.0 / n));
  }
  SUBCASE("state stays in the domain") {
    const auto mu = RateMeasure::atoms({{0.1, 2.0}, {9.0, 3.0}});
    for (int trial = 0; trial < 100; ++trial) {
      DiffusionState s{uniform01(rng), {uniform01(rng), uniform01(rng)}, 0.0};
      for (int k = 0; k < 2000; ++k) {
        step_resample(s, mu, 0.1, rng);
        REQUIRE(s.in_domain());
      }
    }
  }
  SUBCASE("preconditions") {
    DiffusionState s{0.5, {0.5}, 0.0};
    CHECK_THROWS_AS(step_resample(s, unit, 0.3, rng), std::invalid_argument);
    CHECK_THROWS_AS(step_resample(s, RateMeasure::dirac(20.0), 0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(step_resample(s, RateMeasure::dirac(1.0, 20.0), 0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(step_resample(s, unit, 0.0, rng), std::invalid_argument);
  }
  CHECK(parse_scheme("resample") == DiffusionScheme::Resample);
  CHECK(std::string(to_string(parse_scheme("clamped-em"))) == "clamped-em");
  CHECK_THROWS_AS(parse_scheme("milstein"), std::invalid_argument);
}

TEST_CASE("heterozygosity decays as the dual predicts") {
  // E[x(1-x)] from x0 = y0 = 1/2 is P(two lineages have not met) / 4.
  const auto unit = RateMeasure::dirac(1.0);
  const double times[] = {1.0, 5.0, 10.0};
  EnsembleSpec spec{0.5, {0.5}, 4000, 1e-3, 31};
  const auto h = heterozygosity(unit, spec, times);
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = 0.25 * two_lineage_survival(times[i]);
    MESSAGE("t=" << times[i] << " resample " << h[i].mean << " exact " << exact);
    CHECK(std::fabs(h[i].mean - exact) < 3.0 * h[i].se + 0.003);
  }
  // The clamped scheme keeps mass in the interior: at t = 10 it sits far
  // above the exact value, and halving dt does not close the gap.
  spec.scheme = DiffusionScheme::ClampedEm;
  const double late[] = {10.0};
  const auto coarse = heterozygosity(unit, spec, late)[0];
  spec.dt = 5e-4;
  const auto fine = heterozygosity(unit, spec, late)[0];
  const double exact = 0.25 * two_lineage_survival(10.0);
  MESSAGE("clamped t=10: dt 1e-3 " << coarse.mean << ", dt 5e-4 " << fine.mean << ", exact " << exact);
  CHECK(coarse.mean - exact > 5.0 * coarse.se);
  CHECK(fine.mean - exact > 5.0 * fine.se);
}

TEST_CASE("ensembles") {
  const auto unit = RateMeasure::dirac(1.0);
  const double y0[] = {0.5};
  const int m1[] = {1};

  SUBCASE("t = 0 is exact") {
    const auto s = dual_moment_lhs(unit, 0.5, y0, 1, m1, 0.0, 1e-3, 100, 1);
    CHECK(s.mean == 0.25);
    CHECK(s.se == 0.0);
    const auto r = dual_moment_rhs(unit, 0.5, y0, 1, m1, 0.0, 100, 1);
    CHECK(r.mean == 0.25);
    CHECK(r.se == 0.0);
    const int m2[] = {2};
    CHECK(dual_moment_rhs(unit, 0.5, y0, 3, m2, 0.0, 10, 1).mean == 0.5 * 0.5 * 0.5 * 0.25);
  }
  SUBCASE("absorbed at one") {
    const double ones[] = {1.0};
    for (double t : {0.5, 3.0}) {
      CHECK(dual_moment_lhs(unit, 1.0, ones, 2, m1, t, 1e-2, 200, 2).mean == 1.0);
      CHECK(dual_moment_rhs(unit, 1.0, ones, 2, m1, t, 200, 2).mean == 1.0);
    }
    const auto f = fixation_check(unit, 1.0, ones, 5.0, 1e-2, 200, 3);
    CHECK(f.interior_fraction == 0.0);
    CHECK(f.mean_x == 1.0);
  }
  SUBCASE("mean of x follows the linear drift") {
    // E x' = E y - E x, E y' = E x - E y for delta_1.
    const double y08[] = {0.8};
    const int m0[] = {0};
    const auto s = dual_moment_lhs(unit, 0.3, y08, 1, m0, 1.0, 1e-3, 20000, 4);
    const double expected = 0.55 - 0.25 * std::exp(-2.0);
    CHECK(std::fabs(s.mean - expected) < 3.0 * s.se + 0.005);
  }
  SUBCASE("duality at small scale") {
    const auto lhs = dual_moment_lhs(unit, 0.5, y0, 1, m1, 1.0, 1e-3, 4000, 5);
    const auto rhs = dual_moment_rhs(unit, 0.5, y0, 1, m1, 1.0, 4000, 6);
    CHECK(std::fabs(lhs.mean - rhs.mean) <= 3.0 * (lhs.se + rhs.se) + 0.05);
  }
  SUBCASE("moments approach the fixation weight") {
    const auto mu = RateMeasure::atoms({{1.0, 0.5}, {2.0, 0.5}});
    const double y[] = {0.7, 0.4};
    const int m[] = {1, 0};
    const auto r = dual_moment_rhs(mu, 0.2, y, 1, m, 40.0, 10000, 7);
    CHECK(std::fabs(r.mean - fixation_weight(0.2, y, mu)) < 3.0 * r.se + 1e-3);
  }
  SUBCASE("zero-drift functional") {
    const auto mu = RateMeasure::atoms({{1.0, 0.5}, {2.0, 0.5}});
    const double y[] = {0.7, 0.4};
    const double times[] = {0.0, 1.0, 5.0};
    const auto s = zero_drift_functional(mu, 0.2, y, times, 1e-3, 2000, 8);
    CHECK(s[0].mean == doctest::Approx(fixation_weight(0.2, y, mu)).epsilon(1e-12));
    for (const auto& v : s) CHECK(std::fabs(v.mean - s[0].mean) < 3.0 * v.se + 0.02);
  }
  SUBCASE("preconditions") {
    const double bad[] = {1.5};
    CHECK_THROWS_AS(dual_moment_lhs(unit, 0.5, bad, 1, m1, 1.0, 1e-3, 10, 1), std::invalid_argument);
    const int neg[] = {-1};
    CHECK_THROWS_AS(dual_moment_rhs(unit, 0.5, y0, 1, neg, 1.0, 10, 1), std::invalid_argument);
    const int zero[] = {0};
    CHECK_THROWS_AS(dual_moment_rhs(unit, 0.5, y0, 0, zero, 1.0, 10, 1), std::invalid_argument);
    EnsembleSpec spec{0.5, {0.5}, 10, 1e-3, 1};
    const double off[] = {0.0105};
    const Observable obs = Observable::x_value();
    CHECK_THROWS_AS(simulate_paths(unit, spec, off, std::span(&obs, 1)), std::invalid_argument);
    CHECK_THROWS_AS(fixation_check(RateMeasure::gamma(1.0, 1.0, 1.0), 0.5, y0, 1.0, 1e-2, 10, 1),
                    std::domain_error);
  }
}

TEST_CASE("paths do not depend on workers or kernel variant") {
  const auto mu = RateMeasure::atoms({{0.5, 1.0}, {2.0, 0.3}, {6.0, 0.7}});
  const double times[] = {0.0, 0.25, 1.0};
  const Observable obs[] = {Observable::x_value(), Observable::dual(2, {1, 0, 3}), Observable::fixation()};
  EnsembleSpec spec{0.4, {0.1, 0.5, 0.9}, 131, 1e-3, 77};
  const auto before = simd::active_isa();

  spec.workers = 1;
  const auto a = simulate_paths(mu, spec, times, obs);
  spec.workers = 3;
  const auto b = simulate_paths(mu, spec, times, obs);
  CHECK(a == b);

  spec.scheme = DiffusionScheme::ClampedEm;
  const auto c = simulate_paths(mu, spec, times, obs);
  CHECK(c != a);
  for (auto isa : {simd::Isa::Scalar, simd::Isa::Avx2, simd::Isa::Neon}) {
    if (!simd::isa_supported(isa)) continue;
    simd::set_active_isa(isa);
    spec.scheme = DiffusionScheme::Resample;
    CHECK(simulate_paths(mu, spec, times, obs) == a);
    spec.scheme = DiffusionScheme::ClampedEm;
    CHECK(simulate_paths(mu, spec, times, obs) == c);
  }
  simd::set_active_isa(before);
}
