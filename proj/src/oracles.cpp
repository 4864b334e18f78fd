#include "seedbank/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "seedbank/parallel.hpp"
#include "seedbank/rng.hpp"

namespace seedbank {

double tmrca_two_single_bank(double c, double lambda) {
  if (!(c >= 0.0) || !(lambda > 0.0)) throw std::invalid_argument("need c >= 0, lambda > 0");
  return 1.0 + (4.0 * c + 3.0) / (2.0 * lambda) + (2.0 * c * c + c) / (2.0 * lambda * lambda);
}

double RecurrenceSolution::f(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("f needs lambda > 0");
  double s = 0.0, num = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    s += weights[j] / (lambda + rates[j]);
    num += weights[j] * f_values[j] / (lambda + rates[j]);
  }
  return 1.0 / lambda + num / (1.0 + s);
}

double RecurrenceSolution::f_pair(double lambda, double lambda2) const {
  const double sum = lambda + lambda2;
  return 1.0 / sum + lambda2 * f(lambda) / sum + lambda * f(lambda2) / sum;
}

double RecurrenceSolution::tmrca_two_active() const {
  double s = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) s += weights[j] * f_values[j];
  return 1.0 + 2.0 * s;
}

double RecurrenceSolution::tmrca_one_dormant(double lambda) const {
  return f(lambda) + tmrca_two_active();
}

double RecurrenceSolution::tmrca_two_dormant(double lambda, double lambda2) const {
  return f_pair(lambda, lambda2) + tmrca_two_active();
}

RecurrenceSolution solve_f(const RateMeasure& mu) {
  if (!mu.is_discrete()) throw std::invalid_argument("solve_f needs a discrete measure");
  const auto atoms = mu.atom_list();
  const auto k = static_cast<Eigen::Index>(atoms.size());
  if (k > 100) throw std::invalid_argument("solve_f supports at most 100 atoms");

  RecurrenceSolution sol;
  for (const auto& a : atoms) {
    sol.rates.push_back(a.rate);
    sol.weights.push_back(a.weight);
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double li = sol.rates[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double w = sol.weights[static_cast<std::size_t>(j)] / (li + sol.rates[static_cast<std::size_t>(j)]);
      s += w;
      A(i, j) -= w;
    }
    A(i, i) += 1.0 + s;
    b(i) = (1.0 + s) / li;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  sol.rcond = lu.rcond();
  if (!(sol.rcond > 1e-14)) throw std::runtime_error("solve_f: singular system");
  const Eigen::VectorXd f = lu.solve(b);
  sol.f_values.assign(f.data(), f.data() + k);
  sol.pair_values.assign(atoms.size(), std::vector<double>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double li = sol.rates[i], lj = sol.rates[j];
      sol.pair_values[i][j] = 1.0 / (li + lj) + lj * sol.f_values[i] / (li + lj) +
                              li * sol.f_values[j] / (li + lj);
    }
  }
  return sol;
}

namespace {
void check_walk(double p, std::int64_t j, std::int64_t m) {
  if (!(p > 0.0 && p <= 1.0) || p == 0.5) throw std::invalid_argument("need 0 < p <= 1, p != 1/2");
  if (j < 0 || m <= j) throw std::invalid_argument("need 0 <= j < m");
}
}  // namespace

double rw_hitting_time(double p, std::int64_t j, std::int64_t m) {
  check_walk(p, j, m);
  const double q = 1.0 - p;
  const double d = p - q;
  const double r = q / p;
  return static_cast<double>(m - j) / d +
         2.0 * p * q / (d * d) * (std::pow(r, static_cast<double>(m)) - std::pow(r, static_cast<double>(j)));
}

double rw_hitting_time_from_origin(double p, std::int64_t m) {
  check_walk(p, 0, m);
  const double q = 1.0 - p;
  const double d = p - q;
  return static_cast<double>(m) / d + 2.0 * p * q / (d * d) * (std::pow(q / p, static_cast<double>(m)) - 1.0);
}

double rw_hitting_time_last_step(double p, std::int64_t m) {
  check_walk(p, m - 1, m);
  const double q = 1.0 - p;
  const double d = p - q;
  const double r = q / p;
  return 1.0 / d + 2.0 * p * q / (d * d) *
                       (std::pow(r, static_cast<double>(m)) - std::pow(r, static_cast<double>(m - 1)));
}

McSummary rw_hitting_mc(std::span<const double> up_prob, std::int64_t j, std::int64_t m,
                        std::size_t reps, std::uint64_t seed, std::uint64_t stream) {
  if (j < 0 || m <= j) throw std::invalid_argument("need 0 <= j < m");
  if (up_prob.size() < static_cast<std::size_t>(m)) throw std::invalid_argument("up_prob too short");
  for (std::int64_t k = 1; k < m; ++k) {
    const double p = up_prob[static_cast<std::size_t>(k)];
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("up probabilities must be in (0, 1]");
  }
  const auto steps = parallel_map(reps, 0, [&](std::size_t r) {
    Rng rng = make_stream(seed, StreamTag::HittingWalk, r, stream);
    std::int64_t pos = j;
    double n = 0.0;
    while (pos < m) {
      if (pos == 0 || uniform01(rng) < up_prob[static_cast<std::size_t>(pos)]) {
        ++pos;
      } else {
        --pos;
      }
      n += 1.0;
    }
    return n;
  });
  return summarize(steps);
}

McSummary rw_hitting_mc(double p, std::int64_t j, std::int64_t m, std::size_t reps,
                        std::uint64_t seed, std::uint64_t stream) {
  check_walk(p, j, m);
  const std::vector<double> up(static_cast<std::size_t>(m), p);
  return rw_hitting_mc(up, j, m, reps, seed, stream);
}

McSummary first_success_mc(const std::function<double(std::uint64_t)>& success_prob,
                           std::size_t reps, std::uint64_t seed) {
  const auto attempts = parallel_map(reps, 0, [&](std::size_t r) {
    Rng rng = make_stream(seed, StreamTag::Misc, r, 1);
    std::uint64_t k = 1;
    while (!(uniform01(rng) < success_prob(k))) ++k;
    return static_cast<double>(k);
  });
  return summarize(attempts);
}

AncestralLimit ancestral_active_prob_limit(const RateMeasure& mu) {
  const double r = mu.integrate_reciprocal();
  if (std::isinf(r)) return {0.0, true};
  return {1.0 / (1.0 + r), false};
}

double ancestral_dormant_weight(const RateMeasure& mu, double lo, double hi) {
  const double total = mu.integrate_reciprocal();
  if (std::isinf(total)) throw std::domain_error("limit degenerates: int 1/lambda dmu is infinite");
  return mu.integrate_reciprocal(lo, hi) / (1.0 + total);
}

double single_bank_active_prob(double c, double lambda, double t) {
  if (!(c > 0.0) || !(lambda > 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("need c > 0, lambda > 0, t >= 0");
  }
  return lambda / (c + lambda) + c / (c + lambda) * std::exp(-(c + lambda) * t);
}

namespace {

std::vector<double> rk4(const std::vector<double>& rates, const std::vector<double>& weights, double c,
                        std::vector<double> state, double t, std::size_t steps) {
  const std::size_t k = rates.size();
  const double h = t / static_cast<double>(steps);
  auto deriv = [&](const std::vector<double>& s, std::vector<double>& d) {
    double in = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      in += rates[i] * s[i + 1];
      d[i + 1] = -rates[i] * s[i + 1] + weights[i] * s[0];
    }
    d[0] = -c * s[0] + in;
  };
  std::vector<double> k1(k + 1), k2(k + 1), k3(k + 1), k4(k + 1), tmp(k + 1);
  for (std::size_t n = 0; n < steps; ++n) {
    deriv(state, k1);
    for (std::size_t i = 0; i <= k; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i <= k; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
    deriv(tmp, k3);
    for (std::size_t i = 0; i <= k; ++i) tmp[i] = state[i] + h * k3[i];
    deriv(tmp, k4);
    for (std::size_t i = 0; i <= k; ++i) {
      state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return state;
}

}  // namespace

OdeResult ode_ancestral_distribution(const RateMeasure& mu, double p0, std::span<const double> q0,
                                     double t) {
  if (!mu.is_discrete()) throw std::invalid_argument("ode_ancestral_distribution needs a discrete measure");
  const auto atoms = mu.atom_list();
  if (q0.size() != atoms.size()) throw std::invalid_argument("need one q0 entry per atom");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  double mass = p0;
  for (double q : q0) {
    if (!(q >= 0.0)) throw std::invalid_argument("q0 entries must be >= 0");
    mass += q;
  }
  if (!(p0 >= 0.0) || std::fabs(mass - 1.0) > 1e-12) {
    throw std::invalid_argument("p0 + sum q0 must equal 1");
  }

  std::vector<double> rates, weights;
  for (const auto& a : atoms) {
    rates.push_back(a.rate);
    weights.push_back(a.weight);
  }
  std::vector<double> init{p0};
  init.insert(init.end(), q0.begin(), q0.end());
  if (t == 0.0) return {p0, {q0.begin(), q0.end()}, 0.0};

  std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / 0.05)));
  std::vector<double> coarse = rk4(rates, weights, mu.total_mass(), init, t, steps);
  for (int iter = 0; iter < 20; ++iter) {
    steps *= 2;
    std::vector<double> fine = rk4(rates, weights, mu.total_mass(), init, t, steps);
    double change = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) change = std::max(change, std::fabs(fine[i] - coarse[i]));
    coarse = std::move(fine);
    if (change < 1e-8) break;
  }
  return {coarse[0], {coarse.begin() + 1, coarse.end()}, t / static_cast<double>(steps)};
}

double fixation_weight(double x, std::span<const double> y, const RateMeasure& mu) {
  if (mu.is_gamma()) throw std::invalid_argument("fixation_weight needs a discrete measure");
  const auto atoms = mu.atom_list();
  if (y.size() != atoms.size()) throw std::invalid_argument("need one y entry per atom");
  double num = x, den = 1.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double r = atoms[i].weight / atoms[i].rate;
    num += y[i] * r;
    den += r;
  }
  return num / den;
}

std::vector<ProbeRow> probe_f_monotonicity(const RateMeasure& mu, std::span<const double> lambdas) {
  const RecurrenceSolution sol = solve_f(mu);
  std::vector<ProbeRow> rows;
  for (double l : lambdas) {
    const double h = 1e-5 * l;
    rows.push_back({l, 0.0, sol.f(l), (sol.f(l + h) - sol.f(l - h)) / (2.0 * h)});
  }
  return rows;
}

std::vector<ProbeRow> probe_f_pair(const RateMeasure& mu, std::span<const double> lambdas) {
  const RecurrenceSolution sol = solve_f(mu);
  std::vector<ProbeRow> rows;
  for (double l : lambdas) {
    for (double l2 : lambdas) {
      const double h = 1e-5 * l;
      rows.push_back({l, l2, sol.f_pair(l, l2),
                      (sol.f_pair(l + h, l2) - sol.f_pair(l - h, l2)) / (2.0 * h)});
    }
  }
  return rows;
}

std::vector<ProbeRow> probe_active_prob_dominance(const RateMeasure& mu, const RateMeasure& mu2,
                                                  std::span<const double> times) {
  const RenewalResult a = renewal_active_prob(mu, times);
  const RenewalResult b = renewal_active_prob(mu2, times);
  std::vector<ProbeRow> rows;
  for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({times[i], b.values[i], a.values[i], 0.0});
  return rows;
}

}  // namespace seedbank
