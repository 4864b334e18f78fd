#include "seedbank/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace seedbank {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RateMeasure RateMeasure::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) {
    throw std::invalid_argument("atom list is empty; use RateMeasure::empty() for the Kingman mode");
  }
  for (const auto& a : atoms) {
    if (!(a.rate > 0.0) || !std::isfinite(a.rate)) {
      throw std::invalid_argument("atom rates must be positive and finite");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("atom weights must be positive and finite");
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.rate < y.rate; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].rate == atoms[i - 1].rate) {
      throw std::invalid_argument("atom rates must be pairwise distinct");
    }
  }
  Discrete d{std::move(atoms), {}};
  double running = 0.0;
  for (const auto& a : d.atoms) {
    running += a.weight;
    d.cumulative.push_back(running);
  }
  return RateMeasure(std::move(d), running);
}

RateMeasure RateMeasure::dirac(double rate, double weight) { return atoms({{rate, weight}}); }

RateMeasure RateMeasure::gamma(double shape, double rate, double total_mass) {
  if (!(shape > 0.0) || !(rate > 0.0) || !(total_mass > 0.0) || !std::isfinite(shape) ||
      !std::isfinite(rate) || !std::isfinite(total_mass)) {
    throw std::invalid_argument("gamma family needs positive finite shape, rate and mass");
  }
  return RateMeasure(GammaFamily{shape, rate, total_mass}, total_mass);
}

RateMeasure RateMeasure::empty() { return RateMeasure(std::monostate{}, 0.0); }

std::span<const Atom> RateMeasure::atom_list() const {
  if (const auto* d = std::get_if<Discrete>(&repr_)) return d->atoms;
  return {};
}

const GammaFamily& RateMeasure::gamma_params() const {
  if (const auto* g = std::get_if<GammaFamily>(&repr_)) return *g;
  throw std::logic_error("measure is not a gamma family");
}

void RateMeasure::require_nonempty(const char* what) const {
  if (is_empty()) {
    throw std::domain_error(std::string(what) + ": no dormancy possible (empty measure)");
  }
}

double RateMeasure::sample_rate(Rng& rng) const {
  require_nonempty("sample_rate");
  if (const auto* d = std::get_if<Discrete>(&repr_)) {
    if (d->atoms.size() == 1) return d->atoms.front().rate;
    const double u = uniform01(rng) * d->cumulative.back();
    auto it = std::upper_bound(d->cumulative.begin(), d->cumulative.end(), u);
    if (it == d->cumulative.end()) --it;
    return d->atoms[static_cast<std::size_t>(it - d->cumulative.begin())].rate;
  }
  const auto& g = std::get<GammaFamily>(repr_);
  std::gamma_distribution<double> dist(g.shape, 1.0 / g.rate);
  double r = dist(rng);
  // A zero draw is possible for tiny shapes in floating point; rates are
  // strictly positive in the model.
  while (!(r > 0.0)) r = dist(rng);
  return r;
}

double RateMeasure::integrate_reciprocal() const {
  if (is_empty()) return 0.0;
  if (const auto* d = std::get_if<Discrete>(&repr_)) {
    double s = 0.0;
    for (const auto& a : d->atoms) s += a.weight / a.rate;
    return s;
  }
  const auto& g = std::get<GammaFamily>(repr_);
  // E[1/l] = rate / (shape - 1) for shape > 1, divergent otherwise.
  if (g.shape <= 1.0) return kInf;
  return g.total_mass * g.rate / (g.shape - 1.0);
}

double RateMeasure::integrate_reciprocal(double lo, double hi) const {
  if (is_empty() || !(hi > lo)) return 0.0;
  if (const auto* d = std::get_if<Discrete>(&repr_)) {
    double s = 0.0;
    for (const auto& a : d->atoms) {
      if (a.rate > lo && a.rate <= hi) s += a.weight / a.rate;
    }
    return s;
  }
  const auto& g = std::get<GammaFamily>(repr_);
  if (g.shape <= 1.0) {
    if (lo <= 0.0) return kInf;
    const double norm = g.total_mass * std::pow(g.rate, g.shape) / std::tgamma(g.shape);
    auto f = [&](double l) { return std::pow(l, g.shape - 2.0) * std::exp(-g.rate * l); };
    return norm * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
  }
  // l^{-1} Gamma(a, b) density = Gamma(a-1, b) density * b / (a-1).
  const double total = g.total_mass * g.rate / (g.shape - 1.0);
  auto cdf = [&](double x) {
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(g.shape - 1.0, x * g.rate);
  };
  return total * (cdf(hi) - cdf(lo));
}

double RateMeasure::survival_laplace(double t) const {
  require_nonempty("survival_laplace");
  if (t < 0.0) throw std::invalid_argument("survival_laplace: t must be nonnegative");
  if (const auto* d = std::get_if<Discrete>(&repr_)) {
    double s = 0.0;
    for (const auto& a : d->atoms) s += a.weight * std::exp(-a.rate * t);
    return s / total_mass_;
  }
  const auto& g = std::get<GammaFamily>(repr_);
  return std::pow(1.0 + t / g.rate, -g.shape);
}

double RateMeasure::dormancy_cdf(double t) const {
  require_nonempty("dormancy_cdf");
  return 1.0 - survival_laplace(t);
}

double RateMeasure::dormancy_density(double t) const {
  require_nonempty("dormancy_density");
  if (const auto* d = std::get_if<Discrete>(&repr_)) {
    double s = 0.0;
    for (const auto& a : d->atoms) s += a.weight * a.rate * std::exp(-a.rate * t);
    return s / total_mass_;
  }
  const auto& g = std::get<GammaFamily>(repr_);
  return g.shape / g.rate * std::pow(1.0 + t / g.rate, -g.shape - 1.0);
}

double RateMeasure::mean_rate() const {
  require_nonempty("mean_rate");
  if (const auto* d = std::get_if<Discrete>(&repr_)) {
    double s = 0.0;
    for (const auto& a : d->atoms) s += a.weight * a.rate;
    return s / total_mass_;
  }
  const auto& g = std::get<GammaFamily>(repr_);
  return g.shape / g.rate;
}

std::optional<double> RateMeasure::support_min() const {
  if (const auto* d = std::get_if<Discrete>(&repr_)) return d->atoms.front().rate;
  if (is_gamma()) return 0.0;
  return std::nullopt;
}

std::optional<double> RateMeasure::support_max() const {
  if (const auto* d = std::get_if<Discrete>(&repr_)) return d->atoms.back().rate;
  if (is_gamma()) return kInf;
  return std::nullopt;
}

std::string RateMeasure::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (is_empty()) {
    os << "empty";
  } else if (const auto* d = std::get_if<Discrete>(&repr_)) {
    os << "atoms[";
    for (std::size_t i = 0; i < d->atoms.size(); ++i) {
      if (i) os << ", ";
      os << "(" << d->atoms[i].rate << ", " << d->atoms[i].weight << ")";
    }
    os << "]";
  } else {
    const auto& g = std::get<GammaFamily>(repr_);
    os << "gamma(a=" << g.shape << ", b=" << g.rate << ", c=" << g.total_mass << ")";
  }
  return os.str();
}

}  // namespace seedbank
