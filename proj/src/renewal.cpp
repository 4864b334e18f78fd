#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seedbank/kernels.hpp"
#include "seedbank/oracles.hpp"

namespace seedbank {

namespace {

// P on the grid t_n = n h, n = 0..steps.
std::vector<double> solve_grid(const RateMeasure& mu, double h, std::size_t steps) {
  const auto& dot = simd::active_kernels().dot;
  const double c = mu.total_mass();
  const std::size_t n_pts = steps + 1;

  std::vector<double> k(n_pts), active(n_pts);  // dormancy density, c e^{-c t}
  for (std::size_t j = 0; j < n_pts; ++j) {
    const double t = static_cast<double>(j) * h;
    k[j] = mu.dormancy_density(t);
    active[j] = c * std::exp(-c * t);
  }
  // Stored back to front so the convolution sums are contiguous dot products:
  // rev[steps - i] holds the value at t_i.
  std::vector<double> p_rev(n_pts, 0.0), q_rev(n_pts, 0.0), p(n_pts, 0.0);
  p[0] = 1.0;
  p_rev[steps] = 1.0;
  const double k0 = k[0];
  const double denom = 1.0 - 0.25 * h * h * c * k0;
  for (std::size_t n = 1; n < n_pts; ++n) {
    // sum_{j=1}^{n-1} k_j P_{n-j}: P_{n-1}, ..., P_1 sit at rev[steps-n+1 .. steps-1].
    const double conv_p = n > 1 ? dot(k.data() + 1, p_rev.data() + (steps - n + 1), n - 1) : 0.0;
    const double conv_q = n > 1 ? dot(active.data() + 1, q_rev.data() + (steps - n + 1), n - 1) : 0.0;
    const double rq = h * (conv_p + 0.5 * k[n] * p[0]);
    const double rp = std::exp(-c * static_cast<double>(n) * h) + h * conv_q;
    const double pn = (rp + 0.5 * h * c * rq) / denom;
    const double qn = rq + 0.5 * h * k0 * pn;
    p[n] = pn;
    p_rev[steps - n] = pn;
    q_rev[steps - n] = qn;
  }
  return p;
}

std::vector<double> sample_at(const std::vector<double>& grid, double h, std::span<const double> times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const double x = t / h;
    const auto i = std::min(static_cast<std::size_t>(x), grid.size() - 1);
    if (i + 1 >= grid.size()) {
      out.push_back(grid.back());
      continue;
    }
    const double w = x - static_cast<double>(i);
    out.push_back(grid[i] + w * (grid[i + 1] - grid[i]));
  }
  return out;
}

}  // namespace

RenewalResult renewal_active_prob(const RateMeasure& mu, std::span<const double> times, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("renewal step must be positive");
  double t_max = 0.0;
  for (double t : times) {
    if (!(t >= 0.0) || std::isinf(t)) throw std::invalid_argument("times must be finite and >= 0");
    t_max = std::max(t_max, t);
  }
  RenewalResult out;
  if (mu.is_empty()) {
    out.values.assign(times.size(), 1.0);
    out.step = step;
    out.converged = true;
    return out;
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / step));
  const double h = steps > 0 ? t_max / static_cast<double>(steps) : step;
  const auto coarse = sample_at(solve_grid(mu, h, steps), h, times);
  const auto fine = sample_at(solve_grid(mu, h / 2.0, 2 * steps), h / 2.0, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.max_change = std::max(out.max_change, std::fabs(fine[i] - coarse[i]));
  }
  out.values = fine;
  out.step = h / 2.0;
  out.converged = out.max_change < 1e-4;
  return out;
}

}  // namespace seedbank
