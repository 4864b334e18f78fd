#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seedbank/measure.hpp"
#include "seedbank/stats.hpp"

namespace seedbank {

struct GridPoint {
  std::int64_t n;
  std::int64_t m_size;
};

struct BoundsRow {
  std::int64_t n;
  std::int64_t m_size;
  McSummary tmrca;
  double ratio;      // mean / log(log n + m_size / (2c))
  double lower_ref;  // 1 / max support (discrete) or b / a (Gamma)
  std::optional<double> upper_ref;  // 2 / min support; discrete only
};

struct BoundsReport {
  std::vector<BoundsRow> rows;
};

/// log(log n + m / (2c)); throws unless n >= 3, m >= 1, c > 0 and the
/// inner value exceeds e.
double bounds_log_scale(std::int64_t n, std::int64_t m_size, double c);

/// E[T_MRCA] on each grid point from (n, m_size dormant blocks with
/// i.i.d. nu rates) under the Standard chain. With `fixed_rate` every
/// initial dormant block gets that rate instead.
BoundsReport tmrca_grid(const RateMeasure& mu, const std::vector<GridPoint>& schedule,
                        std::size_t reps, std::uint64_t seed, unsigned workers = 0,
                        std::optional<double> fixed_rate = std::nullopt);

struct NotCdiRow {
  std::int64_t n;
  double t;
  McSummary total_blocks;
};

/// Total block count at time t from (n, empty).
std::vector<NotCdiRow> not_cdi_probe(const RateMeasure& mu, const std::vector<std::int64_t>& n_grid,
                                     double t, std::size_t reps, std::uint64_t seed,
                                     unsigned workers = 0);

struct AnReport {
  std::int64_t n;
  double c;
  McSummary a;
  double exact;
  double bracket_lo;  // 2c (log(n + 2c) - log(1 + 2c))
  double bracket_hi;  // 2c (log(n + 2c - 1) - log(2c))
};

AnReport a_n_experiment(const RateMeasure& mu, std::int64_t n, std::size_t reps, std::uint64_t seed,
                        unsigned workers = 0);

// Config-driven runs for the command line. Each config is a JSON object
// with "measure", "reps", "seed", "out" plus experiment fields:
//   grid:   "schedule": [[n, m_size], ...], optional "fixed_rate"
//   notcdi: "n_grid": [n, ...], "t"
//   an:     "n"
// resolve_* fills defaults and validates; run_* writes CSV to `csv` and
// returns the resolved config for the sidecar.

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out;
};

nlohmann::json resolve_config(const std::string& kind, nlohmann::json config,
                              const Overrides& overrides);

void run_grid(const nlohmann::json& resolved, std::ostream& csv, unsigned workers = 0);
void run_notcdi(const nlohmann::json& resolved, std::ostream& csv, unsigned workers = 0);
void run_an(const nlohmann::json& resolved, std::ostream& csv, unsigned workers = 0);

/// Runs the experiment named `kind`, writes the CSV to resolved["out"] and
/// the resolved config to resolved["out"] + ".json".
void run_experiment_to_files(const std::string& kind, const nlohmann::json& resolved,
                             unsigned workers = 0);

}  // namespace seedbank
