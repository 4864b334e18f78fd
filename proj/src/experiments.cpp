#include "seedbank/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "seedbank/csv.hpp"
#include "seedbank/engine.hpp"
#include "seedbank/measure_config.hpp"
#include "seedbank/parallel.hpp"

namespace seedbank {

double bounds_log_scale(std::int64_t n, std::int64_t m_size, double c) {
  if (n < 3 || m_size < 1) throw std::invalid_argument("grid points need n >= 3 and m_size >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("grid needs c > 0");
  const double inner = std::log(static_cast<double>(n)) + static_cast<double>(m_size) / (2.0 * c);
  if (!(inner > std::numbers::e)) {
    throw std::invalid_argument("log n + m/(2c) must exceed e");
  }
  return std::log(inner);
}

BoundsReport tmrca_grid(const RateMeasure& mu, const std::vector<GridPoint>& schedule,
                        std::size_t reps, std::uint64_t seed, unsigned workers,
                        std::optional<double> fixed_rate) {
  if (mu.is_empty()) throw std::invalid_argument("grid needs c > 0");
  for (const auto& g : schedule) bounds_log_scale(g.n, g.m_size, mu.total_mass());
  if (fixed_rate && !(*fixed_rate > 0.0)) throw std::invalid_argument("fixed_rate must be positive");

  double lower_ref = 0.0;
  std::optional<double> upper_ref;
  if (mu.is_gamma()) {
    lower_ref = mu.gamma_params().rate / mu.gamma_params().shape;
  } else {
    lower_ref = 1.0 / *mu.support_max();
    upper_ref = 2.0 / *mu.support_min();
  }

  BoundsReport report;
  const Variant standard = Variant::standard();
  for (std::size_t g = 0; g < schedule.size(); ++g) {
    const GridPoint point = schedule[g];
    const auto times = parallel_map(reps, workers, [&](std::size_t r) {
      Rng rng = make_stream(seed, StreamTag::Grid, r, g);
      std::vector<double> rates =
          fixed_rate ? std::vector<double>(static_cast<std::size_t>(point.m_size), *fixed_rate)
                     : draw_initial_rates(static_cast<std::size_t>(point.m_size), mu, rng);
      return *sample_tmrca(point.n, rates, standard, mu, rng).t_mrca;
    });
    BoundsRow row{point.n, point.m_size, summarize(times), 0.0, lower_ref, upper_ref};
    row.ratio = row.tmrca.mean / bounds_log_scale(point.n, point.m_size, mu.total_mass());
    report.rows.push_back(row);
  }
  return report;
}

std::vector<NotCdiRow> not_cdi_probe(const RateMeasure& mu, const std::vector<std::int64_t>& n_grid,
                                     double t, std::size_t reps, std::uint64_t seed,
                                     unsigned workers) {
  if (!(t >= 0.0) || std::isinf(t)) throw std::invalid_argument("t must be finite and >= 0");
  std::vector<NotCdiRow> rows;
  const Variant standard = Variant::standard();
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::int64_t n = n_grid[g];
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const auto totals = parallel_map(reps, workers, [&](std::size_t r) {
      Rng rng = make_stream(seed, StreamTag::NotCdi, r, g);
      BlockCountState state{n, DormantBank{}, 0.0};
      run_until(
          state, standard, mu, rng,
          [&](const BlockCountState& s) { return !(channel_rates(s, standard, mu).total() > 0.0); },
          RunOptions{t, false});
      return static_cast<double>(state.total());
    });
    rows.push_back({n, t, summarize(totals)});
  }
  return rows;
}

AnReport a_n_experiment(const RateMeasure& mu, std::int64_t n, std::size_t reps, std::uint64_t seed,
                        unsigned workers) {
  if (n < 2) throw std::invalid_argument("a_n_experiment needs n >= 2");
  const double c = mu.total_mass();
  const Variant standard = Variant::standard();
  const auto counts = parallel_map(reps, workers, [&](std::size_t r) {
    Rng rng = make_stream(seed, StreamTag::DeactivationCount, r);
    return static_cast<double>(measure_A(n, standard, mu, rng));
  });
  AnReport out{n, c, summarize(counts), expected_A_exact(n, c), 0.0, 0.0};
  if (c > 0.0) {
    const auto nd = static_cast<double>(n);
    out.bracket_lo = 2.0 * c * (std::log(nd + 2.0 * c) - std::log(1.0 + 2.0 * c));
    out.bracket_hi = 2.0 * c * (std::log(nd + 2.0 * c - 1.0) - std::log(2.0 * c));
  }
  return out;
}

namespace {

using nlohmann::json;

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("config is missing \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config field \"") + key + "\" has the wrong type");
  }
}

std::size_t default_reps(const std::string& kind) {
  if (kind == "an") return 10000;
  return 1000;
}

}  // namespace

json resolve_config(const std::string& kind, json config, const Overrides& overrides) {
  if (kind != "grid" && kind != "notcdi" && kind != "an") {
    throw std::invalid_argument("unknown experiment \"" + kind + "\"");
  }
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
  json out;
  out["experiment"] = kind;
  out["measure"] = measure_to_json(measure_from_json(required<json>(config, "measure")));
  out["seed"] = overrides.seed ? *overrides.seed : config.value("seed", std::uint64_t{1});
  out["reps"] = overrides.reps ? *overrides.reps : config.value("reps", default_reps(kind));
  out["out"] = overrides.out ? *overrides.out : config.value("out", kind + ".csv");
  if (out["reps"].get<std::size_t>() < 2) throw std::invalid_argument("reps must be >= 2");

  if (kind == "grid") {
    json schedule = json::array();
    for (const auto& p : required<json>(config, "schedule")) {
      if (!p.is_array() || p.size() != 2) throw std::invalid_argument("schedule entries are [n, m_size]");
      schedule.push_back({p[0].get<std::int64_t>(), p[1].get<std::int64_t>()});
    }
    if (schedule.empty()) throw std::invalid_argument("schedule is empty");
    out["schedule"] = schedule;
    if (config.contains("fixed_rate") && !config["fixed_rate"].is_null()) {
      out["fixed_rate"] = required<double>(config, "fixed_rate");
    }
  } else if (kind == "notcdi") {
    out["n_grid"] = required<std::vector<std::int64_t>>(config, "n_grid");
    out["t"] = required<double>(config, "t");
  } else {
    out["n"] = required<std::int64_t>(config, "n");
  }
  return out;
}

void run_grid(const json& cfg, std::ostream& csv, unsigned workers) {
  const RateMeasure mu = measure_from_json(cfg.at("measure"));
  std::vector<GridPoint> schedule;
  for (const auto& p : cfg.at("schedule")) schedule.push_back({p[0].get<std::int64_t>(), p[1].get<std::int64_t>()});
  std::optional<double> fixed;
  if (cfg.contains("fixed_rate")) fixed = cfg["fixed_rate"].get<double>();
  const BoundsReport report = tmrca_grid(mu, schedule, cfg.at("reps").get<std::size_t>(),
                                         cfg.at("seed").get<std::uint64_t>(), workers, fixed);
  CsvWriter w(csv, {"n", "m_size", "reps", "mean_tmrca", "se", "ratio", "lower_ref", "upper_ref"});
  for (const auto& row : report.rows) {
    w.field(row.n).field(row.m_size).field(row.tmrca.reps).field(row.tmrca.mean).field(row.tmrca.se);
    w.field(row.ratio).field(row.lower_ref);
    if (row.upper_ref) {
      w.field(*row.upper_ref);
    } else {
      w.empty_field();
    }
    w.end_row();
  }
}

void run_notcdi(const json& cfg, std::ostream& csv, unsigned workers) {
  const RateMeasure mu = measure_from_json(cfg.at("measure"));
  const auto rows = not_cdi_probe(mu, cfg.at("n_grid").get<std::vector<std::int64_t>>(),
                                  cfg.at("t").get<double>(), cfg.at("reps").get<std::size_t>(),
                                  cfg.at("seed").get<std::uint64_t>(), workers);
  CsvWriter w(csv, {"n", "t", "reps", "mean_total_blocks", "se"});
  for (const auto& row : rows) {
    w.field(row.n).field(row.t).field(row.total_blocks.reps).field(row.total_blocks.mean);
    w.field(row.total_blocks.se).end_row();
  }
}

void run_an(const json& cfg, std::ostream& csv, unsigned workers) {
  const RateMeasure mu = measure_from_json(cfg.at("measure"));
  const AnReport r = a_n_experiment(mu, cfg.at("n").get<std::int64_t>(), cfg.at("reps").get<std::size_t>(),
                                    cfg.at("seed").get<std::uint64_t>(), workers);
  CsvWriter w(csv, {"n", "c", "reps", "mean_a", "se", "exact", "bracket_lo", "bracket_hi"});
  w.field(r.n).field(r.c).field(r.a.reps).field(r.a.mean).field(r.a.se).field(r.exact);
  w.field(r.bracket_lo).field(r.bracket_hi).end_row();
}

void run_experiment_to_files(const std::string& kind, const json& resolved, unsigned workers) {
  const std::string path = resolved.at("out").get<std::string>();
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot open " + path + " for writing");
  if (kind == "grid") {
    run_grid(resolved, csv, workers);
  } else if (kind == "notcdi") {
    run_notcdi(resolved, csv, workers);
  } else if (kind == "an") {
    run_an(resolved, csv, workers);
  } else {
    throw std::invalid_argument("unknown experiment \"" + kind + "\"");
  }
  std::ofstream sidecar(path + ".json");
  if (!sidecar) throw std::runtime_error("cannot open " + path + ".json for writing");
  sidecar << resolved.dump(2) << '\n';
}

}  // namespace seedbank
