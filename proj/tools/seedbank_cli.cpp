#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seedbank/csv.hpp"
#include "seedbank/diffusion.hpp"
#include "seedbank/engine.hpp"
#include "seedbank/experiments.hpp"
#include "seedbank/kernels.hpp"
#include "seedbank/measure_config.hpp"
#include "seedbank/oracles.hpp"
#include "seedbank/parallel.hpp"
#include "seedbank/partition.hpp"

using namespace seedbank;
using nlohmann::json;

namespace {

const char* kDefaultMeasure = R"({"type":"atoms","atoms":[[1,1]]})";

// Writes to the named file, or stdout for "" / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct TmrcaArgs {
  std::string variant = "standard";
  double alpha = 0.75;
  std::int64_t threshold = 2;
  std::string measure = kDefaultMeasure;
  std::int64_t n0 = 2;
  std::size_t m0 = 0;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  double horizon = std::numeric_limits<double>::infinity();
  std::string out;
};

void run_tmrca(const TmrcaArgs& a, unsigned workers) {
  const RateMeasure mu = parse_measure(a.measure);
  Variant v;
  switch (parse_variant_kind(a.variant)) {
    case Variant::Kind::Standard: v = Variant::standard(); break;
    case Variant::Kind::Accelerated: v = Variant::accelerated(); break;
    case Variant::Kind::Decelerated: v = Variant::decelerated(a.alpha, a.threshold); break;
  }
  const auto outcomes = parallel_map(a.reps, workers, [&](std::size_t r) {
    Rng rng = make_stream(a.seed, StreamTag::Tmrca, r);
    const auto rates = draw_initial_rates(a.m0, mu, rng);
    return sample_tmrca(a.n0, rates, v, mu, rng, RunOptions{a.horizon, false});
  });
  Output out(a.out);
  CsvWriter w(out.stream(), {"replicate", "t_mrca", "deactivations", "absorbed"});
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const SimOutcome& o = outcomes[r];
    w.field(static_cast<std::uint64_t>(r));
    if (o.t_mrca) {
      w.field(*o.t_mrca);
    } else {
      w.empty_field();
    }
    w.field(o.deactivation_count).field(o.absorbed() ? 1 : 0).end_row();
  }
}

struct PartitionArgs {
  int size = 4;
  std::string measure = kDefaultMeasure;
  double horizon = std::numeric_limits<double>::infinity();
  std::vector<double> flags;
  std::vector<double> at;
  std::string method = "graphical";
  std::uint64_t seed = 1;
  std::string out;
};

void run_partition(const PartitionArgs& a) {
  const RateMeasure mu = parse_measure(a.measure);
  Rng rng = make_stream(a.seed, StreamTag::Partition, 0);
  PartitionHistory h = [&] {
    if (a.method == "graphical") return simulate_graphical(a.size, mu, a.horizon, a.flags, rng);
    if (a.method == "direct") return simulate_direct(a.size, mu, a.horizon, a.flags, rng);
    throw std::invalid_argument("method must be graphical or direct");
  }();
  Output out(a.out);
  CsvWriter w(out.stream(), {"time", "kind", "detail"});
  w.field(0.0).field(std::string_view("initial")).field(h.initial().to_string()).end_row();
  for (const auto& e : h.events()) {
    std::string detail;
    switch (e.kind) {
      case PartitionEventKind::Merge:
        detail = std::to_string(e.label) + "<" + std::to_string(e.other);
        break;
      case PartitionEventKind::Deactivate:
        detail = std::to_string(e.label) + ":" + format_double(e.rate);
        break;
      case PartitionEventKind::Activate: detail = std::to_string(e.label); break;
    }
    w.field(e.time).field(std::string_view(to_string(e.kind))).field(detail).end_row();
  }
  if (h.tmrca()) w.field(*h.tmrca()).field(std::string_view("mrca")).empty_field().end_row();
  for (double t : a.at) {
    w.field(t).field(std::string_view("snapshot")).field(h.partition_at(t).to_string()).end_row();
  }
}

struct OracleArgs {
  std::string name;
  std::string measure = kDefaultMeasure;
  std::string measure2;
  double c = 1.0, lambda = 1.0, t = 1.0, p = 2.0 / 3.0, x = 0.5, p0 = 1.0, step = 1e-3;
  std::int64_t j = 0, m = 1, n = 2;
  std::vector<double> y, q0, times, lambdas;
  std::string out;
};

void run_oracle(const OracleArgs& a) {
  Output out(a.out);
  std::ostream& os = out.stream();
  const std::string& name = a.name;
  auto scalar = [&](double v) {
    CsvWriter w(os, {"name", "value"});
    w.field(std::string_view(name)).field(v).end_row();
  };
  if (name == "tmrca-two") {
    scalar(tmrca_two_single_bank(a.c, a.lambda));
  } else if (name == "single-bank") {
    scalar(single_bank_active_prob(a.c, a.lambda, a.t));
  } else if (name == "rw") {
    scalar(rw_hitting_time(a.p, a.j, a.m));
  } else if (name == "expected-a") {
    scalar(expected_A_exact(a.n, a.c));
  } else if (name == "pure-death") {
    scalar(pure_death_extinction_mean(a.n, parse_measure(a.measure)));
  } else if (name == "ancestral-limit") {
    const AncestralLimit lim = ancestral_active_prob_limit(parse_measure(a.measure));
    CsvWriter w(os, {"name", "value", "degenerate"});
    w.field(std::string_view(name)).field(lim.active_prob).field(lim.degenerate ? 1 : 0).end_row();
  } else if (name == "fixation-weight") {
    scalar(fixation_weight(a.x, a.y, parse_measure(a.measure)));
  } else if (name == "solve-f") {
    const RecurrenceSolution s = solve_f(parse_measure(a.measure));
    CsvWriter w(os, {"lambda", "lambda2", "f"});
    for (std::size_t i = 0; i < s.rates.size(); ++i) w.field(s.rates[i]).empty_field().field(s.f_values[i]).end_row();
    for (std::size_t i = 0; i < s.rates.size(); ++i) {
      for (std::size_t k = 0; k < s.rates.size(); ++k) {
        w.field(s.rates[i]).field(s.rates[k]).field(s.pair_values[i][k]).end_row();
      }
    }
    std::cerr << "E[T(2,0)] = " << format_double(s.tmrca_two_active())
              << ", rcond = " << format_double(s.rcond) << '\n';
  } else if (name == "renewal") {
    const RenewalResult r = renewal_active_prob(parse_measure(a.measure), a.times, a.step);
    CsvWriter w(os, {"t", "active_prob"});
    for (std::size_t i = 0; i < a.times.size(); ++i) w.field(a.times[i]).field(r.values[i]).end_row();
    std::cerr << "step = " << format_double(r.step) << ", max change on halving = "
              << format_double(r.max_change) << (r.converged ? "" : " (NOT converged)") << '\n';
  } else if (name == "ode") {
    const OdeResult r = ode_ancestral_distribution(parse_measure(a.measure), a.p0, a.q0, a.t);
    CsvWriter w(os, {"component", "value"});
    w.field(std::string_view("p")).field(r.p).end_row();
    for (std::size_t i = 0; i < r.q.size(); ++i) w.field("q" + std::to_string(i)).field(r.q[i]).end_row();
  } else if (name == "probe-f" || name == "probe-pair" || name == "probe-dominance") {
    const RateMeasure mu = parse_measure(a.measure);
    std::vector<ProbeRow> rows;
    std::vector<std::string> header;
    if (name == "probe-f") {
      rows = probe_f_monotonicity(mu, a.lambdas);
      header = {"lambda", "f", "slope"};
    } else if (name == "probe-pair") {
      rows = probe_f_pair(mu, a.lambdas);
      header = {"lambda", "lambda2", "f_pair", "slope"};
    } else {
      if (a.measure2.empty()) throw std::invalid_argument("probe-dominance needs --measure2");
      rows = probe_active_prob_dominance(mu, parse_measure(a.measure2), a.times);
      header = {"t", "active_prob", "active_prob2"};
    }
    CsvWriter w(os, header);
    for (const auto& r : rows) {
      w.field(r.a);
      if (name == "probe-f") {
        w.field(r.value).field(r.slope);
      } else if (name == "probe-pair") {
        w.field(r.b).field(r.value).field(r.slope);
      } else {
        w.field(r.value).field(r.b);
      }
      w.end_row();
    }
  } else {
    throw std::invalid_argument("unknown oracle \"" + name + "\"");
  }
}

struct DualityArgs {
  std::string measure = kDefaultMeasure;
  double x0 = 0.5;
  std::vector<double> y0{0.5};
  int n = 1;
  std::vector<int> m{1};
  double t = 1.0, dt = 1e-3;
  std::size_t paths = 10000, reps = 10000;
  std::uint64_t seed = 1;
  std::string scheme = "resample";
  std::string out;
};

void run_duality(const DualityArgs& a, unsigned workers) {
  const RateMeasure mu = parse_measure(a.measure);
  const McSummary lhs = dual_moment_lhs(mu, a.x0, a.y0, a.n, a.m, a.t, a.dt, a.paths, a.seed, workers,
                                        parse_scheme(a.scheme));
  const McSummary rhs = dual_moment_rhs(mu, a.x0, a.y0, a.n, a.m, a.t, a.reps, a.seed, workers);
  const bool pass = within_se(lhs.mean, lhs.se, rhs.mean, rhs.se, 3.0, 0.05);
  const json report{{"lhs", lhs.mean}, {"se_lhs", lhs.se}, {"rhs", rhs.mean}, {"se_rhs", rhs.se}, {"pass", pass},
                    {"scheme", a.scheme}};
  Output out(a.out);
  out.stream() << report.dump() << '\n';
}

void run_config_experiment(const std::string& kind, const std::string& path, const Overrides& ov,
                           unsigned workers) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + " is not valid JSON: " + e.what());
  }
  const json resolved = resolve_config(kind, config, ov);
  run_experiment_to_files(kind, resolved, workers);
  std::cerr << "wrote " << resolved["out"].get<std::string>() << " and its .json sidecar\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seed-bank coalescent simulator and closed-form checks"};
  app.require_subcommand(1);
  unsigned workers = 0;
  std::string isa;
  app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--isa", isa, "Kernel variant: scalar, avx2 or neon");

  TmrcaArgs ta;
  auto* tmrca = app.add_subcommand("tmrca", "Sample T_MRCA; CSV replicate,t_mrca,deactivations,absorbed");
  tmrca->add_option("--variant", ta.variant, "standard, accelerated or decelerated");
  tmrca->add_option("--alpha", ta.alpha, "Decelerated gate exponent");
  tmrca->add_option("--threshold", ta.threshold, "Decelerated gate threshold");
  tmrca->add_option("--measure", ta.measure, "Rate measure: inline JSON or file");
  tmrca->add_option("--n0", ta.n0, "Initial active blocks");
  tmrca->add_option("--m0", ta.m0, "Initial dormant blocks (rates drawn from nu)");
  tmrca->add_option("--reps", ta.reps, "Replicates");
  tmrca->add_option("--seed", ta.seed, "Master seed");
  tmrca->add_option("--horizon", ta.horizon, "Stop unabsorbed runs at this time");
  tmrca->add_option("--out", ta.out, "Output CSV (default stdout)");

  PartitionArgs pa;
  auto* partition = app.add_subcommand("partition", "Marked-partition event log; CSV time,kind,detail");
  partition->add_option("--size", pa.size, "Number of individuals K (<= 64)");
  partition->add_option("--measure", pa.measure, "Rate measure: inline JSON or file");
  partition->add_option("--horizon", pa.horizon, "Simulate up to this time (default: to the MRCA)");
  partition->add_option("--flags", pa.flags, "Initial flags, one per individual (0 = active)");
  partition->add_option("--at", pa.at, "Snapshot times");
  partition->add_option("--method", pa.method, "graphical or direct");
  partition->add_option("--seed", pa.seed, "Master seed");
  partition->add_option("--out", pa.out, "Output CSV (default stdout)");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Evaluate a closed form or small solver");
  oracle->add_option("name", oa.name,
                     "tmrca-two, single-bank, rw, expected-a, pure-death, ancestral-limit, "
                     "fixation-weight, solve-f, renewal, ode, probe-f, probe-pair, probe-dominance")
      ->required();
  oracle->add_option("--measure", oa.measure, "Rate measure: inline JSON or file");
  oracle->add_option("--measure2", oa.measure2, "Second measure (probe-dominance)");
  oracle->add_option("--c", oa.c);
  oracle->add_option("--lambda", oa.lambda);
  oracle->add_option("--t", oa.t);
  oracle->add_option("--p", oa.p);
  oracle->add_option("--j", oa.j);
  oracle->add_option("--m", oa.m);
  oracle->add_option("--n", oa.n);
  oracle->add_option("--x", oa.x);
  oracle->add_option("--y", oa.y);
  oracle->add_option("--p0", oa.p0);
  oracle->add_option("--q0", oa.q0);
  oracle->add_option("--times", oa.times);
  oracle->add_option("--lambdas", oa.lambdas);
  oracle->add_option("--step", oa.step);
  oracle->add_option("--out", oa.out, "Output CSV (default stdout)");

  DualityArgs da;
  auto* duality = app.add_subcommand("duality", "Moment duality check; JSON {lhs,se_lhs,rhs,se_rhs,pass,scheme}");
  duality->add_option("--measure", da.measure, "Discrete rate measure: inline JSON or file");
  duality->add_option("--x0", da.x0);
  duality->add_option("--y0", da.y0, "One value per atom");
  duality->add_option("--n", da.n, "Power of x");
  duality->add_option("--m", da.m, "Power of each y, one per atom");
  duality->add_option("--t", da.t);
  duality->add_option("--dt", da.dt);
  duality->add_option("--paths", da.paths, "Diffusion paths");
  duality->add_option("--reps", da.reps, "Coalescent replicates");
  duality->add_option("--seed", da.seed);
  duality->add_option("--scheme", da.scheme, "Diffusion step: resample or clamped-em");
  duality->add_option("--out", da.out, "Output JSON (default stdout)");

  std::string config_path;
  Overrides ov;
  std::vector<CLI::App*> experiments;
  for (const char* kind : {"grid", "notcdi", "an"}) {
    auto* sub = app.add_subcommand(kind, std::string("Config-driven ") + kind + " experiment");
    sub->add_option("config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", ov.seed);
    sub->add_option("--reps", ov.reps);
    sub->add_option("--out", ov.out, "Output CSV; the sidecar is <out>.json");
    experiments.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) simd::set_active_isa(simd::parse_isa(isa));
    if (*tmrca) {
      run_tmrca(ta, workers);
    } else if (*partition) {
      run_partition(pa);
    } else if (*oracle) {
      run_oracle(oa);
    } else if (*duality) {
      run_duality(da, workers);
    } else {
      for (auto* sub : experiments) {
        if (*sub) run_config_experiment(sub->get_name(), config_path, ov, workers);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
