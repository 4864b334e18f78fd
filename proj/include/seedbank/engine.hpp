#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedbank/dormant_bank.hpp"
#include "seedbank/measure.hpp"
#include "seedbank/rng.hpp"

namespace seedbank {

enum class EventKind : std::uint8_t { Coalescence, Deactivation, Activation };

const char* to_string(EventKind kind);

/// Which block-counting chain to run.
///
/// Accelerated: a dormant block that wakes up vanishes instead of rejoining
/// the active pool. Decelerated: once the total block count reaches
/// `threshold`, coalescence is allowed only while
/// active >= ceil(total^alpha).
struct Variant {
  enum class Kind : std::uint8_t { Standard, Accelerated, Decelerated };

  Kind kind = Kind::Standard;
  double alpha = 0.75;
  std::int64_t threshold = 2;

  static Variant standard() { return {}; }
  static Variant accelerated() { return {Kind::Accelerated, 0.75, 2}; }
  /// Throws std::invalid_argument unless 1/2 < alpha < 1 and threshold >= 2.
  static Variant decelerated(double alpha = 0.75, std::int64_t threshold = 2);
};

std::string to_string(Variant::Kind kind);
Variant::Kind parse_variant_kind(const std::string& name);

/// ceil(total^alpha), treating values within 1e-9 relative of an integer as
/// that integer so exact powers (16^0.75 = 8) are not pushed up by rounding.
std::int64_t gate_level(std::int64_t total, double alpha);

/// The pair (n, m) plus the clock.
struct BlockCountState {
  std::int64_t active = 0;
  DormantBank bank;
  double time = 0.0;

  std::int64_t total() const { return active + static_cast<std::int64_t>(bank.count()); }
};

struct ChannelRates {
  double coalescence = 0.0;
  double deactivation = 0.0;
  double activation = 0.0;

  double total() const { return coalescence + deactivation + activation; }
};

ChannelRates channel_rates(const BlockCountState& state, const Variant& variant,
                           const RateMeasure& mu);

/// (1, empty) for Standard/Decelerated; at most one block left for
/// Accelerated, where woken blocks vanish.
bool is_absorbed(const BlockCountState& state, const Variant& variant);

class StuckStateError : public std::runtime_error {
 public:
  StuckStateError() : std::runtime_error("stuck state: every transition rate is zero") {}
};

/// One Gillespie event. Draws the Exp(total) holding time, picks the channel
/// with a single uniform against the cumulative (coalescence, deactivation,
/// activation) rates, then resolves the channel (nu draw or bank draw).
/// Advances state.time. Throws StuckStateError when all rates vanish.
EventKind step(BlockCountState& state, const Variant& variant, const RateMeasure& mu, Rng& rng);

struct TraceEvent {
  double time;
  EventKind kind;
  std::int64_t active;
  std::size_t dormant;
};

struct SimOutcome {
  /// Unset when the horizon came first.
  std::optional<double> t_mrca;
  std::uint64_t deactivation_count = 0;
  std::uint64_t event_count = 0;
  std::vector<TraceEvent> trace;

  bool absorbed() const { return t_mrca.has_value(); }
};

struct RunOptions {
  double horizon = std::numeric_limits<double>::infinity();
  bool keep_trace = false;
};

/// Runs events until `stop(state)` holds or the next event would fall past
/// the horizon (then state.time is set to the horizon and the state is the
/// one in force at that instant). Returns the outcome with t_mrca set to the
/// stopping time when `stop` fired.
template <class StopFn>
SimOutcome run_until(BlockCountState& state, const Variant& variant, const RateMeasure& mu,
                     Rng& rng, StopFn&& stop, const RunOptions& options = {});

/// Runs to absorption (see is_absorbed) from the given state.
SimOutcome run_to_absorption(BlockCountState& state, const Variant& variant,
                             const RateMeasure& mu, Rng& rng, const RunOptions& options = {});

/// T_MRCA from n0 active blocks and dormant blocks with the given rates.
SimOutcome sample_tmrca(std::int64_t n0, const std::vector<double>& dormant_rates,
                        const Variant& variant, const RateMeasure& mu, Rng& rng,
                        const RunOptions& options = {});

/// m i.i.d. draws from nu: the standing assumption on initial dormant rates.
std::vector<double> draw_initial_rates(std::size_t m, const RateMeasure& mu, Rng& rng);

/// The deactivation statistic A from (n, empty): the number of first-passage
/// down-steps of the active count that are deactivations, counted until the
/// running minimum of the active count reaches `target_active`. Given a
/// down-step from level j its type does not depend on the bank, so A has the
/// same law under Standard and Accelerated.
std::uint64_t measure_A(std::int64_t n, const Variant& variant, const RateMeasure& mu, Rng& rng,
                        std::int64_t target_active = 1);

/// sum_{j=2}^{n} 2c / (j + 2c - 1). Requires n >= 1, c >= 0.
double expected_A_exact(std::int64_t n, double c);

/// Mean extinction time of a pure-death process of N independent lifetimes
/// with survival function survival_laplace: sum_{i=1}^{N} int S(t)^i dt.
/// Gamma: term i is rate / (shape i - 1), +inf when shape i <= 1.
double pure_death_extinction_mean(std::int64_t n, const RateMeasure& mu);

/// Decelerated threshold that makes the upper-bound argument go through for
/// a given slack eps (rates bounded in [lam_lo, lam_hi]). Exposed as a
/// helper; never used as a default.
std::int64_t decelerated_threshold(double c, double lam_lo, double lam_hi, double alpha,
                                   double eps);

// ---------------------------------------------------------------------------

/// Applies one event with precomputed rates and holding time.
EventKind step(BlockCountState& state, const Variant& variant, const RateMeasure& mu, Rng& rng,
               const ChannelRates& rates, double hold);

template <class StopFn>
SimOutcome run_until(BlockCountState& state, const Variant& variant, const RateMeasure& mu,
                     Rng& rng, StopFn&& stop, const RunOptions& options) {
  SimOutcome out;
  while (!stop(state)) {
    const ChannelRates rates = channel_rates(state, variant, mu);
    const double total = rates.total();
    if (!(total > 0.0)) throw StuckStateError();
    const double hold = exponential(rng, total);
    if (state.time + hold > options.horizon) {
      state.time = options.horizon;
      return out;
    }
    const EventKind kind = step(state, variant, mu, rng, rates, hold);
    ++out.event_count;
    if (kind == EventKind::Deactivation) ++out.deactivation_count;
    if (options.keep_trace) {
      out.trace.push_back({state.time, kind, state.active, state.bank.count()});
    }
  }
  out.t_mrca = state.time;
  return out;
}


}  // namespace seedbank
