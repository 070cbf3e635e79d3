#ifndef RELOPT_SOLVERS_HPP_
#define RELOPT_SOLVERS_HPP_

// Threshold descent (TDM) and simple descent (SDM) for relative optimization.
//
// Both methods walk a feasible trajectory z^0, z^1, ... with z^{k+1} in D(z^k).
// TDM accepts a move only if f(z^k, z^{k+1}) < -delta_l and, when no such move
// is found, records the stationary point x^l = z^k and shrinks the threshold.
// SDM accepts any move with f < 0.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "relopt/core.hpp"
#include "relopt/diagnostics.hpp"

namespace relopt {

/// delta_l = delta0 * decay^(l - 1), l = 1, 2, ...
struct threshold_schedule {
  double delta0 = 0.1;
  double decay = 0.5;
  double delta_min = 1e-6;

  void validate() const {
    if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw std::invalid_argument("schedule: delta0 must be positive");
    if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("schedule: decay must lie in (0, 1)");
    if (!(delta_min >= 0.0)) throw std::invalid_argument("schedule: delta_min must be non-negative");
    if (!(delta_min < delta0)) throw std::invalid_argument("schedule: delta_min must be below delta0");
  }

  double at_level(std::size_t level) const {
    return delta0 * std::pow(decay, static_cast<double>(level) - 1.0);
  }
};

enum class search_mode { first_improving, best_of_batch };

struct search_policy {
  search_mode mode = search_mode::first_improving;
  std::size_t samples_per_round = 64;
  std::size_t rounds_before_stall = 4;
  // After the random rounds fail, sweep this many points of the model's
  // deterministic grid over D(x) (one-dimensional models only). 0 disables.
  std::size_t grid_sweep_points = 2048;

  void validate() const {
    if (samples_per_round == 0) throw std::invalid_argument("policy: samples per round must be at least 1");
    if (rounds_before_stall == 0) throw std::invalid_argument("policy: rounds before stall must be at least 1");
  }
};

struct solve_budget {
  std::size_t max_moves = 100'000;
  std::size_t max_evaluations = 10'000'000;
};

struct search_stats {
  std::size_t evaluations = 0;
  std::size_t feasibility_violations = 0;
  // The last failed search covered all of D(x).
  bool exhaustive = false;
  bool budget_hit = false;
};

/// Replays a fixed candidate list. Each search consumes points in order until
/// one passes the f-test; infeasible points are skipped and counted.
class scripted_candidates {
 public:
  explicit scripted_candidates(std::vector<state_point> sequence) : sequence_(std::move(sequence)) {
    if (sequence_.empty()) throw std::invalid_argument("scripted_candidates: sequence must be nonempty");
  }

  bool exhausted() const { return cursor_ == sequence_.size(); }
  std::size_t consumed() const { return cursor_; }
  std::size_t feasibility_violations() const { return feasibility_violations_; }

  std::optional<state_point> next() {
    if (exhausted()) return std::nullopt;
    return sequence_[cursor_++];
  }
  void note_infeasible() { ++feasibility_violations_; }

 private:
  std::vector<state_point> sequence_;
  std::size_t cursor_ = 0;
  std::size_t feasibility_violations_ = 0;
};

namespace detail {

inline constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();

// f(x, .) with phi(x, x) evaluated once.
class expense_probe {
 public:
  expense_probe(const relative_problem& problem, const state_point& x, std::size_t step)
      : problem_(problem), x_(x), step_(step), phi_xx_(problem.utility_estimate(x, x, step)) {}

  double operator()(const state_point& y) const {
    return phi_xx_ + problem_.move_cost(x_, y) - problem_.utility_estimate(x_, y, step_);
  }

 private:
  const relative_problem& problem_;
  const state_point& x_;
  std::size_t step_;
  double phi_xx_;
};

// Scans one batch in draw order. Returns the first passer (first_improving)
// or the batch minimizer of f among passers (best_of_batch).
inline std::optional<state_point> scan_batch(const std::vector<state_point>& batch, const state_point& x,
                                             double delta, search_mode mode, const expense_probe& f,
                                             search_stats& stats, std::size_t max_evaluations) {
  std::optional<state_point> best;
  double best_f = 0.0;
  for (const auto& y : batch) {
    if (y == x) continue;
    if (stats.evaluations >= max_evaluations) {
      stats.budget_hit = true;
      return best;
    }
    ++stats.evaluations;
    const double fy = f(y);
    if (fy < -delta) {
      if (mode == search_mode::first_improving) return y;
      if (!best || fy < best_f) {
        best = y;
        best_f = fy;
      }
    }
  }
  return best;
}

}  // namespace detail

/// Looks for y in D(x) with f(x, y) < -delta, strictly. Uses the full
/// enumeration of D(x) when the model has one; otherwise draws
/// `samples_per_round` candidates for up to `rounds_before_stall` rounds and
/// then sweeps the model grid. Never returns x itself.
inline std::optional<state_point> find_improving(const relative_problem& problem, const state_point& x, double delta,
                                                 const search_policy& policy, rng_type& rng, search_stats& stats,
                                                 std::size_t step = 0,
                                                 std::size_t max_evaluations = detail::unlimited) {
  require_state(problem, x);
  if (!(delta >= 0.0)) throw std::invalid_argument("find_improving: threshold must be non-negative");
  policy.validate();
  stats.exhaustive = false;
  stats.budget_hit = false;

  const detail::expense_probe f(problem, x, step);

  if (auto all = problem.enumerate_feasible(x)) {
    auto y = detail::scan_batch(*all, x, delta, policy.mode, f, stats, max_evaluations);
    if (!y && !stats.budget_hit) stats.exhaustive = true;
    return y;
  }

  for (std::size_t round = 0; round < policy.rounds_before_stall; ++round) {
    auto batch = problem.sample_feasible(x, rng, policy.samples_per_round);
    auto y = detail::scan_batch(batch, x, delta, policy.mode, f, stats, max_evaluations);
    if (y || stats.budget_hit) return y;
  }
  if (policy.grid_sweep_points > 0) {
    auto grid = problem.feasible_grid(x, policy.grid_sweep_points);
    return detail::scan_batch(grid, x, delta, policy.mode, f, stats, max_evaluations);
  }
  return std::nullopt;
}

/// Scripted variant: consumes the script, applying the same f-test.
inline std::optional<state_point> find_improving(const relative_problem& problem, const state_point& x, double delta,
                                                 scripted_candidates& script, rng_type& /*rng*/, search_stats& stats,
                                                 std::size_t step = 0,
                                                 std::size_t max_evaluations = detail::unlimited) {
  require_state(problem, x);
  if (!(delta >= 0.0)) throw std::invalid_argument("find_improving: threshold must be non-negative");
  stats.exhaustive = false;
  stats.budget_hit = false;

  const detail::expense_probe f(problem, x, step);
  while (auto y = script.next()) {
    if (y->dimension() != problem.dimension() || !y->is_finite() || !problem.state_contains(*y) ||
        !problem.feasible_contains(x, *y)) {
      script.note_infeasible();
      ++stats.feasibility_violations;
      continue;
    }
    if (*y == x) continue;
    if (stats.evaluations >= max_evaluations) {
      stats.budget_hit = true;
      return std::nullopt;
    }
    ++stats.evaluations;
    if (f(*y) < -delta) return y;
  }
  return std::nullopt;
}

struct solve_report {
  trajectory path;
  state_point final_state;
  double final_threshold = 0.0;
  double residual_estimate = 0.0;
  assumption_report assumptions;
  std::uint64_t rng_seed = 0;
  std::size_t evaluations_used = 0;
  std::size_t feasibility_violations = 0;
};

inline constexpr std::size_t default_residual_samples = 1024;

namespace detail {

// The residual gets its own stream so that it never perturbs the trajectory.
inline rng_type residual_rng(std::uint64_t seed) { return rng_type(seed ^ 0x9e3779b97f4a7c15ULL); }

template <class Search>
void require_search(const Search& search) {
  if constexpr (std::is_same_v<std::decay_t<Search>, search_policy>) search.validate();
}

}  // namespace detail

/// Threshold descent. Stops with ThresholdExhausted once a search fails at a
/// level whose threshold is below delta_min, or with BudgetExhausted.
template <class Search>
solve_report tdm_solve(const relative_problem& problem, const state_point& x0, const threshold_schedule& schedule,
                       Search&& search, const solve_budget& budget, std::uint64_t seed,
                       std::size_t residual_samples = default_residual_samples) {
  require_state(problem, x0);
  schedule.validate();
  detail::require_search(search);

  solve_report report;
  report.rng_seed = seed;
  report.path.initial = x0;
  rng_type rng(seed);
  search_stats stats;

  state_point z = x0;
  std::size_t level = 1;
  double delta = schedule.at_level(level);
  for (;;) {
    const std::size_t k = report.path.moves.size();
    if (k >= budget.max_moves) {
      report.path.termination = termination_reason::budget_exhausted;
      break;
    }
    auto y = find_improving(problem, z, delta, search, rng, stats, k, budget.max_evaluations);
    if (stats.budget_hit) {
      report.path.termination = termination_reason::budget_exhausted;
      break;
    }
    if (y) {
      auto rec = make_move_record(problem, k, z, *y, delta);
      if (!(rec.f_value < -delta)) throw model_fault(problem.name() + ": estimate changed between evaluations");
      report.assumptions.update(rec);
      report.path.append(std::move(rec));
      z = std::move(*y);
      continue;
    }
    report.path.stationary_points.push_back({level, z, delta});
    if (delta < schedule.delta_min) {
      report.path.termination = termination_reason::threshold_exhausted;
      break;
    }
    ++level;
    delta = schedule.at_level(level);
  }

  report.final_state = report.path.termination == termination_reason::budget_exhausted ||
                               report.path.stationary_points.empty()
                           ? z
                           : report.path.stationary_points.back().point;
  report.final_threshold = delta;
  report.evaluations_used = stats.evaluations;
  report.feasibility_violations = stats.feasibility_violations;
  auto rrng = detail::residual_rng(seed);
  report.residual_estimate =
      stationarity_residual(problem, report.final_state, residual_samples, rrng, report.path.moves.size());
  return report;
}

/// Simple descent: accept any candidate with f < 0. A failed search over a
/// full enumeration of D(x) stops with DiscreteStop; a failed sampled or
/// scripted search stops with ThresholdExhausted.
template <class Search>
solve_report sdm_solve(const relative_problem& problem, const state_point& x0, Search&& search,
                       const solve_budget& budget, std::uint64_t seed,
                       std::size_t residual_samples = default_residual_samples) {
  require_state(problem, x0);
  detail::require_search(search);

  solve_report report;
  report.rng_seed = seed;
  report.path.initial = x0;
  rng_type rng(seed);
  search_stats stats;

  state_point z = x0;
  for (;;) {
    const std::size_t k = report.path.moves.size();
    if (k >= budget.max_moves) {
      report.path.termination = termination_reason::budget_exhausted;
      break;
    }
    auto y = find_improving(problem, z, 0.0, search, rng, stats, k, budget.max_evaluations);
    if (stats.budget_hit) {
      report.path.termination = termination_reason::budget_exhausted;
      break;
    }
    if (!y) {
      report.path.termination =
          stats.exhaustive ? termination_reason::discrete_stop : termination_reason::threshold_exhausted;
      break;
    }
    auto rec = make_move_record(problem, k, z, *y, 0.0);
    if (!(rec.f_value < 0.0)) throw model_fault(problem.name() + ": estimate changed between evaluations");
    report.assumptions.update(rec);
    report.path.append(std::move(rec));
    z = std::move(*y);
  }

  report.final_state = z;
  report.final_threshold = 0.0;
  report.evaluations_used = stats.evaluations;
  report.feasibility_violations = stats.feasibility_violations;
  auto rrng = detail::residual_rng(seed);
  report.residual_estimate =
      stationarity_residual(problem, report.final_state, residual_samples, rrng, report.path.moves.size());
  return report;
}

}  // namespace relopt

#endif  // RELOPT_SOLVERS_HPP_
