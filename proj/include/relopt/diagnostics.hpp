#ifndef RELOPT_DIAGNOSTICS_HPP_
#define RELOPT_DIAGNOSTICS_HPP_

// Solution-quality and assumption monitors. Nothing here changes a run; every
// function either reads a trajectory or samples the model.

#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "relopt/core.hpp"

namespace relopt {

inline constexpr double assumption_tolerance = 1e-9;
inline constexpr std::size_t residual_grid_points = 2048;
inline constexpr std::size_t default_tail_window = 20;

/// r(x) = [sup_{y in D(x)} -f(x, y)]_+ over the enumeration of D(x) when the
/// model has one, otherwise over `n_samples` draws plus the model's grid.
/// `step` is forwarded to step-dependent estimates.
inline double stationarity_residual(const relative_problem& problem, const state_point& x, std::size_t n_samples,
                                    rng_type& rng, std::size_t step = 0) {
  require_state(problem, x);
  if (n_samples == 0) throw std::invalid_argument("stationarity_residual: n_samples must be positive");

  const double phi_xx = problem.utility_estimate(x, x, step);
  double worst = 0.0;
  auto scan = [&](const std::vector<state_point>& candidates) {
    for (const auto& y : candidates) {
      if (y == x) continue;
      double f = phi_xx + problem.move_cost(x, y) - problem.utility_estimate(x, y, step);
      worst = std::max(worst, -f);
    }
  };

  if (auto all = problem.enumerate_feasible(x)) {
    scan(*all);
    return worst;
  }
  scan(problem.sample_feasible(x, rng, n_samples));
  scan(problem.feasible_grid(x, residual_grid_points));
  return worst;
}

/// Running statistics for the A4/A4''/A5/B1/C3 families along one trajectory.
class assumption_report {
 public:
  explicit assumption_report(std::size_t window = default_tail_window) : window_(window) {
    if (window_ == 0) throw std::invalid_argument("assumption_report: window must be positive");
  }

  double sum_b_minus_c_pos() const { return sum_b_minus_c_pos_; }
  double sum_b() const { return sum_b_; }
  /// Max of [b - c]_+ over the last W moves (0 before any move).
  double tail_max_b_minus_c() const { return tail_max(tail_b_minus_c_); }
  /// Max of b over the last W moves.
  double tail_max_b() const { return tail_max(tail_b_); }
  std::size_t a4pp_violations() const { return a4pp_violations_; }
  /// Min c over moves with from != to; +inf when there were none.
  double b1_min_offdiag_cost() const { return b1_min_offdiag_cost_; }
  std::size_t triangle_violations() const { return triangle_violations_; }
  std::size_t window() const { return window_; }
  std::size_t moves_seen() const { return moves_seen_; }

  void set_triangle_violations(std::size_t n) { triangle_violations_ = n; }

  void update(const move_record& move) {
    if (last_to_ && !(*last_to_ == move.from)) {
      throw std::logic_error("assumption_report: move " + std::to_string(move.step) +
                             " does not continue the previous move");
    }
    last_to_ = move.to;
    ++moves_seen_;

    const double bc = std::max(move.b_value - move.c_value, 0.0);
    sum_b_minus_c_pos_ += bc;
    sum_b_ += move.b_value;
    push(tail_b_minus_c_, bc);
    push(tail_b_, move.b_value);
    if (move.b_value > move.c_value + assumption_tolerance) ++a4pp_violations_;
    if (!(move.from == move.to)) b1_min_offdiag_cost_ = std::min(b1_min_offdiag_cost_, move.c_value);
  }

 private:
  void push(std::deque<double>& q, double v) const {
    q.push_back(v);
    if (q.size() > window_) q.pop_front();
  }
  static double tail_max(const std::deque<double>& q) {
    double m = 0.0;
    for (double v : q) m = std::max(m, v);
    return m;
  }

  std::size_t window_;
  std::size_t moves_seen_ = 0;
  double sum_b_minus_c_pos_ = 0.0;
  double sum_b_ = 0.0;
  std::size_t a4pp_violations_ = 0;
  double b1_min_offdiag_cost_ = std::numeric_limits<double>::infinity();
  std::size_t triangle_violations_ = 0;
  std::deque<double> tail_b_minus_c_;
  std::deque<double> tail_b_;
  std::optional<state_point> last_to_;
};

inline assumption_report update_assumption_report(assumption_report report, const move_record& move) {
  report.update(move);
  return report;
}

struct b1_result {
  double min_cost = std::numeric_limits<double>::infinity();
  bool holds = true;
  std::size_t pairs_checked = 0;
  bool exhaustive = false;
};

/// Minimum off-diagonal move cost over X: exact for countable models with at
/// most `pairs` distinct pairs, otherwise over `pairs` sampled pairs. Without
/// a `delta`, holds means the observed minimum is positive.
inline b1_result check_b1_conditions(const relative_problem& problem, std::size_t pairs, rng_type& rng,
                                     std::optional<double> delta = std::nullopt) {
  b1_result r;
  auto states = problem.enumerate_states();
  if (states && states->size() * states->size() <= std::max<std::size_t>(pairs, 1) * 4) {
    r.exhaustive = true;
    for (const auto& x : *states) {
      for (const auto& y : *states) {
        if (x == y) continue;
        r.min_cost = std::min(r.min_cost, problem.move_cost(x, y));
        ++r.pairs_checked;
      }
    }
  } else {
    for (std::size_t i = 0; i < pairs; ++i) {
      auto x = problem.sample_state(rng);
      auto y = problem.sample_state(rng);
      if (x == y) continue;
      r.min_cost = std::min(r.min_cost, problem.move_cost(x, y));
      ++r.pairs_checked;
    }
  }
  if (r.pairs_checked == 0) {
    r.holds = true;
  } else if (delta) {
    r.holds = r.min_cost >= *delta;
  } else {
    r.holds = r.min_cost > 0.0;
  }
  return r;
}

/// Number of sampled triples (x, z, y) in X with c(x,z) + c(z,y) < c(x,y) - tol.
inline std::size_t check_triangle_inequality(const relative_problem& problem, std::size_t triples, rng_type& rng,
                                             double tol = assumption_tolerance) {
  if (triples == 0) throw std::invalid_argument("check_triangle_inequality: triples must be positive");
  std::size_t violations = 0;
  for (std::size_t i = 0; i < triples; ++i) {
    auto x = problem.sample_state(rng);
    auto z = problem.sample_state(rng);
    auto y = problem.sample_state(rng);
    if (problem.move_cost(x, z) + problem.move_cost(z, y) < problem.move_cost(x, y) - tol) ++violations;
  }
  return violations;
}

struct a4pp_result {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double max_b_minus_c = -std::numeric_limits<double>::infinity();
};

/// Samples pairs x in X, y in D(x) and counts b(x, y) > c(x, y) + tol.
inline a4pp_result check_overestimate_bound(const relative_problem& problem, std::size_t pairs, rng_type& rng,
                                            double tol = assumption_tolerance) {
  a4pp_result r;
  while (r.pairs < pairs) {
    auto x = problem.sample_state(rng);
    for (const auto& y : problem.sample_feasible(x, rng, std::min<std::size_t>(8, pairs - r.pairs))) {
      const double b = std::max(problem.utility_estimate(x, y) - problem.utility_estimate(y, y), 0.0);
      const double c = problem.move_cost(x, y);
      r.max_b_minus_c = std::max(r.max_b_minus_c, b - c);
      if (b > c + tol) ++r.violations;
      ++r.pairs;
    }
  }
  return r;
}

/// Optional C3 lower bound: counts sampled pairs with theta(d(x, y)) > c(x, y) + tol.
template <class Theta>
std::size_t check_cost_dominates_metric(const relative_problem& problem, Theta&& theta, std::size_t pairs,
                                        rng_type& rng, double tol = assumption_tolerance) {
  std::size_t violations = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    auto x = problem.sample_state(rng);
    auto y = problem.sample_state(rng);
    if (theta(problem.metric(x, y)) > problem.move_cost(x, y) + tol) ++violations;
  }
  return violations;
}

enum class violation_kind { threshold_rule, descent_relation, cumulative_estimate, threshold_order, chain, expense_identity };

inline std::string_view to_string(violation_kind k) {
  switch (k) {
    case violation_kind::threshold_rule: return "threshold-rule";
    case violation_kind::descent_relation: return "descent-relation";
    case violation_kind::cumulative_estimate: return "cumulative-estimate";
    case violation_kind::threshold_order: return "threshold-order";
    case violation_kind::chain: return "chain";
    case violation_kind::expense_identity: return "expense-identity";
  }
  return "?";
}

struct invariant_violation {
  std::size_t move_index = 0;
  violation_kind kind = violation_kind::threshold_rule;
  std::string detail;
};

/// Post-hoc audit of a trajectory from its stored records alone:
///   f < -delta (strict, no slack) for every move,
///   u(to) - u(from) > delta - [b - c]_+ - tol,
///   e = u(from) + c - u(to) within tol and e <= f + b + tol,
///   every prefix sum of f is <= tol,
///   thresholds are non-increasing and the moves chain.
inline std::vector<invariant_violation> verify_descent_invariants(const std::vector<move_record>& moves,
                                                                  double tol = assumption_tolerance) {
  std::vector<invariant_violation> out;
  double prefix = 0.0;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto& m = moves[i];
    auto report = [&](violation_kind kind, std::string detail) { out.push_back({i, kind, std::move(detail)}); };

    if (!(m.f_value < -m.threshold_at_move)) {
      report(violation_kind::threshold_rule,
             "f = " + std::to_string(m.f_value) + " is not below -" + std::to_string(m.threshold_at_move));
    }
    const double gain = m.u_to - m.u_from;
    const double bound = m.threshold_at_move - std::max(m.b_value - m.c_value, 0.0);
    if (!(gain > bound - tol)) {
      report(violation_kind::descent_relation,
             "utility gain " + std::to_string(gain) + " does not exceed " + std::to_string(bound));
    }
    if (std::abs(m.e_value - (m.u_from + m.c_value - m.u_to)) > tol || m.e_value > m.f_value + m.b_value + tol) {
      report(violation_kind::expense_identity, "stored e is inconsistent with u, c, f and b");
    }
    prefix += m.f_value;
    if (prefix > tol) {
      report(violation_kind::cumulative_estimate, "prefix sum of f is " + std::to_string(prefix));
    }
    if (i > 0) {
      if (m.threshold_at_move > moves[i - 1].threshold_at_move) {
        report(violation_kind::threshold_order, "threshold increased");
      }
      if (!(m.from == moves[i - 1].to)) report(violation_kind::chain, "move does not start where the last ended");
    }
  }
  return out;
}

inline std::vector<invariant_violation> verify_descent_invariants(const trajectory& t,
                                                                  double tol = assumption_tolerance) {
  auto out = verify_descent_invariants(t.moves, tol);
  if (!t.moves.empty() && !(t.moves.front().from == t.initial)) {
    out.push_back({0, violation_kind::chain, "first move does not start at the initial state"});
  }
  return out;
}

struct boundedness {
  double max_norm = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
};

/// Largest infinity-norm of any visited state and the range of u along the run.
inline boundedness boundedness_monitor(const relative_problem& problem, const trajectory& t) {
  boundedness r;
  r.max_norm = norm_inf(t.initial);
  r.u_min = r.u_max = problem.utility_estimate(t.initial, t.initial);
  for (const auto& m : t.moves) {
    r.max_norm = std::max(r.max_norm, norm_inf(m.to));
    r.u_min = std::min(r.u_min, m.u_to);
    r.u_max = std::max(r.u_max, m.u_to);
  }
  return r;
}

struct assumption_audit {
  bool base_ok = true;  // c(x,x) = 0, c >= 0, x in D(x) on sampled states
  std::size_t base_failures = 0;
  b1_result b1;
  std::optional<double> declared_cost_floor;
  std::size_t triangle_triples = 0;
  std::size_t triangle_violations = 0;
  a4pp_result a4pp;
};

/// The sampled audit behind the `check` command.
inline assumption_audit audit_assumptions(const relative_problem& problem, std::size_t samples, std::uint64_t seed) {
  assumption_audit a;
  rng_type rng(seed);
  const std::size_t base = std::min<std::size_t>(samples, 1000);
  for (std::size_t i = 0; i < base; ++i) {
    auto x = problem.sample_state(rng);
    if (!problem.feasible_contains(x, x) || problem.move_cost(x, x) != 0.0) ++a.base_failures;
  }
  a.base_ok = a.base_failures == 0;
  a.declared_cost_floor = problem.declared_cost_floor();
  a.b1 = check_b1_conditions(problem, samples, rng, a.declared_cost_floor);
  a.triangle_triples = samples;
  a.triangle_violations = check_triangle_inequality(problem, samples, rng);
  a.a4pp = check_overestimate_bound(problem, samples, rng);
  return a;
}

}  // namespace relopt

#endif  // RELOPT_DIAGNOSTICS_HPP_
