#ifndef RELOPT_CORE_HPP_
#define RELOPT_CORE_HPP_

// Problem abstraction for relative (state-dependent) optimization.
//
// A model supplies a state set X, a feasible mapping x -> D(x), a utility
// estimate phi(x, y) that is only known for y in D(x), a move cost c(x, y)
// and a metric d(x, y). The precise utility of a state is u(x) = phi(x, x).
// From these the pure-expense estimate f, the true pure expense e and the
// over-estimate b are derived by the free functions at the bottom of this
// header.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relopt {

using rng_type = std::mt19937_64;

/// x is not a member of the state set X.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// y is not in D(x), so phi(x, y) is not available at x.
class feasibility_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The model produced a non-finite value or broke its own contract.
class model_fault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model parameters violate a construction constraint.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct state_point {
  std::vector<double> coords;
  // Only set by countable-state models.
  std::optional<std::size_t> discrete_id;

  state_point() = default;
  explicit state_point(std::vector<double> c, std::optional<std::size_t> id = std::nullopt)
      : coords(std::move(c)), discrete_id(id) {}

  static state_point scalar(double v) { return state_point({v}); }

  std::size_t dimension() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }

  bool is_finite() const {
    return std::all_of(coords.begin(), coords.end(), [](double v) { return std::isfinite(v); });
  }

  // Identity is coordinate identity; discrete ids are derived data.
  friend bool operator==(const state_point& a, const state_point& b) { return a.coords == b.coords; }
};

inline std::string to_string(const state_point& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    if (i) os << ", ";
    os << x.coords[i];
  }
  os << ')';
  return os.str();
}

inline double norm_inf(const state_point& x) {
  double m = 0.0;
  for (double v : x.coords) m = std::max(m, std::abs(v));
  return m;
}

/// Behavioral interface implemented by every model.
///
/// The public evaluation functions are non-virtual wrappers that enforce the
/// information structure (phi only on D(x)) and reject non-finite model output
/// with model_fault. Implementations override the do_* hooks. All evaluations
/// must be pure functions of their arguments.
class relative_problem {
 public:
  virtual ~relative_problem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;

  virtual bool state_contains(const state_point& x) const = 0;
  virtual bool feasible_contains(const state_point& x, const state_point& y) const = 0;

  /// phi(x, y). `step` is the trajectory index of x; models whose estimates
  /// improve along a run read it, all others ignore it.
  double utility_estimate(const state_point& x, const state_point& y, std::size_t step = 0) const {
    if (!feasible_contains(x, y)) {
      throw feasibility_error(name() + ": utility estimate requested for " + to_string(y) +
                              " outside D(" + to_string(x) + ")");
    }
    return checked(do_utility_estimate(x, y, step), "utility estimate");
  }

  double move_cost(const state_point& x, const state_point& y) const {
    double c = checked(do_move_cost(x, y), "move cost");
    if (c < 0.0) throw model_fault(name() + ": negative move cost");
    return c;
  }

  double metric(const state_point& x, const state_point& y) const {
    return checked(do_metric(x, y), "metric");
  }

  /// Draws `count` points of D(x). Every returned point is checked against
  /// feasible_contains and state_contains.
  std::vector<state_point> sample_feasible(const state_point& x, rng_type& rng, std::size_t count) const {
    auto pts = do_sample_feasible(x, rng, count);
    for (const auto& y : pts) {
      if (!y.is_finite() || !state_contains(y) || !feasible_contains(x, y)) {
        throw model_fault(name() + ": sampler returned " + to_string(y) + " outside D(" + to_string(x) + ")");
      }
    }
    return pts;
  }

  /// Full list of D(x) for countable models, nullopt otherwise.
  virtual std::optional<std::vector<state_point>> enumerate_feasible(const state_point&) const {
    return std::nullopt;
  }

  /// Deterministic, endpoint-inclusive grid over D(x) for one-dimensional
  /// models; empty when the model has no natural grid.
  virtual std::vector<state_point> feasible_grid(const state_point&, std::size_t) const { return {}; }

  /// Draw from X (used by the assumption audits).
  virtual state_point sample_state(rng_type& rng) const = 0;

  /// Full list of X for countable models.
  virtual std::optional<std::vector<state_point>> enumerate_states() const { return std::nullopt; }

  virtual state_point default_initial() const = 0;

  /// The positive lower bound on off-diagonal move costs the model claims, if any.
  virtual std::optional<double> declared_cost_floor() const { return std::nullopt; }

 protected:
  virtual double do_utility_estimate(const state_point& x, const state_point& y, std::size_t step) const = 0;
  virtual double do_move_cost(const state_point& x, const state_point& y) const = 0;
  virtual double do_metric(const state_point& x, const state_point& y) const = 0;
  virtual std::vector<state_point> do_sample_feasible(const state_point& x, rng_type& rng,
                                                      std::size_t count) const = 0;

 private:
  double checked(double v, const char* what) const {
    if (!std::isfinite(v)) throw model_fault(name() + ": non-finite " + what);
    return v;
  }
};

inline void require_state(const relative_problem& problem, const state_point& x) {
  if (x.dimension() != problem.dimension() || !x.is_finite() || !problem.state_contains(x)) {
    throw domain_error(problem.name() + ": " + to_string(x) + " is not in X");
  }
}

inline void require_feasible(const relative_problem& problem, const state_point& x, const state_point& y) {
  require_state(problem, x);
  require_state(problem, y);
  if (!problem.feasible_contains(x, y)) {
    throw feasibility_error(problem.name() + ": " + to_string(y) + " is not in D(" + to_string(x) + ")");
  }
}

/// u(x) = phi(x, x).
inline double true_utility(const relative_problem& problem, const state_point& x) {
  require_state(problem, x);
  return problem.utility_estimate(x, x);
}

/// f(x, y) = phi(x, x) + c(x, y) - phi(x, y), defined for y in D(x).
inline double pure_expense_estimate(const relative_problem& problem, const state_point& x, const state_point& y,
                                    std::size_t step = 0) {
  require_feasible(problem, x, y);
  if (x == y) return 0.0;
  return problem.utility_estimate(x, x, step) + problem.move_cost(x, y) - problem.utility_estimate(x, y, step);
}

/// e(x, y) = u(x) + c(x, y) - u(y). Diagnostic only: needs u(y), which the
/// decision maker at x does not know.
inline double true_pure_expense(const relative_problem& problem, const state_point& x, const state_point& y) {
  require_state(problem, x);
  require_state(problem, y);
  if (x == y) return 0.0;
  return problem.utility_estimate(x, x) + problem.move_cost(x, y) - problem.utility_estimate(y, y);
}

/// b(x, y) = [phi(x, y) - u(y)]_+.
inline double over_estimate(const relative_problem& problem, const state_point& x, const state_point& y,
                            std::size_t step = 0) {
  require_feasible(problem, x, y);
  return std::max(problem.utility_estimate(x, y, step) - problem.utility_estimate(y, y), 0.0);
}

struct move_record {
  std::size_t step = 0;
  state_point from;
  state_point to;
  double f_value = 0.0;
  double e_value = 0.0;
  double b_value = 0.0;
  double c_value = 0.0;
  double u_from = 0.0;
  double u_to = 0.0;
  double threshold_at_move = 0.0;
};

/// Evaluates every per-move quantity for the move from -> to taken at index `step`.
inline move_record make_move_record(const relative_problem& problem, std::size_t step, const state_point& from,
                                    const state_point& to, double threshold) {
  require_feasible(problem, from, to);
  move_record m;
  m.step = step;
  m.from = from;
  m.to = to;
  m.threshold_at_move = threshold;
  m.u_from = problem.utility_estimate(from, from);
  m.u_to = problem.utility_estimate(to, to);
  m.c_value = problem.move_cost(from, to);
  const double phi_from = problem.utility_estimate(from, from, step);
  const double phi_to = problem.utility_estimate(from, to, step);
  m.f_value = phi_from + m.c_value - phi_to;
  m.e_value = m.u_from + m.c_value - m.u_to;
  m.b_value = std::max(phi_to - m.u_to, 0.0);
  return m;
}

enum class termination_reason { threshold_exhausted, budget_exhausted, discrete_stop };

inline std::string_view to_string(termination_reason t) {
  switch (t) {
    case termination_reason::threshold_exhausted: return "ThresholdExhausted";
    case termination_reason::budget_exhausted: return "BudgetExhausted";
    case termination_reason::discrete_stop: return "DiscreteStop";
  }
  return "?";
}

struct stationary_point {
  std::size_t level = 0;
  state_point point;
  double threshold = 0.0;
};

struct trajectory {
  state_point initial;
  std::vector<move_record> moves;
  std::vector<stationary_point> stationary_points;
  termination_reason termination = termination_reason::threshold_exhausted;

  const state_point& current() const { return moves.empty() ? initial : moves.back().to; }

  /// Appends a move, enforcing the chain and finite-value invariants.
  void append(move_record m) {
    if (!(m.from == current())) {
      throw std::logic_error("trajectory: move " + std::to_string(m.step) + " does not start at the current state");
    }
    if (!m.to.is_finite()) throw model_fault("trajectory: non-finite state");
    moves.push_back(std::move(m));
  }

  double cumulative_estimate() const {
    double s = 0.0;
    for (const auto& m : moves) s += m.f_value;
    return s;
  }
};

}  // namespace relopt

#endif  // RELOPT_CORE_HPP_
