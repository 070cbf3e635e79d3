#ifndef RELOPT_MODELS_DISCRETE_GRID_HPP_
#define RELOPT_MODELS_DISCRETE_GRID_HPP_

#include <memory>
#include <numbers>

#include "relopt/core.hpp"

namespace relopt::models {

struct discrete_grid_params {
  std::size_t resolution = 100;   // states i / N, i = 0..N
  double delta_cost = 0.05;       // c(x, y) for x != y
  std::size_t radius = 5;         // D(i) = {j : |i - j| <= radius}
  std::optional<double> epsilon0; // injected over-estimate at step 0; defaults to delta_cost / 2
  std::vector<double> utility;    // u_i; defaults to a bounded multimodal profile

  static double default_profile(double t) { return t * (1.0 - t) + 0.15 * std::sin(10.0 * std::numbers::pi * t); }
};

/// Countable model with c(x, y) = delta for x != y. The estimate overrates
/// every other state by eps_k = eps0 * 2^-k, where k is the step index of x
/// along the run, so over-estimates vanish along every trajectory.
class discrete_grid final : public relative_problem {
 public:
  explicit discrete_grid(discrete_grid_params p) : p_(std::move(p)) {
    if (!(p_.delta_cost > 0.0) || !std::isfinite(p_.delta_cost)) {
      throw parameter_error("grid: delta_cost must be positive");
    }
    eps0_ = p_.epsilon0.value_or(p_.delta_cost / 2.0);
    if (!(eps0_ >= 0.0 && eps0_ < p_.delta_cost)) {
      throw parameter_error("grid: epsilon0 must lie in [0, delta_cost)");
    }
    if (p_.utility.empty()) {
      p_.utility.resize(p_.resolution + 1);
      for (std::size_t i = 0; i <= p_.resolution; ++i) p_.utility[i] = discrete_grid_params::default_profile(coord(i));
    } else if (p_.utility.size() != p_.resolution + 1) {
      throw parameter_error("grid: utility table must have resolution + 1 entries");
    }
    for (double u : p_.utility) {
      if (!std::isfinite(u)) throw parameter_error("grid: utility table entries must be finite");
    }
  }

  const discrete_grid_params& params() const { return p_; }
  double epsilon0() const { return eps0_; }
  std::size_t size() const { return p_.resolution + 1; }

  double coord(std::size_t i) const {
    return p_.resolution == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(p_.resolution);
  }
  state_point point(std::size_t i) const { return state_point({coord(i)}, i); }

  /// Index of x, or nullopt if x is not a grid state.
  std::optional<std::size_t> index_of(const state_point& x) const {
    if (x.dimension() != 1 || !std::isfinite(x[0])) return std::nullopt;
    const double scaled = x[0] * static_cast<double>(p_.resolution);
    if (scaled < -0.5 || scaled > static_cast<double>(p_.resolution) + 0.5) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::llround(scaled));
    if (std::abs(coord(i) - x[0]) > 1e-12) return std::nullopt;
    if (x.discrete_id && *x.discrete_id != i) return std::nullopt;
    return i;
  }

  std::string name() const override { return "grid"; }
  std::size_t dimension() const override { return 1; }

  bool state_contains(const state_point& x) const override { return index_of(x).has_value(); }

  bool feasible_contains(const state_point& x, const state_point& y) const override {
    auto i = index_of(x);
    auto j = index_of(y);
    if (!i || !j) return false;
    return (*i > *j ? *i - *j : *j - *i) <= p_.radius;
  }

  std::optional<std::vector<state_point>> enumerate_feasible(const state_point& x) const override {
    auto i = index_of(x);
    if (!i) throw domain_error("grid: " + to_string(x) + " is not a grid state");
    const std::size_t lo = *i > p_.radius ? *i - p_.radius : 0;
    const std::size_t hi = std::min(p_.resolution, *i + p_.radius);
    std::vector<state_point> out;
    for (std::size_t j = lo; j <= hi; ++j) out.push_back(point(j));
    return out;
  }

  std::optional<std::vector<state_point>> enumerate_states() const override {
    std::vector<state_point> out;
    for (std::size_t i = 0; i <= p_.resolution; ++i) out.push_back(point(i));
    return out;
  }

  state_point sample_state(rng_type& rng) const override {
    return point(std::uniform_int_distribution<std::size_t>(0, p_.resolution)(rng));
  }

  state_point default_initial() const override { return point(0); }
  std::optional<double> declared_cost_floor() const override { return p_.delta_cost; }

  double injected_error(std::size_t step) const {
    return std::ldexp(eps0_, -static_cast<int>(std::min<std::size_t>(step, 2000)));
  }

 protected:
  double do_utility_estimate(const state_point& x, const state_point& y, std::size_t step) const override {
    const std::size_t j = checked_index(y);
    if (checked_index(x) == j) return p_.utility[j];
    return p_.utility[j] + injected_error(step);
  }

  double do_move_cost(const state_point& x, const state_point& y) const override {
    return checked_index(x) == checked_index(y) ? 0.0 : p_.delta_cost;
  }

  double do_metric(const state_point& x, const state_point& y) const override { return std::abs(x[0] - y[0]); }

  std::vector<state_point> do_sample_feasible(const state_point& x, rng_type& rng,
                                              std::size_t count) const override {
    auto all = *enumerate_feasible(x);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    std::vector<state_point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(all[pick(rng)]);
    return out;
  }

 private:
  std::size_t checked_index(const state_point& x) const {
    auto i = index_of(x);
    if (!i) throw domain_error("grid: " + to_string(x) + " is not a grid state");
    return *i;
  }

  discrete_grid_params p_;
  double eps0_ = 0.0;
};

inline std::unique_ptr<discrete_grid> make_discrete_grid(discrete_grid_params p) {
  return std::make_unique<discrete_grid>(std::move(p));
}

}  // namespace relopt::models

#endif  // RELOPT_MODELS_DISCRETE_GRID_HPP_
