#ifndef RELOPT_MODELS_EXAMPLES_1D_HPP_
#define RELOPT_MODELS_EXAMPLES_1D_HPP_

// Three one-dimensional models on X = [0, 1] with c = 0 and closed-form
// estimates, plus a squared-distance cost line used by the triangle audit.

#include <memory>

#include "relopt/core.hpp"

namespace relopt::models {

namespace detail {

inline double pos(double v) { return v > 0.0 ? v : 0.0; }

// Shared plumbing for models whose states are points of [0, 1] and whose
// feasible sets are intervals.
class unit_interval_model : public relative_problem {
 public:
  std::size_t dimension() const override { return 1; }

  bool state_contains(const state_point& x) const override {
    return x.dimension() == 1 && std::isfinite(x[0]) && x[0] >= 0.0 && x[0] <= 1.0;
  }

  bool feasible_contains(const state_point& x, const state_point& y) const override {
    if (!state_contains(x) || !state_contains(y)) return false;
    auto [lo, hi] = interval(x[0]);
    return y[0] >= lo && y[0] <= hi;
  }

  std::vector<state_point> feasible_grid(const state_point& x, std::size_t points) const override {
    auto [lo, hi] = interval(x[0]);
    std::vector<state_point> out;
    if (points == 0) return out;
    if (points == 1 || hi == lo) {
      out.push_back(state_point::scalar(lo));
      return out;
    }
    out.reserve(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i + 1 < points; ++i) out.push_back(state_point::scalar(lo + step * static_cast<double>(i)));
    out.push_back(state_point::scalar(hi));
    return out;
  }

  state_point sample_state(rng_type& rng) const override {
    return state_point::scalar(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  }

  state_point default_initial() const override { return state_point::scalar(0.0); }

  /// Endpoints of D(x) for x in X.
  virtual std::pair<double, double> interval(double x) const = 0;

 protected:
  double do_metric(const state_point& x, const state_point& y) const override { return std::abs(x[0] - y[0]); }

  std::vector<state_point> do_sample_feasible(const state_point& x, rng_type& rng,
                                              std::size_t count) const override {
    auto [lo, hi] = interval(x[0]);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<state_point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(state_point::scalar(std::min(dist(rng), hi)));
    return out;
  }
};

}  // namespace detail

enum class example_variant { ex31, ex32, ex41 };

/// u(x) = 1 - x/4 (ex31, ex32) or u(x) = x (ex41); c = 0.
///   ex31: D(x) = [x, x + 0.1(1 - x)],               phi = u(y) + 0.6|0.5 - x|(y - x)
///   ex32: D(x) = [x - 0.1[0.5 - x]_+, x + 0.1(2 - x)], phi = u(y) + [0.5 - x]_+(y - x)
///   ex41: D(x) = X,                                  phi = u(y)
class example_1d final : public detail::unit_interval_model {
 public:
  explicit example_1d(example_variant v) : variant_(v) {}

  example_variant variant() const { return variant_; }

  std::string name() const override {
    switch (variant_) {
      case example_variant::ex31: return "example31";
      case example_variant::ex32: return "example32";
      case example_variant::ex41: return "example41";
    }
    return "example";
  }

  std::pair<double, double> interval(double x) const override {
    switch (variant_) {
      case example_variant::ex31: return {x, std::min(1.0, x + 0.1 * (1.0 - x))};
      case example_variant::ex32:
        return {std::max(0.0, x - 0.1 * detail::pos(0.5 - x)), std::min(1.0, x + 0.1 * (2.0 - x))};
      case example_variant::ex41: return {0.0, 1.0};
    }
    return {x, x};
  }

  double utility(double x) const { return variant_ == example_variant::ex41 ? x : 1.0 - x / 4.0; }

 protected:
  double do_utility_estimate(const state_point& xs, const state_point& ys, std::size_t) const override {
    const double x = xs[0];
    const double y = ys[0];
    switch (variant_) {
      case example_variant::ex31: return utility(y) + 0.6 * std::abs(0.5 - x) * (y - x);
      case example_variant::ex32: return utility(y) + detail::pos(0.5 - x) * (y - x);
      case example_variant::ex41: return utility(y);
    }
    return utility(y);
  }

  double do_move_cost(const state_point&, const state_point&) const override { return 0.0; }

 private:
  example_variant variant_;
};

inline std::unique_ptr<example_1d> make_example(example_variant v) { return std::make_unique<example_1d>(v); }

/// X = D(x) = [0, 1], u(x) = x, phi = u(y), c(x, y) = (y - x)^2. The cost
/// breaks the triangle inequality.
class squared_cost_line final : public detail::unit_interval_model {
 public:
  std::string name() const override { return "squared-cost-line"; }
  std::pair<double, double> interval(double) const override { return {0.0, 1.0}; }

 protected:
  double do_utility_estimate(const state_point&, const state_point& y, std::size_t) const override { return y[0]; }
  double do_move_cost(const state_point& x, const state_point& y) const override {
    const double d = y[0] - x[0];
    return d * d;
  }
};

}  // namespace relopt::models

#endif  // RELOPT_MODELS_EXAMPLES_1D_HPP_
