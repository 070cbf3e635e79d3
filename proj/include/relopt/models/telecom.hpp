#ifndef RELOPT_MODELS_TELECOM_HPP_
#define RELOPT_MODELS_TELECOM_HPP_

// Capacity allocation in a data network. The state is the link capacity
// profile x; its utility u(x) is the optimal value of the network profit
// program
//
//   max sum_i mu_i(z_i)  s.t.  sum_{i in N(j)} z_i <= x_j,  0 <= z_i <= d_i,
//
// where every demand i is routed on one fixed path and N(j) lists the demands
// crossing link j. Utilities of neighbours are known exactly inside D(x), so
// phi(x, y) = u(y) there and the over-estimate vanishes.

#include <memory>
#include <numeric>

#include "relopt/core.hpp"

namespace relopt::models {

enum class demand_utility { linear, logarithmic };  // w z  or  w ln(1 + z)

struct telecom_params {
  std::size_t links = 3;
  std::vector<std::vector<std::size_t>> paths{{0, 1}, {1, 2}, {2}};  // links used by each demand
  std::vector<double> demand_caps{0.8, 0.7, 0.9};                    // d
  std::vector<double> weights{3.0, 2.0, 1.0};                        // w
  demand_utility utility = demand_utility::linear;
  std::vector<double> link_caps{1.0, 1.0, 1.0};     // alpha
  std::vector<double> link_prices{1.0, 1.0, 1.0};   // beta
  double budget = 2.0;                              // C
  std::optional<double> info_radius;                // r1, default 0.1 max alpha
  std::optional<double> move_radius;                // r2, default 0.1 max alpha
  std::vector<double> reconfig_rates{0.2, 0.2, 0.2};  // gamma
  double inner_tol = 1e-6;

  std::size_t demands() const { return paths.size(); }
};

struct inner_solution {
  std::vector<double> flows;
  double value = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

// Euclidean projection onto {0 <= z <= d} intersected with the knapsack rows
// {sum_{i in rows[j]} z_i <= cap[j]}, by Dykstra's alternating projections.
class flow_projector {
 public:
  flow_projector(const std::vector<double>& caps_d, const std::vector<std::vector<std::size_t>>& rows,
                 const std::vector<double>& row_caps)
      : d_(caps_d), rows_(rows), row_caps_(row_caps) {}

  std::vector<double> operator()(std::vector<double> z) const {
    const std::size_t m = z.size();
    std::vector<double> p_box(m, 0.0);
    std::vector<std::vector<double>> p_row(rows_.size(), std::vector<double>(m, 0.0));
    std::vector<double> shifted(m);
    // z alone can sit still for a whole cycle while the correction terms are
    // still moving, so convergence is judged on both.
    for (std::size_t cycle = 0; cycle < 20000; ++cycle) {
      double change = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        shifted[i] = z[i] + p_box[i];
        const double next = std::clamp(shifted[i], 0.0, d_[i]);
        change = std::max(change, std::abs(shifted[i] - next - p_box[i]));
        z[i] = next;
        p_box[i] = shifted[i] - next;
      }
      for (std::size_t j = 0; j < rows_.size(); ++j) {
        auto& p = p_row[j];
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) shifted[i] = z[i] + p[i];
        for (std::size_t i : rows_[j]) s += shifted[i];
        const double excess = s - row_caps_[j];
        for (std::size_t i = 0; i < m; ++i) {
          double next = shifted[i];
          if (excess > 0.0 && in_row(j, i)) next -= excess / static_cast<double>(rows_[j].size());
          change = std::max({change, std::abs(shifted[i] - next - p[i]), std::abs(next - z[i])});
          p[i] = shifted[i] - next;
          z[i] = next;
        }
      }
      if (change < 1e-15) break;
    }
    return z;
  }

 private:
  bool in_row(std::size_t j, std::size_t i) const {
    return std::find(rows_[j].begin(), rows_[j].end(), i) != rows_[j].end();
  }

  const std::vector<double>& d_;
  const std::vector<std::vector<std::size_t>>& rows_;
  const std::vector<double>& row_caps_;
};

}  // namespace detail

class telecom_model;
inline inner_solution inner_solve(const telecom_model& model, const state_point& x, double tol);

class telecom_model final : public relative_problem {
 public:
  explicit telecom_model(telecom_params p) : p_(std::move(p)) {
    const std::size_t n = p_.links;
    const std::size_t m = p_.demands();
    if (n == 0) throw parameter_error("telecom: links must be positive");
    if (m == 0) throw parameter_error("telecom: at least one demand path is required");
    for (const auto& path : p_.paths) {
      if (path.empty()) throw parameter_error("telecom: every demand path must use at least one link");
      for (std::size_t j : path) {
        if (j >= n) throw parameter_error("telecom: path refers to a link index >= links");
      }
    }
    check_size(p_.demand_caps, m, "demand_caps");
    check_size(p_.weights, m, "weights");
    check_size(p_.link_caps, n, "link_caps");
    check_size(p_.link_prices, n, "link_prices");
    check_size(p_.reconfig_rates, n, "reconfig_rates");
    for (double v : p_.demand_caps) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw parameter_error("telecom: demand_caps must be non-negative");
    }
    for (double v : p_.weights) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw parameter_error("telecom: weights must be non-negative");
    }
    for (double v : p_.link_caps) {
      if (!(v > 0.0) || !std::isfinite(v)) throw parameter_error("telecom: link_caps must be positive");
    }
    for (double v : p_.link_prices) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw parameter_error("telecom: link_prices must be non-negative");
    }
    for (double v : p_.reconfig_rates) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw parameter_error("telecom: reconfig_rates must be non-negative");
    }
    if (!(p_.budget >= 0.0)) throw parameter_error("telecom: budget must be non-negative");
    if (!(p_.inner_tol > 0.0)) throw parameter_error("telecom: inner_tol must be positive");

    const double amax = *std::max_element(p_.link_caps.begin(), p_.link_caps.end());
    r1_ = p_.info_radius.value_or(0.1 * amax);
    r2_ = p_.move_radius.value_or(0.1 * amax);
    if (!(r1_ > 0.0)) throw parameter_error("telecom: info_radius must be positive");
    if (!(r2_ > 0.0)) throw parameter_error("telecom: move_radius must be positive");

    link_members_.assign(n, {});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j : p_.paths[i]) {
        if (std::find(link_members_[j].begin(), link_members_[j].end(), i) == link_members_[j].end()) {
          link_members_[j].push_back(i);
        }
      }
    }
  }

  const telecom_params& params() const { return p_; }
  /// N(j) for every link j.
  const std::vector<std::vector<std::size_t>>& link_members() const { return link_members_; }
  double radius() const { return std::min(r1_, r2_); }
  double max_link_cap() const { return *std::max_element(p_.link_caps.begin(), p_.link_caps.end()); }

  double demand_value(std::size_t i, double z) const {
    return p_.utility == demand_utility::linear ? p_.weights[i] * z : p_.weights[i] * std::log1p(z);
  }
  double demand_slope(std::size_t i, double z) const {
    return p_.utility == demand_utility::linear ? p_.weights[i] : p_.weights[i] / (1.0 + z);
  }

  /// u(x), the optimal network profit for capacities x.
  double network_profit(const state_point& x) const { return inner_solve(*this, x, p_.inner_tol).value; }

  std::string name() const override { return "telecom"; }
  std::size_t dimension() const override { return p_.links; }

  bool state_contains(const state_point& x) const override {
    if (x.dimension() != p_.links || !x.is_finite()) return false;
    double spend = 0.0;
    for (std::size_t j = 0; j < p_.links; ++j) {
      if (x[j] < 0.0 || x[j] > p_.link_caps[j]) return false;
      spend += p_.link_prices[j] * x[j];
    }
    return spend <= p_.budget * (1.0 + 1e-12) + 1e-12;
  }

  bool feasible_contains(const state_point& x, const state_point& y) const override {
    if (!state_contains(x) || !state_contains(y)) return false;
    const double r = radius();
    for (std::size_t j = 0; j < p_.links; ++j) {
      if (std::abs(y[j] - x[j]) > r) return false;
    }
    return true;
  }

  state_point sample_state(rng_type& rng) const override {
    for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
      state_point y(draw_box(rng, std::vector<double>(p_.links, 0.0), p_.link_caps));
      if (state_contains(y)) return y;
    }
    // Scale a box draw onto the budget plane.
    state_point y(draw_box(rng, std::vector<double>(p_.links, 0.0), p_.link_caps));
    double spend = 0.0;
    for (std::size_t j = 0; j < p_.links; ++j) spend += p_.link_prices[j] * y.coords[j];
    if (spend > p_.budget) {
      for (auto& v : y.coords) v *= p_.budget / spend;
    }
    return y;
  }

  state_point default_initial() const override { return state_point(std::vector<double>(p_.links, 0.0)); }

 protected:
  double do_utility_estimate(const state_point&, const state_point& y, std::size_t) const override {
    return network_profit(y);
  }

  double do_move_cost(const state_point& x, const state_point& y) const override {
    double c = 0.0;
    for (std::size_t j = 0; j < p_.links; ++j) c += p_.reconfig_rates[j] * std::abs(y[j] - x[j]);
    return c;
  }

  double do_metric(const state_point& x, const state_point& y) const override {
    double s = 0.0;
    for (std::size_t j = 0; j < p_.links; ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
    return std::sqrt(s);
  }

  // Uniform on the box part of D(x), rejecting budget violations; the box
  // halves after 1000 consecutive rejections.
  std::vector<state_point> do_sample_feasible(const state_point& x, rng_type& rng,
                                              std::size_t count) const override {
    std::vector<state_point> out;
    out.reserve(count);
    double r = radius();
    std::size_t rejects = 0;
    while (out.size() < count) {
      std::vector<double> lo(p_.links), hi(p_.links);
      for (std::size_t j = 0; j < p_.links; ++j) {
        lo[j] = std::max(0.0, x[j] - r);
        hi[j] = std::min(p_.link_caps[j], x[j] + r);
      }
      state_point y(draw_box(rng, lo, hi));
      if (feasible_contains(x, y)) {
        out.push_back(std::move(y));
        rejects = 0;
      } else if (++rejects == 1000) {
        r *= 0.5;
        rejects = 0;
      }
    }
    return out;
  }

 private:
  static void check_size(const std::vector<double>& v, std::size_t n, const char* what) {
    if (v.size() != n) throw parameter_error(std::string("telecom: ") + what + " has the wrong length");
  }

  static std::vector<double> draw_box(rng_type& rng, const std::vector<double>& lo, const std::vector<double>& hi) {
    std::vector<double> c(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      c[j] = std::min(hi[j], std::uniform_real_distribution<double>(lo[j], hi[j])(rng));
    }
    return c;
  }

  telecom_params p_;
  double r1_ = 0.0;
  double r2_ = 0.0;
  std::vector<std::vector<std::size_t>> link_members_;
};

/// Projected gradient ascent on the network profit program for capacities x.
/// The returned flows satisfy every constraint exactly; the value is within
/// `tol` of the optimum.
inline inner_solution inner_solve(const telecom_model& model, const state_point& x, double tol) {
  if (!model.state_contains(x)) throw domain_error("telecom: capacity profile " + to_string(x) + " is not in X");
  if (!(tol > 0.0)) throw std::invalid_argument("inner_solve: tol must be positive");

  const auto& p = model.params();
  const std::size_t m = p.demands();
  const auto& rows = model.link_members();
  std::vector<std::vector<std::size_t>> active_rows;
  std::vector<double> row_caps;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].empty()) continue;
    active_rows.push_back(rows[j]);
    row_caps.push_back(x[j]);
  }
  const detail::flow_projector project(p.demand_caps, active_rows, row_caps);

  inner_solution sol;
  sol.flows.assign(m, 0.0);
  const double lipschitz = *std::max_element(p.weights.begin(), p.weights.end());
  if (lipschitz > 0.0) {
    const double step = 1.0 / lipschitz;
    double diameter = 0.0;
    for (double d : p.demand_caps) diameter += d * d;
    diameter = std::sqrt(diameter);

    std::vector<double> trial(m);
    for (; sol.iterations < 100000; ++sol.iterations) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = sol.flows[i] + step * model.demand_slope(i, sol.flows[i]);
      auto next = project(trial);
      double moved = 0.0;
      for (std::size_t i = 0; i < m; ++i) moved += (next[i] - sol.flows[i]) * (next[i] - sol.flows[i]);
      sol.flows = std::move(next);
      // Gradient-mapping norm times the feasible-set diameter bounds the gap.
      if (std::sqrt(moved) / step * diameter <= 0.1 * tol) break;
    }
  }

  // Restore exact feasibility: clamp to the box, then shrink overfull rows.
  for (std::size_t i = 0; i < m; ++i) sol.flows[i] = std::clamp(sol.flows[i], 0.0, p.demand_caps[i]);
  for (std::size_t pass = 0; pass < 4; ++pass) {
    bool clean = true;
    for (std::size_t r = 0; r < active_rows.size(); ++r) {
      double s = 0.0;
      for (std::size_t i : active_rows[r]) s += sol.flows[i];
      if (s <= row_caps[r]) continue;
      clean = false;
      const double scale = row_caps[r] / s;
      for (std::size_t i : active_rows[r]) sol.flows[i] *= scale;
    }
    if (clean) break;
  }
  for (std::size_t r = 0; r < active_rows.size(); ++r) {
    double s = 0.0;
    for (std::size_t i : active_rows[r]) s += sol.flows[i];
    if (s > row_caps[r]) {
      for (std::size_t i : active_rows[r]) sol.flows[i] = std::max(0.0, sol.flows[i] - (s - row_caps[r]));
    }
  }

  sol.value = 0.0;
  for (std::size_t i = 0; i < m; ++i) sol.value += model.demand_value(i, sol.flows[i]);
  return sol;
}

inline std::unique_ptr<telecom_model> make_telecom_model(telecom_params p) {
  return std::make_unique<telecom_model>(std::move(p));
}

}  // namespace relopt::models

#endif  // RELOPT_MODELS_TELECOM_HPP_
