#ifndef RELOPT_MODELS_WASTE_HPP_
#define RELOPT_MODELS_WASTE_HPP_

// Firm choosing technology activity levels x in [0, x_max]^n. Emissions are
// q(x) = Qx; the unit treatment charge of pollutant i is
// pi_i(q) = pi0_i + s_i q_i^2, but at x the firm only knows its first-order
// expansion around q(x). Production profit is mu(x) = a'x - x'Hx / 2.
//
//   u(x)      = mu(x) - sum_i q_i(x) pi_i(q(x))
//   phi(x, y) = mu(y) - sum_i q_i(y) [pi_i(q(x)) + pi_i'(q(x)) (q_i(y) - q_i(x))]
//   c(x, y)   = kappa |q(y) - q(x)|_1
//   D(x)      = {y in X : |Qy - Qx|_inf <= rho}
//
// so b(x, y) = sum_i s_i q_i(y) (q_i(y) - q_i(x))^2 is positive off the
// diagonal and bounded by max_i s_i * q_max * rho * |q(y) - q(x)|_1.

#include <memory>

#include "relopt/core.hpp"

namespace relopt::models {

struct waste_params {
  std::size_t technologies = 2;
  std::size_t pollutants = 2;
  std::vector<std::vector<double>> emissions{{1.0, 0.5}, {0.3, 1.0}};  // Q, pollutants x technologies
  std::vector<double> revenue{4.0, 3.0};                               // a
  std::vector<double> curvature{1.0, 1.0};                             // diagonal of H
  std::vector<double> base_price{0.5, 0.5};                            // pi0
  std::vector<double> price_slope{0.2, 0.3};                           // s
  std::optional<double> radius;                                        // rho; defaults to the compliant radius
  double cost_rate = 0.5;                                              // kappa
  double x_max = 2.0;
};

class waste_model final : public relative_problem {
 public:
  explicit waste_model(waste_params p) : p_(std::move(p)) {
    const std::size_t n = p_.technologies;
    const std::size_t m = p_.pollutants;
    if (n == 0) throw parameter_error("waste: technologies must be positive");
    if (m == 0) throw parameter_error("waste: pollutants must be positive");
    if (p_.emissions.size() != m) throw parameter_error("waste: emissions must have one row per pollutant");
    for (const auto& row : p_.emissions) {
      if (row.size() != n) throw parameter_error("waste: emissions rows must have one entry per technology");
      for (double v : row) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw parameter_error("waste: emissions must be non-negative");
      }
    }
    if (p_.revenue.size() != n) throw parameter_error("waste: revenue must have one entry per technology");
    if (p_.curvature.size() != n) throw parameter_error("waste: curvature must have one entry per technology");
    for (double h : p_.curvature) {
      if (!(h > 0.0)) throw parameter_error("waste: curvature must be positive");
    }
    if (p_.base_price.size() != m) throw parameter_error("waste: base_price must have one entry per pollutant");
    if (p_.price_slope.size() != m) throw parameter_error("waste: price_slope must have one entry per pollutant");
    for (double s : p_.price_slope) {
      if (!(s > 0.0)) throw parameter_error("waste: price_slope must be positive");
    }
    if (!(p_.cost_rate > 0.0)) throw parameter_error("waste: cost_rate must be positive");
    if (!(p_.x_max > 0.0) || !std::isfinite(p_.x_max)) throw parameter_error("waste: x_max must be positive");

    q_max_ = 0.0;
    for (const auto& row : p_.emissions) {
      double r = 0.0;
      for (double v : row) r += v * p_.x_max;
      q_max_ = std::max(q_max_, r);
    }
    s_max_ = *std::max_element(p_.price_slope.begin(), p_.price_slope.end());
    rho_ = p_.radius.value_or(compliant_radius());
    if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw parameter_error("waste: radius must be positive");

    half_width_.assign(n, p_.x_max);
    for (std::size_t k = 0; k < n; ++k) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col = std::max(col, p_.emissions[i][k]);
      if (col > 0.0) half_width_[k] = std::min(p_.x_max, rho_ / col);
    }
  }

  const waste_params& params() const { return p_; }
  double radius() const { return rho_; }
  double max_emission() const { return q_max_; }

  /// Largest rho for which b(x, y) <= c(x, y) on every feasible pair.
  double compliant_radius() const { return p_.cost_rate / (2.0 * s_max_ * (q_max_ > 0.0 ? q_max_ : 1.0)); }

  /// L with b(x, y) <= L * |q(y) - q(x)|_1 on every feasible pair.
  double overestimate_rate() const { return s_max_ * q_max_ * rho_; }

  std::vector<double> emissions_of(const state_point& x) const {
    std::vector<double> q(p_.pollutants, 0.0);
    for (std::size_t i = 0; i < p_.pollutants; ++i) {
      for (std::size_t k = 0; k < p_.technologies; ++k) q[i] += p_.emissions[i][k] * x[k];
    }
    return q;
  }

  double production_profit(const state_point& x) const {
    double mu = 0.0;
    for (std::size_t k = 0; k < p_.technologies; ++k) mu += p_.revenue[k] * x[k] - 0.5 * p_.curvature[k] * x[k] * x[k];
    return mu;
  }

  double price(std::size_t i, double q) const { return p_.base_price[i] + p_.price_slope[i] * q * q; }

  /// u(x) from the exact treatment prices.
  double exact_utility(const state_point& x) const {
    auto q = emissions_of(x);
    double u = production_profit(x);
    for (std::size_t i = 0; i < p_.pollutants; ++i) u -= q[i] * price(i, q[i]);
    return u;
  }

  std::string name() const override { return "waste"; }
  std::size_t dimension() const override { return p_.technologies; }

  bool state_contains(const state_point& x) const override {
    if (x.dimension() != p_.technologies) return false;
    return std::all_of(x.coords.begin(), x.coords.end(),
                       [&](double v) { return std::isfinite(v) && v >= 0.0 && v <= p_.x_max; });
  }

  bool feasible_contains(const state_point& x, const state_point& y) const override {
    if (!state_contains(x) || !state_contains(y)) return false;
    for (std::size_t i = 0; i < p_.pollutants; ++i) {
      double dq = 0.0;
      for (std::size_t k = 0; k < p_.technologies; ++k) dq += p_.emissions[i][k] * (y[k] - x[k]);
      if (std::abs(dq) > rho_) return false;
    }
    return true;
  }

  state_point sample_state(rng_type& rng) const override {
    std::uniform_real_distribution<double> dist(0.0, p_.x_max);
    std::vector<double> c(p_.technologies);
    for (auto& v : c) v = dist(rng);
    return state_point(std::move(c));
  }

  state_point default_initial() const override { return state_point(std::vector<double>(p_.technologies, 0.0)); }

 protected:
  double do_utility_estimate(const state_point& x, const state_point& y, std::size_t) const override {
    auto qx = emissions_of(x);
    auto qy = emissions_of(y);
    double phi = production_profit(y);
    for (std::size_t i = 0; i < p_.pollutants; ++i) {
      const double slope = 2.0 * p_.price_slope[i] * qx[i];
      phi -= qy[i] * (price(i, qx[i]) + slope * (qy[i] - qx[i]));
    }
    return phi;
  }

  double do_move_cost(const state_point& x, const state_point& y) const override {
    auto qx = emissions_of(x);
    auto qy = emissions_of(y);
    double c = 0.0;
    for (std::size_t i = 0; i < p_.pollutants; ++i) c += std::abs(qy[i] - qx[i]);
    return p_.cost_rate * c;
  }

  double do_metric(const state_point& x, const state_point& y) const override {
    double s = 0.0;
    for (std::size_t k = 0; k < x.dimension(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
  }

  // Rejection sampling inside the box that contains D(x); the box halves
  // after every 1000 consecutive rejections.
  std::vector<state_point> do_sample_feasible(const state_point& x, rng_type& rng,
                                              std::size_t count) const override {
    std::vector<state_point> out;
    out.reserve(count);
    std::vector<double> width = half_width_;
    std::size_t rejects = 0;
    while (out.size() < count) {
      std::vector<double> c(p_.technologies);
      for (std::size_t k = 0; k < p_.technologies; ++k) {
        const double lo = std::max(0.0, x[k] - width[k]);
        const double hi = std::min(p_.x_max, x[k] + width[k]);
        c[k] = std::min(hi, std::uniform_real_distribution<double>(lo, hi)(rng));
      }
      state_point y(std::move(c));
      if (feasible_contains(x, y)) {
        out.push_back(std::move(y));
        rejects = 0;
      } else if (++rejects == 1000) {
        for (auto& w : width) w *= 0.5;
        rejects = 0;
      }
    }
    return out;
  }

 private:
  waste_params p_;
  double q_max_ = 0.0;
  double s_max_ = 0.0;
  double rho_ = 0.0;
  std::vector<double> half_width_;
};

inline std::unique_ptr<waste_model> make_waste_model(waste_params p) {
  return std::make_unique<waste_model>(std::move(p));
}

}  // namespace relopt::models

#endif  // RELOPT_MODELS_WASTE_HPP_
