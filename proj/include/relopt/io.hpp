#ifndef RELOPT_IO_HPP_
#define RELOPT_IO_HPP_

// Model registry, parameter documents and run artifacts.
//
// Trajectory files are JSON lines, one move per line, with exactly the keys
//   k, from, to, f, e, b, c, u_from, u_to, delta
// in that order. Numbers use the shortest decimal form that parses back to
// the same double.

#include <charconv>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "relopt/core.hpp"
#include "relopt/diagnostics.hpp"
#include "relopt/models.hpp"
#include "relopt/solvers.hpp"

namespace relopt::io {

using json = nlohmann::ordered_json;

class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw format_error("cannot format number");
  return std::string(buf, end);
}

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"example31", "example32", "example41", "grid", "waste", "telecom"};
  return names;
}

namespace detail {

// Reads optional fields out of a parameter object and rejects unknown keys.
class param_reader {
 public:
  param_reader(std::string model, const json& doc) : model_(std::move(model)), doc_(doc) {
    if (!doc_.is_null() && !doc_.is_object()) throw parameter_error(model_ + ": parameters must be a JSON object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (doc_.is_null() || !doc_.contains(key)) return;
    try {
      out = doc_.at(key).template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw parameter_error(model_ + ": parameter '" + key + "' has the wrong type");
    }
  }

  template <class T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (doc_.is_null() || !doc_.contains(key)) return;
    try {
      out = doc_.at(key).template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw parameter_error(model_ + ": parameter '" + key + "' has the wrong type");
    }
  }

  void finish() const {
    if (doc_.is_null()) return;
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) throw parameter_error(model_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  std::string model_;
  const json& doc_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline models::discrete_grid_params grid_params_from_json(const json& doc) {
  models::discrete_grid_params p;
  detail::param_reader r("grid", doc);
  r.read("resolution", p.resolution);
  r.read("delta_cost", p.delta_cost);
  r.read("radius", p.radius);
  r.read("epsilon0", p.epsilon0);
  r.read("utility", p.utility);
  r.finish();
  return p;
}

inline models::waste_params waste_params_from_json(const json& doc) {
  models::waste_params p;
  detail::param_reader r("waste", doc);
  r.read("technologies", p.technologies);
  r.read("pollutants", p.pollutants);
  r.read("emissions", p.emissions);
  r.read("revenue", p.revenue);
  r.read("curvature", p.curvature);
  r.read("base_price", p.base_price);
  r.read("price_slope", p.price_slope);
  r.read("radius", p.radius);
  r.read("cost_rate", p.cost_rate);
  r.read("x_max", p.x_max);
  r.finish();
  return p;
}

inline models::telecom_params telecom_params_from_json(const json& doc) {
  models::telecom_params p;
  detail::param_reader r("telecom", doc);
  std::string utility = "linear";
  r.read("links", p.links);
  r.read("paths", p.paths);
  r.read("demand_caps", p.demand_caps);
  r.read("weights", p.weights);
  r.read("utility", utility);
  r.read("link_caps", p.link_caps);
  r.read("link_prices", p.link_prices);
  r.read("budget", p.budget);
  r.read("info_radius", p.info_radius);
  r.read("move_radius", p.move_radius);
  r.read("reconfig_rates", p.reconfig_rates);
  r.read("inner_tol", p.inner_tol);
  r.finish();
  if (utility == "linear") {
    p.utility = models::demand_utility::linear;
  } else if (utility == "log") {
    p.utility = models::demand_utility::logarithmic;
  } else {
    throw parameter_error("telecom: utility must be \"linear\" or \"log\"");
  }
  return p;
}

class unknown_model : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Builds a built-in model by name from an optional parameter object.
inline std::unique_ptr<relative_problem> make_model(const std::string& name, const json& params = json()) {
  auto no_params = [&] {
    if (!params.is_null() && !params.empty()) throw parameter_error(name + ": model takes no parameters");
  };
  if (name == "example31") {
    no_params();
    return models::make_example(models::example_variant::ex31);
  }
  if (name == "example32") {
    no_params();
    return models::make_example(models::example_variant::ex32);
  }
  if (name == "example41") {
    no_params();
    return models::make_example(models::example_variant::ex41);
  }
  if (name == "grid") return models::make_discrete_grid(grid_params_from_json(params));
  if (name == "waste") return models::make_waste_model(waste_params_from_json(params));
  if (name == "telecom") return models::make_telecom_model(telecom_params_from_json(params));
  throw unknown_model("unknown model '" + name + "'");
}

/// Comma-separated coordinates, e.g. "0.25" or "0.1,0.2,0".
inline state_point parse_point(const std::string& csv) {
  std::vector<double> coords;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    std::string token = csv.substr(pos, comma - pos);
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    double v = 0.0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
      throw format_error("cannot parse coordinate '" + token + "'");
    }
    coords.push_back(v);
    pos = comma + 1;
  }
  return state_point(std::move(coords));
}

namespace detail {

inline void write_array(std::ostream& os, const state_point& x) {
  os << '[';
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    if (i) os << ',';
    os << format_double(x.coords[i]);
  }
  os << ']';
}

}  // namespace detail

inline void write_move_line(std::ostream& os, const move_record& m) {
  os << "{\"k\":" << m.step << ",\"from\":";
  detail::write_array(os, m.from);
  os << ",\"to\":";
  detail::write_array(os, m.to);
  os << ",\"f\":" << format_double(m.f_value) << ",\"e\":" << format_double(m.e_value)
     << ",\"b\":" << format_double(m.b_value) << ",\"c\":" << format_double(m.c_value)
     << ",\"u_from\":" << format_double(m.u_from) << ",\"u_to\":" << format_double(m.u_to)
     << ",\"delta\":" << format_double(m.threshold_at_move) << "}\n";
}

inline void write_trajectory(std::ostream& os, const trajectory& t) {
  for (const auto& m : t.moves) write_move_line(os, m);
}

inline const std::vector<std::string>& trajectory_keys() {
  static const std::vector<std::string> keys{"k", "from", "to", "f", "e", "b", "c", "u_from", "u_to", "delta"};
  return keys;
}

/// Parses one trajectory line; rejects missing or extra keys.
inline move_record parse_move_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("trajectory line is not JSON: ") + e.what());
  }
  if (!j.is_object() || j.size() != trajectory_keys().size()) {
    throw format_error("trajectory line must have exactly the documented keys");
  }
  for (const auto& key : trajectory_keys()) {
    if (!j.contains(key)) throw format_error("trajectory line is missing key '" + key + "'");
  }
  try {
    move_record m;
    m.step = j.at("k").get<std::size_t>();
    m.from = state_point(j.at("from").get<std::vector<double>>());
    m.to = state_point(j.at("to").get<std::vector<double>>());
    m.f_value = j.at("f").get<double>();
    m.e_value = j.at("e").get<double>();
    m.b_value = j.at("b").get<double>();
    m.c_value = j.at("c").get<double>();
    m.u_from = j.at("u_from").get<double>();
    m.u_to = j.at("u_to").get<double>();
    m.threshold_at_move = j.at("delta").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("trajectory line has a malformed field: ") + e.what());
  }
}

inline std::vector<move_record> read_trajectory(std::istream& is) {
  std::vector<move_record> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(parse_move_line(line));
  }
  return out;
}

/// Columns k, u, f, b; row k holds u(z^k) and the f, b of the move leaving z^k.
inline void write_csv(std::ostream& os, const trajectory& t) {
  os << "k,u,f,b\n";
  for (const auto& m : t.moves) {
    os << m.step << ',' << format_double(m.u_from) << ',' << format_double(m.f_value) << ','
       << format_double(m.b_value) << '\n';
  }
}

inline json point_json(const state_point& x) { return json(x.coords); }

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json assumptions_json(const assumption_report& a) {
  json j;
  j["sum_b_minus_c_pos"] = a.sum_b_minus_c_pos();
  j["tail_max_b_minus_c"] = a.tail_max_b_minus_c();
  j["tail_max_b"] = a.tail_max_b();
  j["sum_b"] = a.sum_b();
  j["a4pp_violations"] = a.a4pp_violations();
  j["b1_min_offdiag_cost"] = finite_or_null(a.b1_min_offdiag_cost());
  j["triangle_violations"] = a.triangle_violations();
  j["window"] = a.window();
  return j;
}

inline json report_json(const solve_report& r, const boundedness& bounds) {
  json j;
  j["final_state"] = point_json(r.final_state);
  j["final_threshold"] = r.final_threshold;
  j["residual_estimate"] = r.residual_estimate;
  j["termination"] = std::string(to_string(r.path.termination));
  j["moves"] = r.path.moves.size();
  json stat = json::array();
  for (const auto& s : r.path.stationary_points) {
    stat.push_back(json{{"l", s.level}, {"point", point_json(s.point)}, {"delta", s.threshold}});
  }
  j["stationary_points"] = std::move(stat);
  j["cumulative_f"] = r.path.cumulative_estimate();
  j["assumptions"] = assumptions_json(r.assumptions);
  j["boundedness"] = json{{"max_norm", bounds.max_norm}, {"u_min", bounds.u_min}, {"u_max", bounds.u_max}};
  j["seed"] = r.rng_seed;
  j["evaluations"] = r.evaluations_used;
  j["feasibility_violations"] = r.feasibility_violations;
  return j;
}

}  // namespace relopt::io

#endif  // RELOPT_IO_HPP_
