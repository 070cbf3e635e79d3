#ifndef RELOPT_CLI_HPP_
#define RELOPT_CLI_HPP_

// The commands behind tools/relopt. Each takes explicit streams so the
// commands can be driven from tests without a process boundary.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "relopt/io.hpp"

namespace relopt::cli {

using json = io::json;

enum exit_code : int { exit_converged = 0, exit_error = 1, exit_budget = 2 };

enum class solver_kind { tdm, sdm };

struct run_config {
  std::string model = "example31";
  json params;  // null when the model defaults are used
  solver_kind solver = solver_kind::tdm;
  std::optional<state_point> x0;
  threshold_schedule schedule;
  search_policy policy;
  solve_budget budget;
  std::uint64_t seed = 1;
  std::string out_dir = "relopt-out";
  bool write_csv = false;
};

/// Config-time failures; the message is printed and the command exits 1.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json config_to_json(const run_config& c) {
  json j;
  j["model"] = c.model;
  j["params"] = c.params;
  j["solver"] = c.solver == solver_kind::tdm ? "tdm" : "sdm";
  j["x0"] = c.x0 ? io::point_json(*c.x0) : json(nullptr);
  j["schedule"] = json{{"delta0", c.schedule.delta0}, {"gamma", c.schedule.decay}, {"delta_min", c.schedule.delta_min}};
  j["policy"] = json{{"mode", c.policy.mode == search_mode::first_improving ? "first" : "best"},
                     {"samples", c.policy.samples_per_round},
                     {"rounds", c.policy.rounds_before_stall},
                     {"grid", c.policy.grid_sweep_points}};
  j["budget"] = json{{"max_moves", c.budget.max_moves}, {"max_evaluations", c.budget.max_evaluations}};
  j["seed"] = c.seed;
  j["csv"] = c.write_csv;
  return j;
}

/// Inverse of config_to_json; used to replay a run from its summary.
inline run_config config_from_json(const json& j) {
  try {
    run_config c;
    c.model = j.at("model").get<std::string>();
    c.params = j.value("params", json());
    const auto solver = j.at("solver").get<std::string>();
    if (solver != "tdm" && solver != "sdm") throw config_error("solver must be tdm or sdm");
    c.solver = solver == "tdm" ? solver_kind::tdm : solver_kind::sdm;
    if (j.contains("x0") && !j.at("x0").is_null()) c.x0 = state_point(j.at("x0").get<std::vector<double>>());
    const auto& s = j.at("schedule");
    c.schedule = {s.at("delta0").get<double>(), s.at("gamma").get<double>(), s.at("delta_min").get<double>()};
    const auto& p = j.at("policy");
    c.policy.mode = p.at("mode").get<std::string>() == "best" ? search_mode::best_of_batch : search_mode::first_improving;
    c.policy.samples_per_round = p.at("samples").get<std::size_t>();
    c.policy.rounds_before_stall = p.at("rounds").get<std::size_t>();
    c.policy.grid_sweep_points = p.value("grid", c.policy.grid_sweep_points);
    const auto& b = j.at("budget");
    c.budget = {b.at("max_moves").get<std::size_t>(), b.at("max_evaluations").get<std::size_t>()};
    c.seed = j.at("seed").get<std::uint64_t>();
    c.write_csv = j.value("csv", false);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed run config: ") + e.what());
  }
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(path + " is not valid JSON: " + e.what());
  }
}

struct prepared_model {
  std::unique_ptr<relative_problem> problem;
  state_point x0;
};

namespace detail {

inline std::unique_ptr<relative_problem> build_model(const std::string& name, const json& params) {
  try {
    return io::make_model(name, params);
  } catch (const io::unknown_model& e) {
    throw config_error(e.what());
  } catch (const parameter_error& e) {
    throw config_error(e.what());
  }
}

inline state_point checked_point(const relative_problem& problem, state_point x, const char* what) {
  if (x.dimension() != problem.dimension()) {
    throw config_error(std::string(what) + " has dimension " + std::to_string(x.dimension()) + ", model " +
                       problem.name() + " expects " + std::to_string(problem.dimension()));
  }
  if (!x.is_finite() || !problem.state_contains(x)) throw config_error(std::string(what) + " not in X");
  return x;
}

class output_file {
 public:
  explicit output_file(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw config_error("cannot write " + path.string());
  }
  std::ostream& stream() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw config_error("cannot write " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace detail

inline prepared_model prepare(const run_config& c) {
  prepared_model pm;
  pm.problem = detail::build_model(c.model, c.params);
  pm.x0 = detail::checked_point(*pm.problem, c.x0.value_or(pm.problem->default_initial()), "x0");
  return pm;
}

inline int exit_for(termination_reason t) {
  return t == termination_reason::budget_exhausted ? exit_budget : exit_converged;
}

/// Runs one solve and writes trajectory.jsonl, summary.json and optionally
/// trajectory.csv into c.out_dir.
inline int cmd_run(const run_config& c, std::ostream& out, std::ostream& err) {
  try {
    auto pm = prepare(c);
    try {
      c.schedule.validate();
      c.policy.validate();
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }

    std::filesystem::path dir(c.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw config_error("cannot write " + dir.string() + ": " + ec.message());
    // Open everything before solving so an unwritable path fails fast.
    detail::output_file traj(dir / "trajectory.jsonl");
    detail::output_file summary(dir / "summary.json");
    std::optional<detail::output_file> csv;
    if (c.write_csv) csv.emplace(dir / "trajectory.csv");

    solve_report r = c.solver == solver_kind::tdm
                         ? tdm_solve(*pm.problem, pm.x0, c.schedule, c.policy, c.budget, c.seed)
                         : sdm_solve(*pm.problem, pm.x0, c.policy, c.budget, c.seed);

    io::write_trajectory(traj.stream(), r.path);
    traj.close();
    if (csv) {
      io::write_csv(csv->stream(), r.path);
      csv->close();
    }
    json s;
    s["model"] = pm.problem->name();
    s["solver"] = c.solver == solver_kind::tdm ? "tdm" : "sdm";
    const json report = io::report_json(r, boundedness_monitor(*pm.problem, r.path));
    for (const auto& [k, v] : report.items()) s[k] = v;
    s["config"] = config_to_json(c);
    summary.stream() << s.dump(2) << '\n';
    summary.close();

    out << "termination: " << to_string(r.path.termination) << "\n"
        << "moves: " << r.path.moves.size() << "\n"
        << "final_state: " << to_string(r.final_state) << "\n"
        << "residual_estimate: " << std::setprecision(12) << r.residual_estimate << "\n";
    return exit_for(r.path.termination);
  } catch (const config_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  } catch (const model_fault& e) {
    err << "model fault: " << e.what() << '\n';
    return exit_error;
  }
}

/// Prints the stationarity residual at `at` with 12 significant digits.
inline int cmd_residual(const std::string& model, const json& params, const std::string& at, std::size_t samples,
                        std::uint64_t seed, std::ostream& out, std::ostream& err) {
  try {
    auto problem = detail::build_model(model, params);
    state_point x;
    try {
      x = io::parse_point(at);
    } catch (const io::format_error& e) {
      throw config_error(e.what());
    }
    x = detail::checked_point(*problem, std::move(x), "point");
    if (samples == 0) throw config_error("samples must be positive");
    rng_type rng(seed);
    out << std::setprecision(12) << stationarity_residual(*problem, x, samples, rng) << '\n';
    return exit_converged;
  } catch (const config_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  } catch (const model_fault& e) {
    err << "model fault: " << e.what() << '\n';
    return exit_error;
  }
}

/// Sampled assumption audit. Always exits 0 once the model is built.
inline int cmd_check(const std::string& model, const json& params, std::size_t samples, std::uint64_t seed,
                     std::ostream& out, std::ostream& err) {
  std::unique_ptr<relative_problem> problem;
  try {
    problem = detail::build_model(model, params);
  } catch (const config_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
  if (samples == 0) samples = 1;
  const auto a = audit_assumptions(*problem, samples, seed);
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

  out << "model: " << problem->name() << "  samples: " << samples << "  seed: " << seed << '\n';
  out << "A1 base (x in D(x), c(x,x) = 0): " << verdict(a.base_ok) << " (" << a.base_failures << " failures)\n";
  out << "B1 cost floor: ";
  if (a.b1.pairs_checked == 0) {
    out << "NA (no distinct pairs, holds vacuously)\n";
  } else {
    out << verdict(a.b1.holds) << " min_cost=" << io::format_double(a.b1.min_cost) << " declared_delta="
        << (a.declared_cost_floor ? io::format_double(*a.declared_cost_floor) : std::string("none"))
        << " pairs=" << a.b1.pairs_checked << (a.b1.exhaustive ? " (exhaustive)" : "") << '\n';
  }
  out << "C3 triangle inequality: " << verdict(a.triangle_violations == 0) << ' ' << a.triangle_violations
      << " violations / " << a.triangle_triples << " triples\n";
  out << "A4'' b <= c: " << verdict(a.a4pp.violations == 0) << ' ' << a.a4pp.violations << " violations / "
      << a.a4pp.pairs << " pairs (max b - c = " << io::format_double(a.a4pp.max_b_minus_c) << ")\n";
  return exit_converged;
}

}  // namespace relopt::cli

#endif  // RELOPT_CLI_HPP_
