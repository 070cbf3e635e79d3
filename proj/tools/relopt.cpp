// relopt: run threshold/simple descent on a built-in model, evaluate the
// stationarity residual at a point, or audit a model's assumptions.

#include <iostream>

#include <CLI11.hpp>

#include "relopt/cli.hpp"

namespace {

using relopt::cli::json;

json read_params(const std::string& path) {
  if (path.empty()) return json();
  return relopt::cli::load_json_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Descent solvers for relative optimization problems"};
  app.require_subcommand(1);

  relopt::cli::run_config cfg;
  std::string params_path, x0_csv, solver = "tdm", policy = "first", replay_path;

  auto* run = app.add_subcommand("run", "Solve from x0 and write trajectory and summary files");
  run->add_option("--model", cfg.model, "Model name")->check(CLI::IsMember(relopt::io::model_names()));
  run->add_option("--params", params_path, "JSON file with model parameters");
  run->add_option("--solver", solver, "tdm or sdm")->check(CLI::IsMember({"tdm", "sdm"}));
  run->add_option("--x0", x0_csv, "Initial state, comma-separated");
  run->add_option("--delta0", cfg.schedule.delta0, "First threshold");
  run->add_option("--gamma", cfg.schedule.decay, "Threshold decay in (0,1)");
  run->add_option("--delta-min", cfg.schedule.delta_min, "Stop once a search fails below this threshold");
  run->add_option("--samples", cfg.policy.samples_per_round, "Candidates drawn per round");
  run->add_option("--rounds", cfg.policy.rounds_before_stall, "Rounds before a search is declared failed");
  run->add_option("--policy", policy, "first or best")->check(CLI::IsMember({"first", "best"}));
  run->add_option("--max-moves", cfg.budget.max_moves, "Move budget");
  run->add_option("--max-evals", cfg.budget.max_evaluations, "Evaluation budget");
  run->add_option("--seed", cfg.seed, "RNG seed");
  run->add_option("--out", cfg.out_dir, "Output directory");
  run->add_flag("--csv", cfg.write_csv, "Also write trajectory.csv");
  run->add_option("--replay", replay_path, "Re-run the config stored in a summary.json");

  std::string r_model = "example31", r_params, r_at;
  std::size_t r_samples = 4096;
  std::uint64_t r_seed = 1;
  auto* residual = app.add_subcommand("residual", "Print the stationarity residual at a point");
  residual->add_option("--model", r_model, "Model name")->check(CLI::IsMember(relopt::io::model_names()));
  residual->add_option("--params", r_params, "JSON file with model parameters");
  residual->add_option("--at", r_at, "Point, comma-separated")->required();
  residual->add_option("--samples", r_samples, "Random candidates in addition to the grid");
  residual->add_option("--seed", r_seed, "RNG seed");

  std::string c_model = "example31", c_params;
  std::size_t c_samples = 10000;
  std::uint64_t c_seed = 1;
  auto* check = app.add_subcommand("check", "Sampled audit of the model assumptions");
  check->add_option("--model", c_model, "Model name")->check(CLI::IsMember(relopt::io::model_names()));
  check->add_option("--params", c_params, "JSON file with model parameters");
  check->add_option("--samples", c_samples, "Samples per check");
  check->add_option("--seed", c_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : relopt::cli::exit_error;
  }

  try {
    if (*run) {
      if (!replay_path.empty()) {
        const std::string out_dir = cfg.out_dir;
        auto summary = relopt::cli::load_json_file(replay_path);
        if (!summary.contains("config")) throw relopt::cli::config_error(replay_path + " has no config");
        cfg = relopt::cli::config_from_json(summary.at("config"));
        cfg.out_dir = out_dir;
      } else {
        cfg.params = read_params(params_path);
        cfg.solver = solver == "tdm" ? relopt::cli::solver_kind::tdm : relopt::cli::solver_kind::sdm;
        cfg.policy.mode =
            policy == "best" ? relopt::search_mode::best_of_batch : relopt::search_mode::first_improving;
        if (!x0_csv.empty()) cfg.x0 = relopt::io::parse_point(x0_csv);
      }
      return relopt::cli::cmd_run(cfg, std::cout, std::cerr);
    }
    if (*residual) {
      return relopt::cli::cmd_residual(r_model, read_params(r_params), r_at, r_samples, r_seed, std::cout, std::cerr);
    }
    return relopt::cli::cmd_check(c_model, read_params(c_params), c_samples, c_seed, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return relopt::cli::exit_error;
  }
}
