#include "cmdpal/envs.hpp"
#include "cmdpal/harness.hpp"
#include "cmdpal/lp.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::pair<cmdpal::TabularCmdp, cmdpal::GridGeometry> env_by_id(const std::string& id) {
  if (id == "cliff-world") return cmdpal::cliff_world();
  if (id == "deep-sea-treasure") return cmdpal::deep_sea_treasure();
  throw std::runtime_error("unknown environment id: " + id);
}

int cmd_run(const std::string& config_path) {
  const auto config = cmdpal::ExperimentConfig::from_json(read_file(config_path));
  const auto report = cmdpal::run_experiment(config);

  std::cout << "environment: " << config.environment << "\n"
            << "algorithm:   " << config.algorithm << "\n"
            << "LP optimum:  " << report.v_star << "\n";
  for (const auto& rec : report.runs)
    std::cout << rec.label << "  gap=" << rec.final_gap
              << "  violation=" << rec.final_violation << "\n";
  if (!report.qualifying()) {
    std::cout << "no qualifying configuration (best violation " << report.best_violation
              << " > eps_sel)\n";
    return 2;
  }
  const auto& best = report.runs[report.best_index];
  std::cout << "selected: " << best.label << "  gap=" << best.final_gap
            << "  violation=" << best.final_violation << "\n";
  return 0;
}

int cmd_oracle(const std::string& env_id) {
  auto [cmdp, geo] = env_by_id(env_id);
  const auto lp = cmdpal::solve_occupancy_lp(cmdp);
  std::cout.precision(12);
  std::cout << "V* = " << lp.v_star << "\n";
  for (int i = 0; i < cmdp.num_constraints(); ++i)
    std::cout << "lambda*_" << i << " = " << lp.lambda_star(i)
              << ", zeta_" << i << " = " << cmdpal::slater_margin(cmdp, i) << "\n";
  return 0;
}

int cmd_export(const std::string& env_id) {
  auto [cmdp, geo] = env_by_id(env_id);
  std::cout << geo.ascii_map() << "\n" << cmdpal::cmdp_to_json(cmdp) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained-MDP augmented-Lagrangian solver suite"};
  app.require_subcommand(1);

  std::string config_path, env_id;
  auto* run = app.add_subcommand("run", "run an experiment grid from a JSON config");
  run->add_option("--config", config_path, "config file path")->required();
  auto* oracle = app.add_subcommand("oracle", "print the LP optimum, duals and Slater margins");
  oracle->add_option("--env", env_id, "environment id")->required();
  auto* exp = app.add_subcommand("export-env", "print the ASCII map and CMDP JSON");
  exp->add_option("env", env_id, "environment id")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path);
    if (oracle->parsed()) return cmd_oracle(env_id);
    if (exp->parsed()) return cmd_export(env_id);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
