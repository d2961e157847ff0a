#include <CLI11.hpp>

#include "commands.hpp"

using namespace immunokinetics::cli;

int main(int argc, char** argv) {
  CLI::App app{"Immunity-structured SIRS simulations"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run one model and write CSV output");
  simulate->add_option("--config", sim.config, "scenario file")->required();
  simulate->add_option("--model", sim.model, "m1, m2, mol, sirs-dde or sis-dde")
      ->required()
      ->check(CLI::IsMember({"m1", "m2", "mol", "sirs-dde", "sis-dde"}));
  simulate->add_option("--out", sim.out, "output directory")->required();
  simulate->add_option("--dt", sim.dt, "time step");
  simulate->add_option("--grid-cells", sim.grid_cells, "immunity cells (m1, m2)");
  simulate->add_option("--t-end", sim.t_end, "final time");

  std::string config, pair, out;
  auto* compare = app.add_subcommand("compare", "cross-check two models");
  compare->add_option("--config", config, "scenario file")->required();
  compare->add_option("--pair", pair, "comparison to run")
      ->required()
      ->check(CLI::IsMember({"m1-vs-sirs-dde", "m2-vs-oracle", "m2-vs-sis-dde", "mol-theta0-vs-m2"}));
  compare->add_option("--out", out, "output directory")->required();

  auto* equilibria = app.add_subcommand("equilibria", "disease-free equilibrium report");
  equilibria->add_option("--config", config, "scenario file")->required();

  std::optional<unsigned long long> seed;
  auto* check = app.add_subcommand("check-operator", "finite-difference check of DQ");
  check->add_option("--config", config, "scenario file")->required();
  check->add_option("--seed", seed, "random seed (default run.seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (*simulate) return guarded([&] { return cmd_simulate(sim); });
  if (*compare) return guarded([&] { return cmd_compare(config, pair, out); });
  if (*equilibria) return guarded([&] { return cmd_equilibria(config); });
  return guarded([&] { return cmd_check_operator(config, seed); });
}
