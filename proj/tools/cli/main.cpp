// bldiff: run differentiator experiments from a JSON configuration.

#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "bldiff/harness/commands.hpp"

namespace h = bldiff::harness;

int main(int argc, char** argv) {
  CLI::App app{"Fixed-time bl-homogeneous differentiators: simulation, sweeps and certificates"};
  app.require_subcommand(1);

  std::string config_path;
  h::Overrides overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  double dt = 0.0, t_final = 0.0, threshold = 0.0;

  using Command = std::function<int(const h::ExperimentConfig&, std::ostream&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"simulate", {"simulate one run and write its trajectory", h::cmd_simulate}},
      {"sweep-ic", {"convergence time over a list of initial errors", h::cmd_sweep_ic}},
      {"sweep-noise", {"steady-state accuracy against the noise amplitude", h::cmd_sweep_noise}},
      {"certify", {"sampled Lyapunov decay certificate and fixed-time bound", h::cmd_certify}},
      {"synth-gains", {"synthesize a certified gain ladder", h::cmd_synth_gains}},
      {"iss-probe", {"boundedness and vanishing-input checks", h::cmd_iss_probe}},
  };

  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "noise seed");
    sub->add_option("--workers", workers, "parallel runs (0 = all cores)");
    sub->add_option("--dt", dt, "integration step")->check(CLI::PositiveNumber);
    sub->add_option("--t-final", t_final, "simulation horizon")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", threshold, "convergence threshold on ||e||")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : h::kValidation;
  }

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) overrides.out_dir = out_dir;
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--workers")) overrides.workers = workers;
  if (sub->count("--dt")) overrides.dt = dt;
  if (sub->count("--t-final")) overrides.t_final = t_final;
  if (sub->count("--threshold")) overrides.threshold = threshold;

  const auto& command = commands.at(sub->get_name()).second;
  return h::guarded(
      [&] { return command(h::load_config(config_path, overrides), std::cout); }, std::cerr);
}
