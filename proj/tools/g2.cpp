#include <iostream>

#include <CLI11.hpp>

#include "g2/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic second-grade fluid experiments"};
  g2::CommandLine cl;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("command", cl.command, "selftest | simulate | clt-gap | clt-limit | mdp-check | rate")
      ->required()
      ->check(CLI::IsMember(g2::command_names()));
  app.add_option("--config", cl.config, "YAML run configuration")->required();
  auto* out_opt = app.add_option("--out", out, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "root seed for the noise (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return g2::kExitUsage;
  }
  if (*out_opt) cl.out = out;
  if (*seed_opt) cl.seed = seed;
  return g2::run_command(cl, std::cout, std::cerr);
}
