// tpanet: command-line driver for network descriptions and traces.

#include <iostream>

#include "CLI11.hpp"
#include "tpanet/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Timed port automata networks: check, compose, run and compare"};
  std::string command;
  std::vector<std::string> files;
  tpanet::CommandOptions opts;
  bool machine = false;

  app.add_option("command", command, "check | compose | run | behaviors | equiv | dist")
      ->required()
      ->check(CLI::IsMember({"check", "compose", "run", "behaviors", "equiv", "dist"}));
  app.add_option("files", files, "network description, or two trace files for dist")
      ->required();
  app.add_option("--horizon,-T", opts.horizon, "horizon T in ticks");
  app.add_option("--bound,-L", opts.bound, "input bound L per channel and tick");
  app.add_option("--seed", opts.seed, "seed for run");
  app.add_option("--budget", opts.budget, "exploration budget");
  app.add_option("--net", opts.net, "net or automaton to act on (default: the last net)");
  app.add_flag("--machine", machine, "emit key=value lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto verdict = tpanet::run_command(command, files, opts);
  std::cout << verdict.render(machine);
  return verdict.exit_code;
}
