#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "critball/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace critball::cli;
  CLI::App app{"Blow-up analysis of -Laplace u + (a + eps V) u = 3 u^5 on a ball"};
  app.set_version_flag("--version", critball::io::tool_version);
  app.require_subcommand(1);

  Options opt;
  std::optional<double> eps;
  const char* help[] = {
      "Green's function data: phi_a profile, a*, Q_V(0), criticality report",
      "critical coefficient a* for the ball radius",
      "Q_V(0) for the configured a and V",
      "solve a single rung (needs --eps)",
      "solve the eps ladder into a JSON-lines records file",
      "extrapolate the records and judge them against the blow-up laws",
      "bubble-calculus suite: L^q rates, projected-bubble integrals, constants",
      "tabulate a records file"};
  const auto& names = command_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", opt.config, "config JSON (defaults when omitted)");
    sub->add_option("--out", opt.out, "output: records path for sweep, JSON path for solve, file stem otherwise");
    sub->add_option("--tol-override", opt.overrides, "KEY=VAL tolerance override (repeatable)")->take_all();
    sub->add_option("--format", opt.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
    if (names[i] == "solve") sub->add_option("--eps", eps, "perturbation size")->required();
    if (names[i] == "sweep") {
      sub->add_flag("--resume", opt.resume, "keep records of the same config already in the output file");
      sub->add_option("--workers", opt.workers, "concurrent rungs")->check(CLI::Range(1u, 256u));
    }
    if (names[i] == "verify" || names[i] == "report")
      sub->add_option("--records", opt.records, "records file (default: the config's output path)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_validation;
  }
  opt.eps = eps;
  return run(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
