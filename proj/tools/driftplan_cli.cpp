#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "driftplan/harness/commands.hpp"

namespace dh = driftplan::harness;

namespace {

struct Options {
  std::string config;
  std::string out;
  bool plots = false;
  bool seedless = false;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "run configuration (INI)")->required();
  app->add_option("--out", o.out, "output directory, overrides paths.out");
  app->add_flag("--plots", o.plots, "also write SVG figures");
  // Nothing in the tool draws random numbers; the flag only documents that.
  app->add_flag("--seedless", o.seedless, "deterministic run (always the case)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift-capable motion planning on low-friction tracks"};
  app.require_subcommand(1);
  Options opt;

  auto* esm = app.add_subcommand("esm", "equilibrium states manifold");
  esm->require_subcommand(1);
  auto* build = esm->add_subcommand("build", "sweep inputs and write the manifold file");
  auto* show = esm->add_subcommand("show", "summarize an existing manifold file");
  auto* plan = app.add_subcommand("plan", "one search from the configured initial state");
  auto* lap = app.add_subcommand("lap", "receding-horizon run over the configured lap count");
  for (auto* sub : {build, show, plan, lap}) add_common(sub, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dh::kExitConfig;
  }

  try {
    dh::RunConfig cfg = dh::load_run_config(opt.config);
    if (!opt.out.empty()) cfg.out_dir = opt.out;
    if (opt.plots) cfg.plots = true;
    if (build->parsed()) return dh::cmd_esm_build(cfg, std::cout);
    if (show->parsed()) return dh::cmd_esm_show(cfg, std::cout);
    if (plan->parsed()) return dh::cmd_plan(cfg, std::cout);
    return dh::cmd_lap(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dh::exit_code_for(e);
  }
}
