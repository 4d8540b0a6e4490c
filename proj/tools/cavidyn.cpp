// cavidyn - grid-based quantum dynamics of cavity-coupled hydrogen transfer
//
// subcommands: eigen | propagate | sweep | spectrum | analyze

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cavidyn/io.hpp"
#include "cavidyn/propagator.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string output_dir;
  double eta = -1.0;
  int n_molecules = 0;
  double t_final_fs = 0.0;
  bool emit_plot_script = false;
};

void add_common(CLI::App* app, CommonArgs& args) {
  app->add_option("-c,--config", args.config_file, "JSON config file (flat keys)");
  app->add_option("-s,--set", args.overrides, "key=value override, repeatable");
  app->add_option("-o,--output", args.output_dir, "output directory");
  app->add_option("--eta", args.eta, "light-matter coupling strength");
  app->add_option("-N,--n-molecules", args.n_molecules, "ensemble size");
  app->add_option("--t-final", args.t_final_fs, "propagation time in fs");
  app->add_flag("--emit-plot-script", args.emit_plot_script,
                "write a generic plotting script next to the CSVs");
}

cavidyn::io::RunConfig resolve(const CommonArgs& args) {
  auto cfg = args.config_file.empty()
                 ? cavidyn::io::RunConfig()
                 : cavidyn::io::RunConfig::from_file(args.config_file);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("override must look like key=value: " + kv);
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.output_dir.empty()) cfg.set("output.dir", args.output_dir);
  if (args.eta >= 0.0) cfg.set("model.eta", std::to_string(args.eta));
  if (args.n_molecules > 0) cfg.set("model.n_molecules", std::to_string(args.n_molecules));
  if (args.t_final_fs > 0.0) cfg.set("propagation.t_final_fs", std::to_string(args.t_final_fs));
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid-based quantum dynamics of cavity-coupled hydrogen transfer"};
  app.require_subcommand(1);

  CommonArgs eigen_args, prop_args, sweep_args, spec_args, analyze_args;
  std::string analyze_dir = ".";

  auto* eig = app.add_subcommand("eigen", "stationary properties and eigenstates");
  add_common(eig, eigen_args);
  auto* prop = app.add_subcommand("propagate", "real-time trajectory with observables");
  add_common(prop, prop_args);
  auto* sweep = app.add_subcommand("sweep", "independent trajectories over eta or N");
  add_common(sweep, sweep_args);
  auto* spec = app.add_subcommand("spectrum", "autocorrelation density of states");
  add_common(spec, spec_args);
  auto* analyze = app.add_subcommand("analyze", "recompute derived quantities from CSVs");
  add_common(analyze, analyze_args);
  analyze->add_option("dir", analyze_dir, "run directory holding the CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eig->parsed()) {
      auto cfg = resolve(eigen_args);
      const int rc = cavidyn::io::cmd_eigen(cfg);
      if (eigen_args.emit_plot_script) cavidyn::io::emit_plot_script(cfg.output_dir());
      return rc;
    }
    if (prop->parsed()) {
      auto cfg = resolve(prop_args);
      return cavidyn::io::cmd_propagate(cfg);
    }
    if (sweep->parsed()) {
      auto cfg = resolve(sweep_args);
      return cavidyn::io::cmd_sweep(cfg);
    }
    if (spec->parsed()) {
      auto cfg = resolve(spec_args);
      return cavidyn::io::cmd_spectrum(cfg);
    }
    if (analyze->parsed()) {
      auto cfg = resolve(analyze_args);
      return cavidyn::io::cmd_analyze(cfg, analyze_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cavidyn::io::kConfigError;
  } catch (const std::length_error& e) {
    std::cerr << "memory guard: " << e.what() << "\n";
    return cavidyn::io::kMemoryGuard;
  } catch (const cavidyn::propagator::PropagationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return cavidyn::io::kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return cavidyn::io::kNumericalError;
  }
  return cavidyn::io::kOk;
}
