#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vql/experiment.hpp"

namespace {

int fail(const vql::Error& e) {
  nlohmann::json rec = {
      {"error", {{"code", e.exit_code()}, {"message", e.what()}}}};
  std::cerr << rec.dump() << "\n";
  return e.exit_code();
}

int fail_generic(const std::exception& e) {
  nlohmann::json rec = {{"error", {{"code", 4}, {"message", e.what()}}}};
  std::cerr << rec.dump() << "\n";
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational Lindblad dynamics via Pauli superstates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_dir;
  std::vector<std::string> vary;

  auto* cmd_run = app.add_subcommand("run", "execute one configured run");
  cmd_run->add_option("config", config_path, "JSON config file")->required();

  auto* cmd_sweep =
      app.add_subcommand("sweep", "run a config over --vary key=v1,v2,...");
  cmd_sweep->add_option("config", config_path, "JSON config file")->required();
  cmd_sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable)")
      ->required();

  auto* cmd_oracle =
      app.add_subcommand("oracle", "exact dynamics only (no variational run)");
  cmd_oracle->add_option("config", config_path, "JSON config file")->required();

  auto* cmd_plot =
      app.add_subcommand("plot-data", "aggregate run JSONs into wide CSVs");
  cmd_plot->add_option("dir", data_dir, "directory of run outputs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      vql::run(vql::ExperimentConfig::from_file(config_path));
    } else if (cmd_sweep->parsed()) {
      auto base = vql::ExperimentConfig::from_file(config_path);
      vql::run_sweep(vql::expand_sweep(base, vary));
    } else if (cmd_oracle->parsed()) {
      auto cfg = vql::ExperimentConfig::from_file(config_path);
      // replay only the exact reference: a zero-gate variational program is
      // never touched because every metric that needs it is dropped
      cfg.outputs.metrics = {"autocorrelation", "magnetization", "trace"};
      if (cfg.ansatz.family == "open")
        cfg.outputs.metrics = {"magnetization", "trace"};
      vql::run_exact_only(cfg);
    } else if (cmd_plot->parsed()) {
      vql::plot_data(data_dir);
    }
  } catch (const vql::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail_generic(e);
  }
  return 0;
}
