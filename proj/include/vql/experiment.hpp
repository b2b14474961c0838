#pragma once

#include <string>
#include <vector>

#include "vql/ansatz.hpp"
#include "vql/exact.hpp"
#include "vql/tdva.hpp"
#include "vql/trajectory.hpp"
#include "vql/vtc.hpp"

namespace vql {

/// Transverse-field Ising chain sum_i (J Z_i Z_{i+1} + h X_i); periodic
/// boundaries identify site N with site 0, and the N=2 wrap bond coincides
/// with the bulk bond and is counted once.
LindbladModel build_tfi(int n, double j, double h, Boundary boundary);

/// TFI plus lowering jump operators L_i = sqrt(gamma) (X_i - i Y_i)/2 on
/// every site; periodic boundaries.
LindbladModel build_open_tfi(int n, double j, double h, double gamma);

struct ModelConfig {
  int n_spins = 3;
  double coupling_j = 1.0;
  double field_h = 1.0;
  double gamma = 0.0;
  std::string jumps = "none";  // none | lowering
  Boundary boundary = Boundary::periodic;
};

struct AnsatzConfig {
  std::string family = "closed_1";  // closed_1 | closed_2 | open
  int m = 1;
  // optional layer-growth schedule [(switch time, m)], ascending
  std::vector<std::pair<double, int>> m_schedule;
};

struct EvolverSettings {
  std::string kind = "tdva";  // tdva | vtc
  double dt = 0.01;
  double t_max = 1.0;
  bool rk4 = false;  // integrator for the TDVA parameter flow
  RegConfig reg;
  EstimatorConfig est;
  uint64_t seed = 0;
  int expansion_order = 2;         // vtc
  std::string a_method = "trace";  // vtc: purity | trace
  OptimizerConfig optimizer;
  double oracle_substep = -1;  // override for the exact reference RK4
};

struct OutputConfig {
  std::vector<std::string> metrics;  // metric group names
  std::string directory = "out";
  std::string label = "run";
  bool write_files = true;
};

struct ExperimentConfig {
  ModelConfig model;
  AnsatzConfig ansatz;
  EvolverSettings evolver;
  OutputConfig outputs;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  /// Full config with every default materialized, as JSON text.
  std::string materialized() const;
  void validate() const;
};

/// Execute the configured evolution, computing exact-oracle metrics at each
/// record when N <= 6, and write the CSV/JSON outputs.
Trajectory run(const ExperimentConfig& config);

/// Recompute the physical metrics of a persisted trajectory from its theta
/// records; used to verify that emitted rows are reproducible.
Trajectory recompute_metrics(const ExperimentConfig& config,
                             const Trajectory& traj);

/// Exact dynamics only: propagate the configured initial condition and
/// record the oracle metrics over the same time grid, without building or
/// evolving a variational program.
Trajectory run_exact_only(const ExperimentConfig& config);

/// Expand a base config over --vary key=v1,v2,... specs (cartesian product).
std::vector<ExperimentConfig> expand_sweep(
    const ExperimentConfig& base, const std::vector<std::string>& vary_specs);

/// Run a batch concurrently; thread count from the VQL_THREADS environment
/// variable (hardware concurrency when unset).
void run_sweep(const std::vector<ExperimentConfig>& configs);

/// Aggregate the run JSON documents in a directory into per-metric wide CSV
/// tables (one column per run label) for plotting.
void plot_data(const std::string& directory);

}  // namespace vql
