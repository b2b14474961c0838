#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vql/pauli.hpp"

namespace vql {

/// One time-series record of a run: parameters, norm factor and the metric
/// values computed at that time.
struct TrajectoryRecord {
  double t = 0;
  Eigen::VectorXd theta;
  Complex a{1, 0};
  std::map<std::string, double> metrics;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::string metadata_json;  // materialized config + provenance

  void append(TrajectoryRecord rec);
};

/// Long-format CSV `t,metric,value`, restricted to the given metric names
/// (all metrics when empty).
void write_csv(const Trajectory& traj, const std::string& path,
               const std::vector<std::string>& metrics = {});

/// Full JSON document: metadata plus every record with theta and a.
void write_json(const Trajectory& traj, const std::string& path);
Trajectory read_json(const std::string& path);

}  // namespace vql
