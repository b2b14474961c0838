#include "vql/trajectory.hpp"

#include <fstream>

#include <json.hpp>

#include "vql/errors.hpp"

namespace vql {

using nlohmann::json;

void Trajectory::append(TrajectoryRecord rec) {
  if (!records.empty() && rec.t <= records.back().t)
    throw evolver_error("Trajectory: time stamps must be strictly increasing");
  records.push_back(std::move(rec));
}

void write_csv(const Trajectory& traj, const std::string& path,
               const std::vector<std::string>& metrics) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open for writing: " + path);
  os.precision(17);
  os << "t,metric,value\n";
  for (const auto& rec : traj.records) {
    if (metrics.empty()) {
      for (const auto& [name, value] : rec.metrics)
        os << rec.t << "," << name << "," << value << "\n";
    } else {
      for (const auto& name : metrics) {
        auto it = rec.metrics.find(name);
        if (it != rec.metrics.end())
          os << rec.t << "," << name << "," << it->second << "\n";
      }
    }
  }
}

void write_json(const Trajectory& traj, const std::string& path) {
  json doc;
  doc["metadata"] =
      traj.metadata_json.empty() ? json::object() : json::parse(traj.metadata_json);
  json recs = json::array();
  for (const auto& rec : traj.records) {
    json r;
    r["t"] = rec.t;
    r["a_re"] = rec.a.real();
    r["a_im"] = rec.a.imag();
    r["theta"] = std::vector<double>(rec.theta.data(),
                                     rec.theta.data() + rec.theta.size());
    r["metrics"] = rec.metrics;
    recs.push_back(std::move(r));
  }
  doc["records"] = std::move(recs);
  std::ofstream os(path);
  if (!os) throw config_error("cannot open for writing: " + path);
  os << doc.dump(1) << "\n";
}

Trajectory read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open: " + path);
  json doc = json::parse(is);
  Trajectory traj;
  traj.metadata_json = doc["metadata"].dump();
  for (const auto& r : doc["records"]) {
    TrajectoryRecord rec;
    rec.t = r["t"].get<double>();
    rec.a = Complex(r["a_re"].get<double>(), r["a_im"].get<double>());
    auto th = r["theta"].get<std::vector<double>>();
    rec.theta = Eigen::Map<Eigen::VectorXd>(th.data(), th.size());
    for (auto it = r["metrics"].begin(); it != r["metrics"].end(); ++it)
      rec.metrics[it.key()] = it.value().get<double>();
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace vql
