#include "vql/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

namespace vql {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t step) {
  uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + step);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::string> default_metrics(const std::string& family) {
  if (family == "open")
    return {"magnetization", "state_infidelity", "purity", "trace",
            "diagnostics"};
  return {"autocorrelation", "infidelity", "diagnostics"};
}

// The experiment context shared by run() and recompute_metrics().
struct RunContext {
  ExperimentConfig cfg;
  LindbladModel model;
  CompiledLiouvillian lv;
  Picture picture;
  SuperState initial;      // unit-norm reference at t=0
  int observable_site = 1; // closed runs: O(0) = sigma_site^y
  std::set<std::string> groups;

  bool closed() const { return cfg.ansatz.family != "open"; }
};

RunContext make_context(const ExperimentConfig& cfg) {
  cfg.validate();
  RunContext ctx;
  ctx.cfg = cfg;
  ctx.model = build_tfi(cfg.model.n_spins, cfg.model.coupling_j,
                        cfg.model.field_h, cfg.model.boundary);
  if (cfg.model.jumps == "lowering") {
    LindbladModel open = build_open_tfi(cfg.model.n_spins, cfg.model.coupling_j,
                                        cfg.model.field_h, cfg.model.gamma);
    ctx.model.jumps = open.jumps;
    ctx.model.boundary = cfg.model.boundary;
  }
  ctx.picture = ctx.cfg.ansatz.family == "open" ? Picture::schroedinger
                                                : Picture::heisenberg;
  ctx.lv = compile(ctx.model, ctx.picture);

  const int n = cfg.model.n_spins;
  if (ctx.closed()) {
    ctx.observable_site = std::min(1, n - 1);
    Eigen::MatrixXcd o =
        to_dense(PauliString::single(n, ctx.observable_site, Pauli::Y));
    SuperState s = vectorize(o);
    s.amps /= s.amps.norm();  // unit Hilbert-Schmidt norm at t = 0
    ctx.initial = s;
  } else {
    const int64_t hdim = int64_t{1} << n;
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(hdim, hdim);
    rho0(0, 0) = 1.0;  // all spins in |0>
    ctx.initial = vectorize(rho0);
  }
  for (const auto& g : cfg.outputs.metrics) ctx.groups.insert(g);
  return ctx;
}

AnsatzProgram build_program(const RunContext& ctx, int m) {
  if (ctx.cfg.ansatz.family == "closed_1")
    return build_closed(ctx.lv, m, false, ctx.initial);
  if (ctx.cfg.ansatz.family == "closed_2")
    return build_closed(ctx.lv, m, true, ctx.initial);
  return build_open(ctx.lv, m, ctx.initial);
}

// Map the parameters of `old_prog` into `new_prog` (layers appended at zero
// angles; a fresh free factor starts at (1, 0)).
Eigen::VectorXd pad_theta(const AnsatzProgram& old_prog,
                          const AnsatzProgram& new_prog,
                          const Eigen::VectorXd& theta_old) {
  Eigen::VectorXd theta = new_prog.initial_theta();
  const int old_gate = old_prog.n_gate_params();
  theta.head(old_gate) = theta_old.head(old_gate);
  if (old_prog.has_free_factor && new_prog.has_free_factor) {
    theta[new_prog.n_params - 2] = theta_old[old_prog.n_params - 2];
    theta[new_prog.n_params - 1] = theta_old[old_prog.n_params - 1];
  }
  return theta;
}

void record_metrics(const RunContext& ctx, const AnsatzProgram& prog,
                    const Eigen::VectorXd& theta, Complex a_override,
                    bool use_override, const SuperState& exact,
                    TrajectoryRecord& rec) {
  SuperState trial = apply(prog, theta);
  if (use_override) trial.a = a_override;
  rec.a = trial.a;

  auto want = [&](const std::string& g) { return ctx.groups.count(g) > 0; };
  if (want("autocorrelation")) {
    Complex c = autocorrelation(ctx.initial, trial);
    Complex ce = autocorrelation(ctx.initial, exact);
    rec.metrics["C_re"] = c.real();
    rec.metrics["C_im"] = c.imag();
    rec.metrics["C_exact_re"] = ce.real();
    rec.metrics["C_exact_im"] = ce.imag();
    rec.metrics["C_abs_err"] = std::abs(ce - c);
  }
  if (want("infidelity")) {
    SuperState exact_unit = exact;
    const double n = std::abs(exact_unit.a) * exact_unit.amps.norm();
    exact_unit.a /= n;
    rec.metrics["infidelity"] = 1.0 - superstate_fidelity(exact_unit, trial);
  }
  if (want("magnetization")) {
    rec.metrics["m_z1"] = magnetization(trial, ctx.observable_site);
    rec.metrics["m_z1_exact"] = magnetization(exact, ctx.observable_site);
  }
  if (want("state_infidelity")) {
    Eigen::MatrixXcd rho_exact = devectorize(exact);
    Eigen::MatrixXcd rho_trial = devectorize(trial);
    rec.metrics["state_infidelity"] =
        1.0 - state_fidelity_uhlmann(rho_exact, rho_trial);
  }
  if (want("purity")) rec.metrics["purity"] = purity(trial);
  if (want("trace")) {
    Complex tr = trace_of(trial);
    rec.metrics["trace_re"] = tr.real();
    rec.metrics["trace_im"] = tr.imag();
  }
}

void write_outputs(const RunContext& ctx, const Trajectory& traj) {
  if (!ctx.cfg.outputs.write_files) return;
  fs::create_directories(ctx.cfg.outputs.directory);
  const std::string base =
      (fs::path(ctx.cfg.outputs.directory) / ctx.cfg.outputs.label).string();

  static const std::map<std::string, std::vector<std::string>> kGroups = {
      {"autocorrelation",
       {"C_re", "C_im", "C_exact_re", "C_exact_im", "C_abs_err"}},
      {"infidelity", {"infidelity"}},
      {"magnetization", {"m_z1", "m_z1_exact"}},
      {"state_infidelity", {"state_infidelity"}},
      {"purity", {"purity"}},
      {"trace", {"trace_re", "trace_im"}},
      {"diagnostics",
       {"lambda", "rank", "residual", "theta_dot_norm", "cond", "iterations",
        "cost", "step_norm"}},
  };
  for (const auto& g : ctx.groups) {
    auto it = kGroups.find(g);
    if (it == kGroups.end()) continue;
    write_csv(traj, base + "_" + g + ".csv", it->second);
  }
  write_json(traj, base + ".json");
}

}  // namespace

LindbladModel build_tfi(int n, double j, double h, Boundary boundary) {
  if (n < 1) throw config_error("build_tfi: n must be >= 1");
  LindbladModel model;
  model.n_spins = n;
  model.boundary = boundary;
  PauliSum ham(n);
  // field terms first: the leading commuting group of the compiled
  // Liouvillian is then the field group
  for (int i = 0; i < n; ++i)
    ham.add(Complex(h, 0), PauliString::single(n, i, Pauli::X));
  std::set<std::pair<int, int>> bonds;
  const int last = boundary == Boundary::periodic ? n : n - 1;
  for (int i = 0; i < last; ++i) {
    int a = i, b = (i + 1) % n;
    if (a == b) continue;  // n = 1 wrap
    bonds.insert({std::min(a, b), std::max(a, b)});
  }
  for (const auto& [a, b] : bonds) {
    PauliString zz(n);
    zz.set(a, Pauli::Z);
    zz.set(b, Pauli::Z);
    ham.add(Complex(j, 0), zz);
  }
  model.hamiltonian = ham.canonicalize();
  return model;
}

LindbladModel build_open_tfi(int n, double j, double h, double gamma) {
  if (gamma < 0) throw config_error("build_open_tfi: gamma must be >= 0");
  LindbladModel model = build_tfi(n, j, h, Boundary::periodic);
  if (gamma == 0) return model;
  const double root = std::sqrt(gamma);
  for (int i = 0; i < n; ++i) {
    PauliSum lower(n);
    lower.add(Complex(0.5 * root, 0), PauliString::single(n, i, Pauli::X));
    lower.add(Complex(0, -0.5 * root), PauliString::single(n, i, Pauli::Y));
    model.jumps.push_back(lower.canonicalize());
  }
  return model;
}

void ExperimentConfig::validate() const {
  if (model.n_spins < 1) throw config_error("config: n_spins must be >= 1");
  if (model.n_spins > 6)
    throw size_cap_error("config: desk-scale cap is N <= 6 physical spins");
  if (evolver.dt <= 0) throw config_error("config: dt must be > 0");
  if (evolver.t_max <= 0) throw config_error("config: t_max must be > 0");
  if (ansatz.m < 1) throw config_error("config: m must be >= 1");
  if (ansatz.family != "closed_1" && ansatz.family != "closed_2" &&
      ansatz.family != "open")
    throw config_error("config: unknown ansatz family " + ansatz.family);
  if (evolver.kind != "tdva" && evolver.kind != "vtc")
    throw config_error("config: unknown evolver " + evolver.kind);
  if (ansatz.family == "open" && model.jumps == "none" && model.gamma != 0)
    throw config_error("config: gamma set but jumps are none");
  if (model.jumps != "none" && model.jumps != "lowering")
    throw config_error("config: unknown jump kind " + model.jumps);
  if (outputs.metrics.empty())
    throw config_error("config: metrics list must be nonempty");
  if (evolver.a_method != "purity" && evolver.a_method != "trace")
    throw config_error("config: a_method must be purity or trace");
  for (size_t i = 1; i < ansatz.m_schedule.size(); ++i)
    if (ansatz.m_schedule[i].first <= ansatz.m_schedule[i - 1].first)
      throw config_error("config: m_schedule times must be ascending");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    const json model = doc.value("model", json::object());
    cfg.model.n_spins = model.value("n_spins", 3);
    cfg.model.coupling_j = model.value("J", 1.0);
    cfg.model.field_h = model.value("h", cfg.model.coupling_j);
    cfg.model.gamma = model.value("gamma", 0.0);
    cfg.model.jumps = model.value("jumps", cfg.model.gamma > 0 ? "lowering"
                                                               : "none");
    cfg.model.boundary = model.value("boundary", "periodic") == "open"
                             ? Boundary::open
                             : Boundary::periodic;

    const json ansatz = doc.value("ansatz", json::object());
    cfg.ansatz.family = ansatz.value("family", "closed_1");
    cfg.ansatz.m = ansatz.value("m", 1);
    if (ansatz.contains("m_schedule"))
      for (const auto& entry : ansatz["m_schedule"])
        cfg.ansatz.m_schedule.emplace_back(entry.at(0).get<double>(),
                                           entry.at(1).get<int>());

    const json ev = doc.value("evolver", json::object());
    cfg.evolver.kind = ev.value("kind", "tdva");
    cfg.evolver.dt = ev.value("dt", cfg.evolver.kind == "vtc" ? 0.05 : 0.01);
    cfg.evolver.t_max = ev.value("t_max", 1.0);
    cfg.evolver.rk4 = ev.value("integrator", "euler") == "rk4";
    cfg.evolver.seed = ev.value("seed", uint64_t{0});
    cfg.evolver.expansion_order = ev.value("expansion_order", 2);
    cfg.evolver.a_method = ev.value("a_method", "trace");
    cfg.evolver.oracle_substep = ev.value("oracle_substep", -1.0);

    const json est = ev.value("estimator", json::object());
    cfg.evolver.est.mode = est.value("mode", "exact") == "sampled"
                               ? EstimatorConfig::Mode::sampled
                               : EstimatorConfig::Mode::exact;
    cfg.evolver.est.shots = est.value("shots", int64_t{1024});
    cfg.evolver.est.seed = cfg.evolver.seed;

    const json reg = ev.value("regularization", json::object());
    const std::string method = reg.value("method", "tikhonov");
    if (method == "tikhonov")
      cfg.evolver.reg.method = RegConfig::Method::tikhonov;
    else if (method == "tsvd")
      cfg.evolver.reg.method = RegConfig::Method::tsvd;
    else if (method == "plain_lstsq")
      cfg.evolver.reg.method = RegConfig::Method::plain_lstsq;
    else
      throw config_error("config: unknown regularization method " + method);
    cfg.evolver.reg.use_lcurve =
        reg.value("lcurve", cfg.evolver.est.mode == EstimatorConfig::Mode::sampled);
    cfg.evolver.reg.lambda = reg.value("lambda", 1e-6);
    cfg.evolver.reg.lambda_min = reg.value("lambda_min", 1e-8);
    cfg.evolver.reg.lambda_max = reg.value("lambda_max", 1.0);
    cfg.evolver.reg.grid_points = reg.value("grid_points", 25);
    cfg.evolver.reg.bound_factor = reg.value("bound_factor", 10.0);
    cfg.evolver.reg.tsvd_rank = reg.value("tsvd_rank", 0);

    const json opt = ev.value("optimizer", json::object());
    cfg.evolver.optimizer.max_iterations = opt.value("max_iterations", 200);
    cfg.evolver.optimizer.gradient_step = opt.value("gradient_step", 1e-6);
    cfg.evolver.optimizer.tolerance = opt.value("tolerance", 1e-12);
    cfg.evolver.optimizer.bounded = opt.value("bounded", false);

    const json out = doc.value("outputs", json::object());
    cfg.outputs.directory = out.value("directory", "out");
    cfg.outputs.label = out.value("label", "run");
    if (out.contains("metrics"))
      cfg.outputs.metrics = out["metrics"].get<std::vector<std::string>>();
    else
      cfg.outputs.metrics = default_metrics(cfg.ansatz.family);
  } catch (const json::exception& e) {
    throw config_error(std::string("config field error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string ExperimentConfig::materialized() const {
  json doc;
  doc["model"] = {
      {"n_spins", model.n_spins},
      {"J", model.coupling_j},
      {"h", model.field_h},
      {"gamma", model.gamma},
      {"jumps", model.jumps},
      {"boundary", model.boundary == Boundary::open ? "open" : "periodic"}};
  json schedule = json::array();
  for (const auto& [t, m] : ansatz.m_schedule) schedule.push_back({t, m});
  doc["ansatz"] = {
      {"family", ansatz.family}, {"m", ansatz.m}, {"m_schedule", schedule}};
  std::string method = "tikhonov";
  if (evolver.reg.method == RegConfig::Method::tsvd) method = "tsvd";
  if (evolver.reg.method == RegConfig::Method::plain_lstsq)
    method = "plain_lstsq";
  doc["evolver"] = {
      {"kind", evolver.kind},
      {"dt", evolver.dt},
      {"t_max", evolver.t_max},
      {"integrator", evolver.rk4 ? "rk4" : "euler"},
      {"seed", evolver.seed},
      {"expansion_order", evolver.expansion_order},
      {"a_method", evolver.a_method},
      {"oracle_substep", evolver.oracle_substep},
      {"regularization",
       {{"method", method},
        {"lcurve", evolver.reg.use_lcurve},
        {"lambda", evolver.reg.lambda},
        {"lambda_min", evolver.reg.lambda_min},
        {"lambda_max", evolver.reg.lambda_max},
        {"grid_points", evolver.reg.grid_points},
        {"bound_factor", evolver.reg.bound_factor},
        {"tsvd_rank", evolver.reg.tsvd_rank}}},
      {"estimator",
       {{"mode",
         evolver.est.mode == EstimatorConfig::Mode::sampled ? "sampled"
                                                            : "exact"},
        {"shots", evolver.est.shots}}},
      {"optimizer",
       {{"max_iterations", evolver.optimizer.max_iterations},
        {"gradient_step", evolver.optimizer.gradient_step},
        {"tolerance", evolver.optimizer.tolerance},
        {"bounded", evolver.optimizer.bounded}}}};
  doc["outputs"] = {{"metrics", outputs.metrics},
                    {"directory", outputs.directory},
                    {"label", outputs.label}};
  return doc.dump(1);
}

Trajectory run(const ExperimentConfig& config) {
  RunContext ctx = make_context(config);
  const auto& ev = config.evolver;

  int current_m = config.ansatz.m;
  size_t schedule_pos = 0;
  if (!config.ansatz.m_schedule.empty() &&
      config.ansatz.m_schedule.front().first <= 0) {
    current_m = config.ansatz.m_schedule.front().second;
    schedule_pos = 1;
  }
  AnsatzProgram prog = build_program(ctx, current_m);
  Eigen::VectorXd theta = prog.initial_theta();

  double substep = ev.oracle_substep;
  if (substep <= 0)
    substep = std::min(ev.dt / 10.0,
                       1e-3 / std::max(std::abs(config.model.coupling_j), 1e-12));
  ExactPropagator oracle(ctx.lv.total(), ctx.initial, substep);

  VtcProblem vtc_prob;
  vtc_prob.dt = ev.dt;
  vtc_prob.n_expansion = ev.expansion_order;
  vtc_prob.a_method = ev.a_method == "purity" ? VtcProblem::AMethod::purity
                                              : VtcProblem::AMethod::trace;
  vtc_prob.optimizer = ev.optimizer;

  const bool is_vtc = ev.kind == "vtc";
  const bool dissipative = ctx.lv.dissipative();
  Complex a_tracked(1, 0);
  bool track_a = is_vtc && dissipative;

  Trajectory traj;
  traj.metadata_json = config.materialized();

  const int n_steps = static_cast<int>(std::llround(ev.t_max / ev.dt));
  std::map<std::string, double> step_diag;
  for (int k = 0; k <= n_steps; ++k) {
    const double t = k * ev.dt;

    // layer-growth switchover: enlarge the ansatz, map parameters across,
    // then re-match the current state with a compression step
    if (schedule_pos < config.ansatz.m_schedule.size() &&
        t >= config.ansatz.m_schedule[schedule_pos].first - 1e-12) {
      const int new_m = config.ansatz.m_schedule[schedule_pos].second;
      ++schedule_pos;
      if (new_m != current_m) {
        SuperState old_state = apply(prog, theta);
        AnsatzProgram new_prog = build_program(ctx, new_m);
        Eigen::VectorXd warm = pad_theta(prog, new_prog, theta);
        const int ng = new_prog.n_gate_params();
        Eigen::VectorXd warm_gate = warm.head(ng);
        auto cost = [&](const Eigen::VectorXd& gate_theta) {
          Eigen::VectorXd full = warm;
          full.head(ng) = gate_theta;
          SuperState s = apply(new_prog, full);
          return 1.0 - std::norm(s.amps.dot(old_state.amps));
        };
        MinimizeResult mres = minimize(cost, warm_gate, ev.optimizer);
        warm.head(ng) = mres.x;
        prog = std::move(new_prog);
        theta = warm;
        current_m = new_m;
      }
    }

    TrajectoryRecord rec;
    rec.t = t;
    rec.theta = theta;
    record_metrics(ctx, prog, theta, a_tracked, track_a, oracle.state(), rec);
    if (ctx.groups.count("diagnostics"))
      for (const auto& [name, value] : step_diag) rec.metrics[name] = value;
    traj.records.push_back(std::move(rec));

    if (k == n_steps) break;

    EstimatorConfig est = ev.est;
    est.seed = mix_seed(ev.seed, static_cast<uint64_t>(k));
    try {
      if (is_vtc) {
        VtcStepResult res = vtc_step(prog, theta, ctx.lv, vtc_prob);
        if (track_a) {
          if (vtc_prob.a_method == VtcProblem::AMethod::purity) {
            a_tracked /= res.a_ratio;
          } else {
            a_tracked = a_from_trace(apply(prog, res.theta));
          }
          if (prog.has_free_factor) {
            // keep the program's factor parameters aligned with the
            // recovered norm factor so apply() reproduces the full state
            double implied_re = res.theta[prog.n_params - 2];
            double implied_im = res.theta[prog.n_params - 1];
            Complex circuit_a =
                apply(prog, res.theta).a /
                Complex(implied_re, implied_im);
            Complex free = a_tracked / circuit_a;
            res.theta[prog.n_params - 2] = free.real();
            res.theta[prog.n_params - 1] = free.imag();
          }
        }
        step_diag = {{"iterations", static_cast<double>(res.iterations)},
                     {"cost", res.cost},
                     {"step_norm", (res.theta - theta).norm()}};
        theta = res.theta;
      } else {
        TdvaStepResult res =
            tdva_step(prog, theta, ctx.lv.total(), ev.dt, ev.reg, est, ev.rk4);
        step_diag = {{"lambda", res.diag.lambda},
                     {"rank", static_cast<double>(res.diag.rank)},
                     {"residual", res.diag.residual},
                     {"theta_dot_norm", res.diag.theta_dot_norm},
                     {"cond", res.diag.cond}};
        theta = res.theta;
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw evolver_error(std::string("evolver failure at t=") +
                          std::to_string(t) + ": " + e.what());
    }
    oracle.advance(ev.dt);
  }

  write_outputs(ctx, traj);
  return traj;
}

Trajectory run_exact_only(const ExperimentConfig& config) {
  RunContext ctx = make_context(config);
  const auto& ev = config.evolver;
  double substep = ev.oracle_substep;
  if (substep <= 0)
    substep = std::min(ev.dt / 10.0,
                       1e-3 / std::max(std::abs(config.model.coupling_j), 1e-12));
  ExactPropagator oracle(ctx.lv.total(), ctx.initial, substep);

  Trajectory traj;
  traj.metadata_json = config.materialized();
  const int n_steps = static_cast<int>(std::llround(ev.t_max / ev.dt));
  for (int k = 0; k <= n_steps; ++k) {
    TrajectoryRecord rec;
    rec.t = k * ev.dt;
    rec.theta.resize(0);
    const SuperState& s = oracle.state();
    rec.a = s.a;
    if (ctx.groups.count("autocorrelation")) {
      Complex ce = autocorrelation(ctx.initial, s);
      rec.metrics["C_exact_re"] = ce.real();
      rec.metrics["C_exact_im"] = ce.imag();
    }
    if (ctx.groups.count("magnetization"))
      rec.metrics["m_z1_exact"] = magnetization(s, ctx.observable_site);
    if (ctx.groups.count("trace")) {
      Complex tr = trace_of(s);
      rec.metrics["trace_re"] = tr.real();
      rec.metrics["trace_im"] = tr.imag();
    }
    if (ctx.groups.count("purity")) rec.metrics["purity"] = purity(s);
    traj.records.push_back(std::move(rec));
    if (k < n_steps) oracle.advance(ev.dt);
  }
  write_outputs(ctx, traj);
  return traj;
}

Trajectory recompute_metrics(const ExperimentConfig& config,
                             const Trajectory& traj) {
  RunContext ctx = make_context(config);
  double substep = config.evolver.oracle_substep;
  if (substep <= 0)
    substep = std::min(
        config.evolver.dt / 10.0,
        1e-3 / std::max(std::abs(config.model.coupling_j), 1e-12));
  ExactPropagator oracle(ctx.lv.total(), ctx.initial, substep);

  int current_m = config.ansatz.m;
  size_t schedule_pos = 0;
  if (!config.ansatz.m_schedule.empty() &&
      config.ansatz.m_schedule.front().first <= 0) {
    current_m = config.ansatz.m_schedule.front().second;
    schedule_pos = 1;
  }
  AnsatzProgram prog = build_program(ctx, current_m);

  const bool track_a =
      config.evolver.kind == "vtc" && ctx.lv.dissipative();
  Trajectory out;
  out.metadata_json = traj.metadata_json;
  double prev_t = 0;
  for (const auto& rec : traj.records) {
    if (schedule_pos < config.ansatz.m_schedule.size() &&
        rec.t >= config.ansatz.m_schedule[schedule_pos].first - 1e-12) {
      current_m = config.ansatz.m_schedule[schedule_pos].second;
      ++schedule_pos;
      prog = build_program(ctx, current_m);
    }
    oracle.advance(rec.t - prev_t);
    prev_t = rec.t;
    TrajectoryRecord nr;
    nr.t = rec.t;
    nr.theta = rec.theta;
    record_metrics(ctx, prog, rec.theta, rec.a, track_a, oracle.state(), nr);
    out.records.push_back(std::move(nr));
  }
  return out;
}

std::vector<ExperimentConfig> expand_sweep(
    const ExperimentConfig& base, const std::vector<std::string>& vary_specs) {
  struct Axis {
    std::string key;
    std::vector<json> values;
  };
  std::vector<Axis> axes;
  for (const auto& spec : vary_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw config_error("--vary expects key=v1,v2,...  got: " + spec);
    Axis axis;
    axis.key = spec.substr(0, eq);
    std::string rest = spec.substr(eq + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      auto comma = rest.find(',', pos);
      std::string tok = rest.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (tok.empty()) throw config_error("--vary: empty value in " + spec);
      try {
        axis.values.push_back(json::parse(tok));
      } catch (const json::exception&) {
        axis.values.push_back(json(tok));  // bare string value
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (axis.values.empty())
      throw config_error("--vary: no values in " + spec);
    axes.push_back(std::move(axis));
  }

  json base_doc = json::parse(base.materialized());
  std::vector<ExperimentConfig> out;
  std::vector<size_t> idx(axes.size(), 0);
  while (true) {
    json doc = base_doc;
    std::string suffix;
    for (size_t a = 0; a < axes.size(); ++a) {
      json* node = &doc;
      std::string key = axes[a].key;
      size_t pos = 0;
      while (true) {
        auto dot = key.find('.', pos);
        std::string part =
            key.substr(pos, dot == std::string::npos ? std::string::npos
                                                     : dot - pos);
        if (dot == std::string::npos) {
          (*node)[part] = axes[a].values[idx[a]];
          break;
        }
        node = &(*node)[part];
        pos = dot + 1;
      }
      std::string vs = axes[a].values[idx[a]].dump();
      std::erase(vs, '"');
      suffix += "_" + key + "=" + vs;
    }
    doc["outputs"]["label"] =
        base.outputs.label + suffix;
    out.push_back(ExperimentConfig::from_json_text(doc.dump()));

    size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
    }
    if (a == axes.size()) break;
    if (axes.empty()) break;
  }
  if (axes.empty()) out = {base};
  return out;
}

void run_sweep(const std::vector<ExperimentConfig>& configs) {
  unsigned n_threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("VQL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) n_threads = static_cast<unsigned>(v);
  }
  n_threads = std::max(1u, std::min<unsigned>(n_threads, configs.size()));

  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        run(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void plot_data(const std::string& directory) {
  struct Series {
    std::string label;
    std::map<double, double> points;
  };
  std::map<std::string, std::vector<Series>> by_metric;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const auto& path : files) {
    Trajectory traj;
    try {
      traj = read_json(path.string());
    } catch (const std::exception&) {
      continue;  // not a trajectory document
    }
    std::string label = path.stem().string();
    std::set<std::string> metric_names;
    for (const auto& rec : traj.records)
      for (const auto& [name, value] : rec.metrics) metric_names.insert(name);
    for (const auto& name : metric_names) {
      Series s;
      s.label = label;
      for (const auto& rec : traj.records) {
        auto it = rec.metrics.find(name);
        if (it != rec.metrics.end()) s.points[rec.t] = it->second;
      }
      by_metric[name].push_back(std::move(s));
    }
  }

  for (const auto& [metric, series] : by_metric) {
    std::set<double> ts;
    for (const auto& s : series)
      for (const auto& [t, v] : s.points) ts.insert(t);
    std::ofstream os((fs::path(directory) / ("plot_" + metric + ".csv")));
    os.precision(17);
    os << "t";
    for (const auto& s : series) os << "," << s.label;
    os << "\n";
    for (double t : ts) {
      os << t;
      for (const auto& s : series) {
        auto it = s.points.find(t);
        os << ",";
        if (it != s.points.end()) os << it->second;
      }
      os << "\n";
    }
  }
}

}  // namespace vql
