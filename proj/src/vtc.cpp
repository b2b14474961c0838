#include "vql/vtc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vql {

namespace {

Eigen::VectorXd central_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

void project(Eigen::VectorXd& x, const OptimizerConfig& cfg) {
  if (!cfg.bounded) return;
  for (int i = 0; i < x.size(); ++i)
    x(i) = std::clamp(x(i), cfg.lower, cfg.upper);
}

}  // namespace

MinimizeResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        Eigen::VectorXd x0, const OptimizerConfig& cfg) {
  project(x0, cfg);
  MinimizeResult res;
  res.x = x0;
  res.value = f(x0);
  const int n = static_cast<int>(x0.size());
  if (n == 0) {
    res.converged = true;
    return res;
  }

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = central_gradient(f, res.x, cfg.gradient_step);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    res.iterations = it + 1;
    if (g.norm() < 1e-9) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd d = -h_inv * g;
    if (d.dot(g) >= 0) {  // not a descent direction; reset to steepest
      h_inv.setIdentity();
      d = -g;
    }

    // Armijo backtracking line search (monotone acceptance)
    double step = 1.0;
    double f_new = res.value;
    Eigen::VectorXd x_new = res.x;
    const double slope = g.dot(d);
    bool accepted = false;
    while (step > 1e-14) {
      x_new = res.x + step * d;
      project(x_new, cfg);
      f_new = f(x_new);
      if (f_new <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no descent possible at line-search resolution
      return res;
    }

    Eigen::VectorXd g_new = central_gradient(f, x_new, cfg.gradient_step);
    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      Eigen::MatrixXd left = eye - s * y.transpose() / sy;
      h_inv = left * h_inv * left.transpose() + s * s.transpose() / sy;
    } else {
      h_inv.setIdentity();
    }

    const double improvement = res.value - f_new;
    res.x = x_new;
    res.value = f_new;
    g = g_new;
    if (improvement < cfg.tolerance * std::max(1.0, std::abs(res.value))) {
      res.converged = true;
      return res;
    }
  }
  res.converged = false;  // max iterations reached; best found returned
  return res;
}

void VtcProblem::validate() const {
  if (dt <= 0) throw config_error("VtcProblem: dt must be > 0");
  if (n_expansion < 1) throw config_error("VtcProblem: n_expansion must be >= 1");
}

PauliSum v_expand(const PauliSum& l, double dt, int n, int term_cap) {
  if (n < 1) throw config_error("v_expand: n must be >= 1");
  const int nq = l.n();
  PauliSum v(nq);
  v.add(Complex(1, 0), PauliString(nq));
  PauliSum power = v;  // L^k dt^k / k!
  for (int k = 1; k <= n; ++k) {
    power = power * l;
    power *= Complex(dt / k, 0);
    if (static_cast<int>(power.size()) > term_cap)
      throw evolver_error(
          "v_expand: expansion exceeds the term cap; use a smaller n");
    v += power;
  }
  return v;
}

double a_ratio_purity(const SuperState& prev_unit, const PauliSum& dissipator,
                      double dt, const EstimatorConfig& est) {
  double expectation = 0;
  if (est.mode == EstimatorConfig::Mode::exact || dissipator.empty()) {
    if (!dissipator.empty())
      expectation =
          prev_unit.amps.dot(apply_pauli_sum(dissipator, prev_unit.amps))
              .real();
  } else {
    est.validate();
    std::mt19937_64 rng(est.seed ^ 0xD155);
    for (const auto& [c, s] : dissipator.terms()) {
      Complex w = prev_unit.amps.dot(apply_pauli_string(s, prev_unit.amps));
      double p = std::clamp(0.5 * (1.0 + w.real()), 0.0, 1.0);
      std::binomial_distribution<int64_t> bin(est.shots, p);
      double re = 2.0 * static_cast<double>(bin(rng)) /
                      static_cast<double>(est.shots) -
                  1.0;
      expectation += (c * re).real();
    }
  }
  const double radicand = 1.0 + 2.0 * dt * expectation;
  if (radicand <= 0)
    throw evolver_error(
        "a_ratio_purity: non-positive radicand; the step is too large");
  return 1.0 / std::sqrt(radicand);
}

Complex a_from_trace(const SuperState& unit_state, double floor) {
  const Complex p0 = unit_state.amps[0];
  if (std::abs(p0) <= floor)
    throw evolver_error(
        "a_from_trace: overlap with the identity component is below the "
        "floor (near-pure state); use the purity method");
  return 1.0 / (std::pow(2.0, 0.5 * unit_state.n_spins) * p0);
}

double vtc_fidelity(const AnsatzProgram& prog, const Eigen::VectorXd& theta_new,
                    const Eigen::VectorXd& theta_old, const PauliSum& v,
                    Complex a_ratio) {
  SuperState u_new = apply(prog, theta_new);
  SuperState u_old = apply(prog, theta_old);
  Eigen::VectorXcd v_old = apply_pauli_sum(v, u_old.amps);
  Complex f = a_ratio * u_new.amps.dot(v_old);
  return std::norm(f);
}

VtcStepResult vtc_step(const AnsatzProgram& prog,
                       const Eigen::VectorXd& theta_prev,
                       const CompiledLiouvillian& lv, const VtcProblem& prob) {
  prob.validate();
  PauliSum v = v_expand(lv.total(), prob.dt, prob.n_expansion, prob.term_cap);

  SuperState u_old = apply(prog, theta_prev);
  Eigen::VectorXcd v_old = apply_pauli_sum(v, u_old.amps);

  // The optimized cost always uses the norm-factor ratio of the purity
  // relation, which is a constant during the step; a theta-dependent ratio
  // (the trace formula) would let the optimizer inflate |f| by tilting the
  // state toward the identity component instead of tracking the dynamics.
  // a_method picks how the runner recovers a after the step.
  VtcStepResult out;
  out.a_ratio = lv.dissipative()
                    ? a_ratio_purity(u_old, lv.dissipator(), prob.dt)
                    : 1.0;

  const int ng = prog.n_gate_params();
  auto cost = [&](const Eigen::VectorXd& gate_theta) {
    Eigen::VectorXd full = theta_prev;
    full.head(ng) = gate_theta;
    SuperState u_new = apply(prog, full);
    Complex f = out.a_ratio * u_new.amps.dot(v_old);
    return 1.0 - std::norm(f);
  };

  MinimizeResult min = minimize(cost, theta_prev.head(ng), prob.optimizer);
  out.theta = theta_prev;
  out.theta.head(ng) = min.x;
  out.cost = min.value;
  out.iterations = min.iterations;
  out.converged = min.converged;
  return out;
}

}  // namespace vql
