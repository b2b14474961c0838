#pragma once

#include <functional>

#include "vql/ansatz.hpp"
#include "vql/tdva.hpp"

namespace vql {

/// Local descent configuration for the per-step fidelity optimization.
/// The method is a quasi-Newton (BFGS) line-search descent with
/// central-difference gradients; optional box bounds project iterates into
/// [lower, upper].
struct OptimizerConfig {
  int max_iterations = 200;
  double gradient_step = 1e-6;
  double tolerance = 1e-12;
  bool bounded = false;
  double lower = 0.0;
  double upper = 6.283185307179586;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

/// Monotone local minimization: every accepted iterate does not increase f.
MinimizeResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        Eigen::VectorXd x0, const OptimizerConfig& cfg);

struct VtcProblem {
  double dt = 0.05;
  int n_expansion = 2;
  enum class AMethod { purity, trace } a_method = AMethod::trace;
  OptimizerConfig optimizer;
  int term_cap = 200000;
  double trace_floor = 1e-10;

  void validate() const;
};

/// Short-time expansion sum_{k<=n} L^k dt^k / k! as a Pauli sum; throws when
/// the term count blows past `term_cap` (use a smaller n).
PauliSum v_expand(const PauliSum& l, double dt, int n, int term_cap = 200000);

/// |a(t-dt)/a(t)| = (1 + 2 dt <u|D|u>)^{-1/2} evaluated at the previous
/// step's unit state; throws when the radicand is non-positive (step too
/// large). The dissipator expectation is exact or shot-sampled.
double a_ratio_purity(const SuperState& prev_unit, const PauliSum& dissipator,
                      double dt,
                      const EstimatorConfig& est = EstimatorConfig{});

/// a = (2^{N/2} <P_0|u>)^{-1} from trace preservation; warns (throws) below
/// the overlap floor where the purity method should be used instead.
Complex a_from_trace(const SuperState& unit_state, double floor = 1e-10);

/// |f|^2 = |a_ratio * <u(theta_new)| V |u(theta_old)>|^2, exact overlap on
/// statevectors. Values marginally above 1 are reported unclamped.
double vtc_fidelity(const AnsatzProgram& prog, const Eigen::VectorXd& theta_new,
                    const Eigen::VectorXd& theta_old, const PauliSum& v,
                    Complex a_ratio);

struct VtcStepResult {
  Eigen::VectorXd theta;
  double cost = 0;
  int iterations = 0;
  bool converged = true;
  double a_ratio = 1.0;  // purity-method ratio of the accepted step
};

/// One VTC step: expand V(dt), minimize 1 - |f|^2 over the gate parameters
/// warm-started at theta_prev. Free-factor parameters are not optimized
/// (the norm factor is recovered by the configured a-method).
VtcStepResult vtc_step(const AnsatzProgram& prog,
                       const Eigen::VectorXd& theta_prev,
                       const CompiledLiouvillian& lv, const VtcProblem& prob);

}  // namespace vql
