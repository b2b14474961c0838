#pragma once

#include "vql/liouvillian.hpp"
#include "vql/superstate.hpp"

namespace vql {

/// Incremental exact reference dynamics: classical RK4 on
/// d|s>/dt = L |s> with a fixed substep.
class ExactPropagator {
 public:
  ExactPropagator(PauliSum liouvillian, SuperState initial, double substep);

  void advance(double dt);
  const SuperState& state() const { return state_; }
  double t() const { return t_; }

 private:
  void rk4_step(double h);

  PauliSum l_;
  SuperState state_;
  double substep_;
  double t_ = 0;
};

/// One-shot exact propagation of a superstate for time t under the model's
/// Liouvillian (or its adjoint in the Heisenberg picture). Dense feasibility
/// cap N <= 6. `step_hint` is the caller's record step; the RK4 substep is
/// min(step_hint/10, 1e-3/j_scale), overridable via `substep`.
SuperState exact_propagate(const LindbladModel& model, const SuperState& s0,
                           double t, Picture picture, double step_hint = -1,
                           double j_scale = 1.0, double substep = -1);

/// Dense matrix exponential route, N <= 3; cross-check for the RK4 path.
SuperState propagate_expm(const PauliSum& liouvillian, const SuperState& s0,
                          double t);

/// C(t) = <<O(0)|O(t)>> with O(0) normalized to unit Hilbert-Schmidt norm.
Complex autocorrelation(const SuperState& o0, const SuperState& ot);

/// F = |<<exact|trial>>|^2 including the trial's norm factor.
double superstate_fidelity(const SuperState& exact, const SuperState& trial);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) rho_trial sqrt(rho)))^2; the trial is
/// hermitized and negative eigenvalues are clipped before the square roots.
double state_fidelity_uhlmann(const Eigen::MatrixXcd& rho_exact,
                              const Eigen::MatrixXcd& rho_trial);

/// Trace-normalized Tr(rho sigma_site^z) / Tr(rho).
double magnetization(const SuperState& rho, int site);

}  // namespace vql
