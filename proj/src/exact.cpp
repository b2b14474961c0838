#include "vql/exact.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace vql {

ExactPropagator::ExactPropagator(PauliSum liouvillian, SuperState initial,
                                 double substep)
    : l_(std::move(liouvillian)), state_(std::move(initial)),
      substep_(substep) {
  if (substep_ <= 0)
    throw config_error("ExactPropagator: substep must be > 0");
  if (state_.amps.size() != (int64_t{1} << l_.n()))
    throw dimension_error("ExactPropagator: state/Liouvillian size mismatch");
}

void ExactPropagator::rk4_step(double h) {
  const Eigen::VectorXcd& y = state_.amps;
  Eigen::VectorXcd k1 = apply_pauli_sum(l_, y);
  Eigen::VectorXcd k2 = apply_pauli_sum(l_, y + 0.5 * h * k1);
  Eigen::VectorXcd k3 = apply_pauli_sum(l_, y + 0.5 * h * k2);
  Eigen::VectorXcd k4 = apply_pauli_sum(l_, y + h * k3);
  state_.amps = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void ExactPropagator::advance(double dt) {
  if (dt < 0) throw config_error("ExactPropagator: dt must be >= 0");
  double remaining = dt;
  while (remaining > 1e-15) {
    const double h = std::min(substep_, remaining);
    rk4_step(h);
    remaining -= h;
  }
  t_ += dt;
}

SuperState exact_propagate(const LindbladModel& model, const SuperState& s0,
                           double t, Picture picture, double step_hint,
                           double j_scale, double substep) {
  if (model.n_spins > 6)
    throw size_cap_error("exact_propagate: dense oracle capped at N <= 6");
  if (t < 0) throw config_error("exact_propagate: t must be >= 0");
  CompiledLiouvillian lv = compile(model, picture);
  double h = substep;
  if (h <= 0) {
    h = 1e-3 / std::max(j_scale, 1e-12);
    if (step_hint > 0) h = std::min(h, step_hint / 10.0);
  }
  ExactPropagator prop(lv.total(), s0, h);
  prop.advance(t);
  return prop.state();
}

SuperState propagate_expm(const PauliSum& liouvillian, const SuperState& s0,
                          double t) {
  if (liouvillian.n() > 6)
    throw size_cap_error("propagate_expm: capped at 2N <= 6 qubits");
  Eigen::MatrixXcd l = to_dense(liouvillian);
  Eigen::MatrixXcd u = (t * l).exp();
  SuperState out = s0;
  out.amps = u * s0.amps;
  return out;
}

Complex autocorrelation(const SuperState& o0, const SuperState& ot) {
  if (o0.n_spins != ot.n_spins)
    throw dimension_error("autocorrelation: dimension mismatch");
  const double n0 = std::abs(o0.a) * o0.amps.norm();
  if (n0 <= 0) throw evolver_error("autocorrelation: zero reference");
  return overlap(o0, ot) / n0;
}

double superstate_fidelity(const SuperState& exact, const SuperState& trial) {
  return std::norm(overlap(exact, trial));
}

double state_fidelity_uhlmann(const Eigen::MatrixXcd& rho_exact,
                              const Eigen::MatrixXcd& rho_trial) {
  if (rho_exact.rows() != rho_exact.cols() ||
      rho_trial.rows() != rho_trial.cols() ||
      rho_exact.rows() != rho_trial.rows())
    throw dimension_error("state_fidelity_uhlmann: non-square or mismatched");

  auto psd_sqrt = [](const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return Eigen::MatrixXcd(es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().adjoint());
  };
  Eigen::MatrixXcd root = psd_sqrt(rho_exact);
  Eigen::MatrixXcd inner = root * 0.5 * (rho_trial + rho_trial.adjoint()) * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (inner + inner.adjoint()));
  double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

double magnetization(const SuperState& rho, int site) {
  if (site < 0 || site >= rho.n_spins)
    throw dimension_error("magnetization: site out of range");
  const Complex tr0 = rho.amps[0];
  if (std::abs(tr0) < 1e-14)
    throw evolver_error("magnetization: state has (near) zero trace");
  const int64_t idx =
      superstate_index(PauliString::single(rho.n_spins, site, Pauli::Z));
  return (rho.amps[idx] / tr0).real();
}

}  // namespace vql
