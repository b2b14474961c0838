#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vql/exact.hpp"
#include "vql/experiment.hpp"
#include "vql/vtc.hpp"

using namespace vql;

namespace {

AnsatzProgram one_param_x() {
  AnsatzProgram prog;
  prog.n_spins = 1;
  prog.m = 1;
  prog.initial = Eigen::VectorXcd::Zero(4);
  prog.initial[0] = 1.0;
  GateSpec g;
  g.kind = GateKind::rotation;
  g.coeff = Complex(0, -1);
  g.generator = PauliString::from_labels("XI");
  g.param = 0;
  prog.gates.push_back(g);
  prog.n_params = 1;
  return prog;
}

SuperState open_initial(int n) {
  const int64_t hdim = int64_t{1} << n;
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(hdim, hdim);
  rho0(0, 0) = 1.0;
  return vectorize(rho0);
}

}  // namespace

TEST_SUITE_BEGIN("vtc");

TEST_CASE("v_expand basics and dense equivalence") {
  PauliSum zero(2);
  PauliSum v1 = v_expand(zero, 0.1, 1);
  REQUIRE(v1.size() == 1);
  CHECK(v1.terms()[0].second.is_identity());
  CHECK(v1.terms()[0].first == Complex(1, 0));

  PauliSum l = oracles::random_sum(2, 5);
  const double dt = 0.07;
  PauliSum v2 = v_expand(l, dt, 2);
  Eigen::MatrixXcd ld = oracles::dense_sum(l);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(4, 4) + dt * ld +
                            0.5 * dt * dt * ld * ld;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Random(4);
  psi.normalize();
  CHECK((apply_pauli_sum(v2, psi) - expect * psi).norm() < 1e-12);
}

TEST_CASE("v_expand approximates the exponential at the stated order") {
  // single-site amplitude damping generator, gamma dt = 0.01
  LindbladModel model = build_open_tfi(1, 0.0, 0.0, 1.0);
  CompiledLiouvillian lv = compile(model, Picture::schroedinger);
  const double dt = 0.01;
  const int n = 3;
  PauliSum v = v_expand(lv.total(), dt, n);
  Eigen::MatrixXcd vd = oracles::dense_sum(v);
  Eigen::MatrixXcd ld = oracles::dense_sum(lv.total());
  Eigen::MatrixXcd exact = (dt * ld).exp();
  const double lnorm = ld.operatorNorm();
  const double bound = std::pow(lnorm * dt, n + 1) * std::exp(lnorm * dt);
  CHECK((vd - exact).operatorNorm() <= bound);
}

TEST_CASE("v_expand enforces the term cap") {
  PauliSum l = oracles::random_sum(4, 30);
  CHECK_THROWS_AS(v_expand(l, 0.1, 4, 50), Error);
}

TEST_CASE("a_ratio_purity") {
  SuperState s = open_initial(1);
  PauliSum zero(2);
  CHECK(a_ratio_purity(s, zero, 0.05) == doctest::Approx(1.0));

  // single-qubit damping of |0><0|: d(purity)/dt = -2 gamma at t = 0
  const double gamma = 0.8, dt = 1e-3;
  CompiledLiouvillian lv =
      compile(build_open_tfi(1, 0.0, 0.0, gamma), Picture::schroedinger);
  double ratio = a_ratio_purity(s, lv.dissipator(), dt);
  // closed form: P(t) = e^{-2 g t} + (1 - e^{-g t})^2
  auto purity_of = [&](double t) {
    const double e = std::exp(-gamma * t);
    return e * e + (1 - e) * (1 - e);
  };
  const double expect = std::sqrt(purity_of(0.0) / purity_of(dt));
  CHECK(std::abs(ratio - expect) < 5 * dt * dt);

  CHECK_THROWS_AS(a_ratio_purity(s, lv.dissipator(), 1e3), Error);
}

TEST_CASE("a_from_trace") {
  SuperState pure = open_initial(1);
  CHECK(std::abs(a_from_trace(pure) - Complex(1, 0)) < 1e-14);

  SuperState mixed;
  mixed.n_spins = 1;
  mixed.amps = Eigen::VectorXcd::Zero(4);
  mixed.amps[0] = 1.0;  // unit vector along P_0: the maximally mixed state
  Complex a = a_from_trace(mixed);
  CHECK(std::abs(a - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-14);
  mixed.a = a;
  CHECK(purity(mixed) == doctest::Approx(0.5));

  SuperState zero_overlap;
  zero_overlap.n_spins = 1;
  zero_overlap.amps = Eigen::VectorXcd::Zero(4);
  zero_overlap.amps[1] = 1.0;
  CHECK_THROWS_AS(a_from_trace(zero_overlap), Error);
}

TEST_CASE("vtc_fidelity") {
  AnsatzProgram prog = one_param_x();
  Eigen::VectorXd theta(1);
  theta << 0.4;
  PauliSum identity(2);
  identity.add(1.0, PauliString(2));
  CHECK(vtc_fidelity(prog, theta, theta, identity, Complex(1, 0)) ==
        doctest::Approx(1.0));

  // orthogonal states: theta and theta + pi/2 under exp(-i theta X)
  Eigen::VectorXd other(1);
  other << 0.4 + M_PI / 2;
  CHECK(vtc_fidelity(prog, other, theta, identity, Complex(1, 0)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // random nearby pair against a dense evaluation
  CompiledLiouvillian lv =
      compile(build_open_tfi(2, 1.0, 1.0, 0.5), Picture::schroedinger);
  AnsatzProgram open_prog = build_open(lv, 1, open_initial(2));
  Eigen::VectorXd a = open_prog.initial_theta(), b = a;
  for (int k = 0; k < a.size(); ++k) {
    a[k] = 0.05 * std::cos(k + 1.0);
    b[k] = a[k] + 0.01 * std::sin(2.0 * k);
  }
  PauliSum v = v_expand(lv.total(), 0.05, 2);
  SuperState ua = apply(open_prog, a), ub = apply(open_prog, b);
  Complex f_dense = Complex(0.9, 0.1) *
                    (ub.amps.adjoint() * (oracles::dense_sum(v) * ua.amps))(0);
  CHECK(vtc_fidelity(open_prog, b, a, v, Complex(0.9, 0.1)) ==
        doctest::Approx(std::norm(f_dense)).epsilon(1e-12));
}

TEST_CASE("vtc_step: zero Liouvillian is a fixed point with zero cost") {
  AnsatzProgram prog = one_param_x();
  CompiledLiouvillian lv;
  lv.n_spins = 1;
  lv.l_h = PauliSum(2);
  lv.d_antihermitian = PauliSum(2);
  lv.d_hermitian = PauliSum(2);
  VtcProblem prob;
  prob.dt = 0.05;
  Eigen::VectorXd theta(1);
  theta << 0.7;
  VtcStepResult res = vtc_step(prog, theta, lv, prob);
  CHECK((res.theta - theta).norm() < 1e-8);
  CHECK(res.cost < 1e-12);
}

TEST_CASE("vtc_step: one-parameter flow advances by dt") {
  AnsatzProgram prog = one_param_x();
  CompiledLiouvillian lv;
  lv.n_spins = 1;
  PauliSum l(2);  // L = -i X so that exp(L t) = exp(-i X t)
  l.add(Complex(0, -1), PauliString::from_labels("XI"));
  lv.l_h = l;
  lv.d_antihermitian = PauliSum(2);
  lv.d_hermitian = PauliSum(2);

  VtcProblem prob;
  prob.dt = 0.05;
  prob.n_expansion = 2;
  Eigen::VectorXd theta(1);
  theta << 0.3;
  VtcStepResult res = vtc_step(prog, theta, lv, prob);
  CHECK(std::abs(res.theta(0) - theta(0) - prob.dt) < 1e-4);
  CHECK(res.cost < 1e-6);
}

TEST_CASE("vtc_step cost never exceeds the warm-start cost") {
  CompiledLiouvillian lv =
      compile(build_open_tfi(2, 1.0, 1.0, 0.5), Picture::schroedinger);
  AnsatzProgram prog = build_open(lv, 1, open_initial(2));
  VtcProblem prob;
  prob.dt = 0.05;
  prob.a_method = VtcProblem::AMethod::trace;
  Eigen::VectorXd theta = prog.initial_theta();
  for (int step = 0; step < 4; ++step) {
    PauliSum v = v_expand(lv.total(), prob.dt, prob.n_expansion);
    SuperState u_old = apply(prog, theta);
    double ratio = a_ratio_purity(u_old, lv.dissipator(), prob.dt);
    double warm = 1.0 - vtc_fidelity(prog, theta, theta, v, Complex(ratio, 0));
    VtcStepResult res = vtc_step(prog, theta, lv, prob);
    CHECK(res.cost <= warm + 1e-12);
    theta = res.theta;
  }
}

TEST_CASE("purity- and trace-based a recovery agree per step, N=2") {
  CompiledLiouvillian lv =
      compile(build_open_tfi(2, 1.0, 1.0, 0.5), Picture::schroedinger);
  AnsatzProgram prog = build_open(lv, 1, open_initial(2));
  const double dt = 0.02;
  VtcProblem prob;
  prob.dt = dt;
  prob.a_method = VtcProblem::AMethod::trace;

  Eigen::VectorXd theta = prog.initial_theta();
  for (int step = 0; step < 10; ++step) {
    SuperState u_prev = apply(prog, theta);
    const double ratio_purity = a_ratio_purity(u_prev, lv.dissipator(), dt);
    VtcStepResult res = vtc_step(prog, theta, lv, prob);
    SuperState u_new = apply(prog, res.theta);
    const double ratio_trace =
        std::abs(a_from_trace(u_prev) / a_from_trace(u_new));
    CHECK(std::abs(ratio_purity - ratio_trace) < 5 * dt * dt);
    theta = res.theta;

    // trace-normalized state has unit trace by construction
    SuperState normalized = u_new;
    normalized.a = a_from_trace(u_new);
    CHECK(std::abs(trace_of(normalized) - Complex(1, 0)) < 1e-8);
    CHECK(std::abs(devectorize(normalized).trace() - Complex(1, 0)) < 1e-8);
  }
}

TEST_SUITE_END();
