#include "vql/tdva.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vql {

namespace {

constexpr Complex kI(0, 1);

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One independent stream per matrix element, so results do not depend on
// evaluation order.
std::mt19937_64 element_rng(uint64_t seed, uint64_t tag, uint64_t i,
                            uint64_t j) {
  uint64_t s = splitmix64(seed ^ splitmix64(tag ^ splitmix64((i << 32) | j)));
  return std::mt19937_64(s);
}

// Hadamard-test estimate of a unit-modulus-bounded overlap: Re and Im are
// each measured as 2 p - 1 with p estimated from M Bernoulli shots at the
// exact probability.
Complex sample_overlap(Complex exact, int64_t shots, std::mt19937_64& rng) {
  auto draw = [&](double part) {
    double p = std::clamp(0.5 * (1.0 + part), 0.0, 1.0);
    std::binomial_distribution<int64_t> bin(shots, p);
    return 2.0 * static_cast<double>(bin(rng)) / static_cast<double>(shots) -
           1.0;
  };
  return {draw(exact.real()), draw(exact.imag())};
}

}  // namespace

void EstimatorConfig::validate() const {
  if (mode == Mode::sampled && shots < 1)
    throw config_error("EstimatorConfig: sampled mode needs shots >= 1");
}

TdvaSystem assemble(const AnsatzProgram& prog, const Eigen::VectorXd& theta,
                    const PauliSum& liouvillian, const EstimatorConfig& est) {
  est.validate();
  const int p = prog.n_params;
  TdvaSystem sys;
  sys.a_matrix.resize(p, p);
  sys.c_vector.resize(p);

  if (est.mode == EstimatorConfig::Mode::exact) {
    std::vector<Eigen::VectorXcd> deriv(p);
    for (int k = 0; k < p; ++k) deriv[k] = derivative_state(prog, theta, k);
    Eigen::VectorXcd rho = full_state(prog, theta);
    Eigen::VectorXcd h_rho = kI * apply_pauli_sum(liouvillian, rho);
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) {
        double v = deriv[i].dot(deriv[j]).real();
        sys.a_matrix(i, j) = v;
        sys.a_matrix(j, i) = v;
      }
      sys.c_vector(i) = deriv[i].dot(h_rho).imag();
    }
    return sys;
  }

  // Sampled mode: every unitary overlap contributing to an element is
  // estimated independently; classical prefactors stay exact.
  std::vector<std::vector<Insertion>> ins(p);
  for (int k = 0; k < p; ++k) ins[k] = insertion_states(prog, theta, k);
  SuperState full = apply(prog, theta);
  std::vector<std::pair<Complex, Eigen::VectorXcd>> h_terms;
  h_terms.reserve(liouvillian.size());
  for (const auto& [ct, st] : liouvillian.terms())
    h_terms.emplace_back(kI * ct * full.a, apply_pauli_string(st, full.amps));

  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      auto rng = element_rng(est.seed, 0xA, i, j);
      Complex acc = 0;
      for (const auto& gi : ins[i])
        for (const auto& gj : ins[j]) {
          Complex w = gi.state.dot(gj.state);
          acc += std::conj(gi.prefactor) * gj.prefactor *
                 sample_overlap(w, est.shots, rng);
        }
      sys.a_matrix(i, j) = acc.real();
      sys.a_matrix(j, i) = acc.real();
    }
    auto rng = element_rng(est.seed, 0xC, i, 0);
    Complex acc = 0;
    for (const auto& gi : ins[i])
      for (const auto& [pref, sigma_u] : h_terms) {
        Complex w = gi.state.dot(sigma_u);
        acc += std::conj(gi.prefactor) * pref *
               sample_overlap(w, est.shots, rng);
      }
    sys.c_vector(i) = acc.imag();
  }
  return sys;
}

Eigen::VectorXd solve_tdva_system(const TdvaSystem& sys, const RegConfig& reg,
                                  SolveDiagnostics* diag) {
  const Eigen::MatrixXd& a = sys.a_matrix;
  const Eigen::VectorXd& b = sys.c_vector;
  double lambda = 0;
  Eigen::VectorXd x;
  switch (reg.method) {
    case RegConfig::Method::tikhonov: {
      if (reg.use_lcurve) {
        Eigen::VectorXd at_max = tikhonov_solve(a, b, reg.lambda_max);
        const double bound = reg.bound_factor * std::max(at_max.norm(), 1e-300);
        auto sel = lcurve_select(
            a, b, log_grid(reg.lambda_min, reg.lambda_max, reg.grid_points),
            bound);
        lambda = sel.lambda;
      } else {
        lambda = reg.lambda;
      }
      x = tikhonov_solve(a, b, lambda);
      break;
    }
    case RegConfig::Method::tsvd: {
      int dim = static_cast<int>(std::min(a.rows(), a.cols()));
      int k = reg.tsvd_rank > 0 ? std::min(reg.tsvd_rank, dim) : dim;
      x = tsvd_solve(a, b, k);
      break;
    }
    case RegConfig::Method::plain_lstsq:
      x = tikhonov_solve(a, b, 0.0);
      break;
  }
  if (diag) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0;
    int rank = 0;
    double smin_pos = smax;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > smax * 1e-12) {
        ++rank;
        smin_pos = sv(i);
      }
    diag->lambda = lambda;
    diag->rank = rank;
    diag->residual = (a * x - b).norm();
    diag->theta_dot_norm = x.norm();
    diag->cond = (rank > 0 && smin_pos > 0) ? smax / smin_pos : 0.0;
  }
  return x;
}

TdvaStepResult tdva_step(const AnsatzProgram& prog,
                         const Eigen::VectorXd& theta,
                         const PauliSum& liouvillian, double dt,
                         const RegConfig& reg, const EstimatorConfig& est,
                         bool rk4) {
  if (dt <= 0) throw config_error("tdva_step: dt must be > 0");
  TdvaStepResult out;
  auto flow = [&](const Eigen::VectorXd& th, SolveDiagnostics* d) {
    TdvaSystem sys = assemble(prog, th, liouvillian, est);
    return solve_tdva_system(sys, reg, d);
  };
  if (!rk4) {
    Eigen::VectorXd k1 = flow(theta, &out.diag);
    out.theta = theta + dt * k1;
    return out;
  }
  Eigen::VectorXd k1 = flow(theta, &out.diag);
  Eigen::VectorXd k2 = flow(theta + 0.5 * dt * k1, nullptr);
  Eigen::VectorXd k3 = flow(theta + 0.5 * dt * k2, nullptr);
  Eigen::VectorXd k4 = flow(theta + dt * k3, nullptr);
  out.theta = theta + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  return out;
}

TdvpReport tdvp_step(const AnsatzProgram& prog, const Eigen::VectorXd& theta,
                     const PauliSum& liouvillian, double dt,
                     const EstimatorConfig& est) {
  est.validate();
  const int p = prog.n_params;
  std::vector<Eigen::VectorXcd> deriv(p);
  for (int k = 0; k < p; ++k) deriv[k] = derivative_state(prog, theta, k);
  Eigen::VectorXcd rho = full_state(prog, theta);
  Eigen::VectorXcd h_rho = kI * apply_pauli_sum(liouvillian, rho);

  Eigen::MatrixXd a_im(p, p);
  TdvpReport rep;
  rep.rhs.resize(p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a_im(i, j) = deriv[i].dot(deriv[j]).imag();
    rep.rhs(i) = -deriv[i].dot(h_rho).real();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_im);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0;
  rep.smallest_singular_value = sv.size() ? sv(sv.size() - 1) : 0;
  rep.singular = (p == 0) || rep.smallest_singular_value <= smax * 1e-10 ||
                 smax == 0;
  Eigen::VectorXd theta_dot = tikhonov_solve(a_im, rep.rhs, 0.0);
  rep.theta = theta + dt * theta_dot;
  return rep;
}

}  // namespace vql
