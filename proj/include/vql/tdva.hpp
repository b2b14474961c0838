#pragma once

#include <cstdint>
#include <optional>

#include "vql/ansatz.hpp"
#include "vql/linsolve.hpp"

namespace vql {

/// Expectation-value estimation: exact statevector inner products, or
/// simulated Hadamard tests with M Bernoulli shots per real/imaginary part,
/// drawn from the exact probabilities.
struct EstimatorConfig {
  enum class Mode { exact, sampled };
  Mode mode = Mode::exact;
  int64_t shots = 1024;
  uint64_t seed = 0;

  void validate() const;
};

/// The McLachlan linear system A^R theta_dot = C^I.
struct TdvaSystem {
  Eigen::MatrixXd a_matrix;  // Re <d_i rho | d_j rho>
  Eigen::VectorXd c_vector;  // Im <d_i rho | H_SQ | rho>
};

/// Assemble A^R and C^I for the program at theta. `liouvillian` is the
/// compiled generator L (already the adjoint in the Heisenberg picture);
/// the super-Hamiltonian used is H_SQ = i L.
TdvaSystem assemble(const AnsatzProgram& prog, const Eigen::VectorXd& theta,
                    const PauliSum& liouvillian, const EstimatorConfig& est);

struct RegConfig {
  enum class Method { tikhonov, tsvd, plain_lstsq };
  Method method = Method::tikhonov;
  // L-curve selection suits noisy (sampled) assemblies; on exact assemblies
  // the corner parks at the leading singular value and biases the flow, so
  // the default is a fixed small lambda.
  bool use_lcurve = false;
  double lambda = 1e-6;
  double lambda_min = 1e-8;
  double lambda_max = 1.0;
  int grid_points = 25;
  double bound_factor = 10.0;  // norm bound M = factor * ||x(lambda_max)||
  int tsvd_rank = 0;           // 0 = full rank
};

struct SolveDiagnostics {
  double lambda = 0;
  int rank = 0;
  double residual = 0;
  double theta_dot_norm = 0;
  double cond = 0;
};

/// Solve the assembled system with the configured regularization.
Eigen::VectorXd solve_tdva_system(const TdvaSystem& sys, const RegConfig& reg,
                                  SolveDiagnostics* diag = nullptr);

struct TdvaStepResult {
  Eigen::VectorXd theta;
  SolveDiagnostics diag;
};

/// One explicit-Euler step theta += dt * theta_dot (or classical RK4 on the
/// parameter flow when rk4 is set; each stage reassembles the system).
TdvaStepResult tdva_step(const AnsatzProgram& prog,
                         const Eigen::VectorXd& theta,
                         const PauliSum& liouvillian, double dt,
                         const RegConfig& reg, const EstimatorConfig& est,
                         bool rk4 = false);

/// TDVP variant Im<d_i|d_j> theta_dot = -Re<d_i|H_SQ|rho>; kept for the
/// documented t=0 failure mode of real-amplitude ansaetze.
struct TdvpReport {
  Eigen::VectorXd theta;
  Eigen::VectorXd rhs;
  double smallest_singular_value = 0;
  bool singular = false;
};
TdvpReport tdvp_step(const AnsatzProgram& prog, const Eigen::VectorXd& theta,
                     const PauliSum& liouvillian, double dt,
                     const EstimatorConfig& est);

}  // namespace vql
