#pragma once

#include <vector>

#include <Eigen/Dense>

namespace vql {

/// x = sum_i sigma_i/(sigma_i^2 + lambda^2) (u_i^T b) v_i from the SVD of A.
/// lambda = 0 degrades to the truncated pseudoinverse least-squares solution.
Eigen::VectorXd tikhonov_solve(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& b, double lambda);

/// Least-squares solution keeping only the k largest singular values.
Eigen::VectorXd tsvd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           int k);

struct LCurvePoint {
  double lambda;
  double residual;   // ||A x - b||
  double sol_norm;   // ||x||
};

struct LCurveResult {
  double lambda;
  std::vector<LCurvePoint> points;
};

/// L-curve corner selection: evaluates (residual, solution norm) per grid
/// lambda, restricts to points with solution norm <= bound, and returns the
/// lambda of maximum log-log curvature; falls back to the smallest lambda
/// under the bound when the curvature signal is degenerate.
LCurveResult lcurve_select(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const std::vector<double>& grid, double bound);

/// Logarithmic grid helper.
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace vql
