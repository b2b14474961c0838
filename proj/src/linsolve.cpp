#include "vql/linsolve.hpp"

#include <algorithm>
#include <cmath>

#include "vql/errors.hpp"

namespace vql {

namespace {

struct Svd {
  Eigen::MatrixXd u, v;
  Eigen::VectorXd sigma;
};

Svd svd_of(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

Eigen::VectorXd tikhonov_from_svd(const Svd& s, const Eigen::VectorXd& b,
                                  double lambda) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(s.v.rows());
  const double smax = s.sigma.size() ? s.sigma(0) : 0.0;
  // at lambda = 0, suppress numerically-zero singular values (pseudoinverse)
  const double cutoff = smax * 1e-13;
  for (int i = 0; i < s.sigma.size(); ++i) {
    const double sig = s.sigma(i);
    if (sig <= cutoff) continue;
    const double filter = sig / (sig * sig + lambda * lambda);
    x += filter * s.u.col(i).dot(b) * s.v.col(i);
  }
  return x;
}

}  // namespace

Eigen::VectorXd tikhonov_solve(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& b, double lambda) {
  if (lambda < 0) throw config_error("tikhonov_solve: lambda must be >= 0");
  return tikhonov_from_svd(svd_of(a), b, lambda);
}

Eigen::VectorXd tsvd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           int k) {
  const int dim = static_cast<int>(std::min(a.rows(), a.cols()));
  if (k < 1 || k > dim)
    throw config_error("tsvd_solve: rank k out of range [1, " +
                       std::to_string(dim) + "]");
  Svd s = svd_of(a);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  const double smax = s.sigma.size() ? s.sigma(0) : 0.0;
  for (int i = 0; i < k; ++i) {
    if (s.sigma(i) <= smax * 1e-13) break;
    x += s.u.col(i).dot(b) / s.sigma(i) * s.v.col(i);
  }
  return x;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  if (points < 1) return out;
  if (points == 1) {
    out.push_back(lo);
    return out;
  }
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(std::exp(std::log(lo) + i * step));
  return out;
}

LCurveResult lcurve_select(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const std::vector<double>& grid, double bound) {
  if (grid.empty()) throw config_error("lcurve_select: empty lambda grid");
  Svd s = svd_of(a);

  LCurveResult res;
  res.points.reserve(grid.size());
  for (double lambda : grid) {
    Eigen::VectorXd x = tikhonov_from_svd(s, b, lambda);
    res.points.push_back({lambda, (a * x - b).norm(), x.norm()});
  }

  std::vector<int> admissible;
  for (int i = 0; i < static_cast<int>(res.points.size()); ++i)
    if (res.points[i].sol_norm <= bound) admissible.push_back(i);
  if (admissible.empty()) {
    // every solution exceeds the norm bound: take the most regularized point
    res.lambda = res.points.back().lambda;
    return res;
  }
  if (admissible.size() < 3) {
    res.lambda = res.points[admissible.front()].lambda;
    return res;
  }

  // curvature of (log rho, log eta) along the admissible points
  auto lx = [&](int i) { return std::log(std::max(res.points[i].residual, 1e-300)); };
  auto ly = [&](int i) { return std::log(std::max(res.points[i].sol_norm, 1e-300)); };
  double best_kappa = 0.0;
  int best = admissible.front();
  for (size_t j = 1; j + 1 < admissible.size(); ++j) {
    const int im = admissible[j - 1], i0 = admissible[j], ip = admissible[j + 1];
    const double x1 = lx(i0) - lx(im), y1 = ly(i0) - ly(im);
    const double x2 = lx(ip) - lx(i0), y2 = ly(ip) - ly(i0);
    const double cross = x1 * y2 - y1 * x2;
    const double l1 = std::hypot(x1, y1), l2 = std::hypot(x2, y2),
                 l3 = std::hypot(x1 + x2, y1 + y2);
    if (l1 < 1e-14 || l2 < 1e-14 || l3 < 1e-14) continue;
    // signed Menger curvature; the L-corner bends with positive sign for
    // increasing lambda ordering (residual grows, norm shrinks)
    const double kappa = 2.0 * cross / (l1 * l2 * l3);
    if (kappa > best_kappa) {
      best_kappa = kappa;
      best = i0;
    }
  }
  res.lambda = res.points[best].lambda;
  return res;
}

}  // namespace vql
