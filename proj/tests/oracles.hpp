// Test-only reference implementations, kept independent of the library's
// bit-indexed paths: everything here goes through literal Kronecker
// products and dense linear algebra.
#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "vql/liouvillian.hpp"
#include "vql/pauli.hpp"
#include "vql/superstate.hpp"

namespace oracles {

using vql::Complex;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline MatrixXcd pauli1(vql::Pauli p) {
  MatrixXcd m(2, 2);
  switch (p) {
    case vql::Pauli::I: m << 1, 0, 0, 1; break;
    case vql::Pauli::X: m << 0, 1, 1, 0; break;
    case vql::Pauli::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case vql::Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Dense matrix of a Pauli string via Kronecker products, little-endian
// (qubit 0 = least significant factor).
inline MatrixXcd dense_pauli(const vql::PauliString& s) {
  MatrixXcd out = MatrixXcd::Ones(1, 1);
  for (int q = 0; q < s.n(); ++q) {
    const MatrixXcd m = pauli1(s.label(q));
    MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) =
            m(a, b) * out;
    out = next;
  }
  return out;
}

inline MatrixXcd dense_sum(const vql::PauliSum& op) {
  const int64_t dim = int64_t{1} << op.n();
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  for (const auto& [c, s] : op.terms()) out += c * dense_pauli(s);
  return out;
}

// Column-stacking vectorization and the corresponding Lindblad
// superoperator: vec(A rho B) = (B^T kron A) vec(rho).
inline VectorXcd vec_cs(const MatrixXcd& m) {
  VectorXcd v(m.size());
  int64_t k = 0;
  for (int64_t c = 0; c < m.cols(); ++c)
    for (int64_t r = 0; r < m.rows(); ++r) v[k++] = m(r, c);
  return v;
}

inline MatrixXcd kron_dense(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int64_t i = 0; i < a.rows(); ++i)
    for (int64_t j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Superoperator of the Lindblad generator in column-stacking convention.
inline MatrixXcd lindblad_superop_cs(const vql::LindbladModel& model,
                                     vql::Picture picture) {
  const int64_t dim = int64_t{1} << model.n_spins;
  const MatrixXcd eye = MatrixXcd::Identity(dim, dim);
  const MatrixXcd h = dense_sum(model.hamiltonian);
  const Complex i(0, 1);
  MatrixXcd l;
  if (picture == vql::Picture::schroedinger) {
    l = -i * (kron_dense(eye, h) - kron_dense(h.transpose(), eye));
    for (const auto& jump : model.jumps) {
      MatrixXcd lj = dense_sum(jump);
      MatrixXcd n = lj.adjoint() * lj;
      l += kron_dense(lj.conjugate(), lj) -
           0.5 * kron_dense(eye, n) -
           0.5 * kron_dense(n.transpose(), eye);
    }
  } else {
    l = i * (kron_dense(eye, h) - kron_dense(h.transpose(), eye));
    for (const auto& jump : model.jumps) {
      MatrixXcd lj = dense_sum(jump);
      MatrixXcd n = lj.adjoint() * lj;
      l += kron_dense(lj.transpose(), lj.adjoint()) -
           0.5 * kron_dense(eye, n) -
           0.5 * kron_dense(n.transpose(), eye);
    }
  }
  return l;
}

// Basis-change matrix with column index(alpha) holding vec_cs(P_alpha).
inline MatrixXcd pauli_basis_change(int n_spins) {
  const int64_t sdim = int64_t{1} << (2 * n_spins);
  const int64_t hdim = int64_t{1} << n_spins;
  MatrixXcd s(hdim * hdim, sdim);
  const double norm = std::pow(2.0, -0.5 * n_spins);
  for (int64_t idx = 0; idx < sdim; ++idx) {
    vql::PauliString alpha = vql::alpha_of_index(idx, n_spins);
    s.col(idx) = vec_cs(norm * dense_pauli(alpha));
  }
  return s;
}

// The model's superoperator conjugated into the normalized Pauli basis.
inline MatrixXcd lindblad_superop_pauli(const vql::LindbladModel& model,
                                        vql::Picture picture) {
  MatrixXcd s = pauli_basis_change(model.n_spins);
  return s.adjoint() * lindblad_superop_cs(model, picture) * s;
}

// Dense RK4 Lindblad propagation of a density matrix, for closed-form
// cross-checks of the superstate machinery.
inline MatrixXcd propagate_dense_rho(const vql::LindbladModel& model,
                                     MatrixXcd rho, double t, int steps) {
  const MatrixXcd h = dense_sum(model.hamiltonian);
  std::vector<MatrixXcd> ls;
  for (const auto& jump : model.jumps) ls.push_back(dense_sum(jump));
  auto rhs = [&](const MatrixXcd& r) {
    MatrixXcd d = Complex(0, -1) * (h * r - r * h);
    for (const auto& lj : ls)
      d += lj * r * lj.adjoint() - 0.5 * (lj.adjoint() * lj * r) -
           0.5 * (r * lj.adjoint() * lj);
    return d;
  };
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    MatrixXcd k1 = rhs(rho);
    MatrixXcd k2 = rhs(rho + 0.5 * dt * k1);
    MatrixXcd k3 = rhs(rho + 0.5 * dt * k2);
    MatrixXcd k4 = rhs(rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return rho;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0xC0FFEE);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline MatrixXcd random_matrix(int64_t dim) {
  MatrixXcd m(dim, dim);
  std::normal_distribution<double> d(0, 1);
  for (int64_t i = 0; i < dim; ++i)
    for (int64_t j = 0; j < dim; ++j) m(i, j) = Complex(d(rng()), d(rng()));
  return m;
}

inline MatrixXcd random_hermitian(int64_t dim) {
  MatrixXcd m = random_matrix(dim);
  return 0.5 * (m + m.adjoint());
}

inline MatrixXcd random_density(int64_t dim) {
  MatrixXcd m = random_matrix(dim);
  MatrixXcd rho = m * m.adjoint();
  return rho / rho.trace();
}

inline vql::PauliString random_string(int n) {
  std::uniform_int_distribution<int> d(0, 3);
  vql::PauliString s(n);
  for (int q = 0; q < n; ++q) s.set(q, static_cast<vql::Pauli>(d(rng())));
  return s;
}

inline vql::PauliSum random_sum(int n, int terms) {
  vql::PauliSum out(n);
  std::normal_distribution<double> d(0, 1);
  for (int k = 0; k < terms; ++k)
    out.add(Complex(d(rng()), d(rng())), random_string(n));
  return out.canonicalize();
}

}  // namespace oracles
