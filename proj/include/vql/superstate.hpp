#pragma once

#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

#include "vql/pauli.hpp"

namespace vql {

/// Density matrix or observable re-encoded as the vector of its coefficients
/// in the normalized Pauli basis P_alpha = sigma_alpha / 2^{N/2}, living on
/// 2N simulated qubits. The complex norm factor `a` is kept separate from
/// the (typically unit-norm) amplitude vector.
///
/// Basis index convention: physical site j owns simulated qubits (2j, 2j+1);
/// the amplitude array is little-endian in the qubit index, and the per-site
/// code c in {0=I,1=X,2=Y,3=Z} maps to bits b_{2j} = (c>>1)&1,
/// b_{2j+1} = c&1, so that |00>,|01>,|10>,|11> (written b_{2j} b_{2j+1})
/// correspond to I, X, Y, Z.
struct SuperState {
  Eigen::VectorXcd amps;  // length 4^N
  int n_spins = 0;
  Complex a = Complex(1, 0);

  int64_t dim() const { return amps.size(); }
  int n_qubits() const { return 2 * n_spins; }
};

/// Amplitude-array index of the Pauli label vector alpha (a string on the
/// N physical sites).
int64_t superstate_index(const PauliString& alpha);
/// Inverse of superstate_index.
PauliString alpha_of_index(int64_t index, int n_spins);

/// Vectorize a dense 2^N x 2^N operator: amplitude at index(alpha) equals
/// Tr(P_alpha^dag op). Hilbert-Schmidt norm is preserved.
SuperState vectorize(const Eigen::MatrixXcd& op);

/// Inverse map, including the factor a.
Eigen::MatrixXcd devectorize(const SuperState& s);

/// Hilbert-Schmidt inner product Tr(X^dag Y) of the represented operators;
/// folds in both factors.
Complex overlap(const SuperState& x, const SuperState& y);

/// Trace of the represented operator: a * 2^{N/2} * amps[0].
Complex trace_of(const SuperState& s);

/// Tr(rho^2) = |a|^2 * sum |amps|^2 for Hermitian-represented states.
double purity(const SuperState& s);

/// Debug/fixture dump, one line per amplitude: "index re im".
void dump_amplitudes(const SuperState& s, std::ostream& os);

}  // namespace vql
