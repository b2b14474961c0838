#pragma once

#include <vector>

#include "vql/pauli.hpp"

namespace vql {

enum class Boundary { open, periodic };
enum class Picture { schroedinger, heisenberg };

/// Lindblad generator data on N physical spins: a Hermitian Hamiltonian and
/// a list of jump operators, all as Pauli sums on the N sites. Couplings
/// (J, h, gamma) are folded into the coefficients by the model builders.
struct LindbladModel {
  int n_spins = 0;
  PauliSum hamiltonian;            // on n_spins qubits
  std::vector<PauliSum> jumps;     // each on n_spins qubits
  Boundary boundary = Boundary::periodic;

  /// Throws unless the Hamiltonian is Hermitian within tol and dimensions
  /// are consistent.
  void validate(double tol = 1e-12) const;
};

/// The Liouvillian compiled to Pauli-sum superoperators on 2N qubits,
/// split as L = l_h + d_antihermitian + d_hermitian. The first two carry
/// pure-imaginary coefficients (anti-Hermitian parts, unitary-generating),
/// the last real coefficients (norm-changing).
struct CompiledLiouvillian {
  int n_spins = 0;
  Picture picture = Picture::schroedinger;
  PauliSum l_h;              // commutator part
  PauliSum d_antihermitian;  // Delta^u terms
  PauliSum d_hermitian;      // Delta^n terms

  PauliSum total() const {
    PauliSum t = l_h;
    t += d_antihermitian;
    t += d_hermitian;
    return t;
  }
  PauliSum dissipator() const {
    PauliSum t = d_antihermitian;
    t += d_hermitian;
    return t;
  }
  bool dissipative() const {
    return !d_antihermitian.empty() || !d_hermitian.empty();
  }
  int n_qubits() const { return 2 * n_spins; }
};

/// Superoperator of rho -> sigma_p rho as a Pauli sum on 2N qubits, built
/// per site from the 4x4 block with entries Tr(sigma_beta sigma_p
/// sigma_alpha)/2 and Pauli-decomposed on the site's qubit pair.
PauliSum left_mult_superop(const PauliString& p);
/// Same for rho -> rho sigma_p (block entries Tr(sigma_beta sigma_alpha
/// sigma_p)/2).
PauliSum right_mult_superop(const PauliString& p);
/// Linear extensions to Pauli sums.
PauliSum left_mult_superop(const PauliSum& op);
PauliSum right_mult_superop(const PauliSum& op);

/// Compile the model into superstate-space Pauli sums. The Schroedinger
/// picture gives L with L_H = -i(left(H) - right(H)) and the standard
/// dissipator; the Heisenberg picture emits the adjoint L^dag. The
/// dissipator is split numerically into (X -+ X^dag)/2 parts.
CompiledLiouvillian compile(const LindbladModel& model, Picture picture);

/// Partition strings into pairwise-commuting groups by greedy coloring of
/// the anticommutation graph (largest degree first). Groups are relabeled
/// by first appearance in the input order, so group 0 contains the earliest
/// input string. Returns, per string index, its group id; `n_groups` many.
struct CommutingPartition {
  std::vector<int> group_of;  // size = #strings
  int n_groups = 0;
};
CommutingPartition commuting_partition(const std::vector<PauliString>& strings);

}  // namespace vql
