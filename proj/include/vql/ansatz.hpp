#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vql/liouvillian.hpp"
#include "vql/superstate.hpp"

namespace vql {

enum class GateKind { rotation, nonunitary_sim, general_two_qubit };

/// One gate of a variational program. Rotations are exp(theta * coeff *
/// string) on the full register; the other two kinds act on a qubit pair
/// (2*site, 2*site+1).
struct GateSpec {
  GateKind kind = GateKind::rotation;
  int layer = 1;
  int site = -1;  // pair index for pair-local kinds

  // rotation
  Complex coeff{};        // c in exp(theta c Lambda); imaginary c <=> unitary
  PauliString generator;  // Lambda on the full register
  int param = -1;

  // nonunitary_sim: ordered product of exp(theta_k c_k Delta_k) on the pair,
  // with factors[0] applied first, plus an optional scalar exp(theta c_I)
  // carrying the identity-dissipation term.
  struct Factor {
    Complex coeff;           // real for the Hermitian dissipator parts
    PauliString pair_string; // 2-qubit string, local qubit 0 = global 2*site
    int param = -1;
  };
  std::vector<Factor> factors;
  double identity_coeff = 0.0;
  int identity_param = -1;
  Eigen::Vector4cd pair_input = Eigen::Vector4cd::Zero();

  // general_two_qubit: 15 parameters starting at param_base
  int param_base = -1;
};

/// Ordered gate list with parameter sharing, an initial superstate and an
/// optional free complex norm factor appended as two real parameters
/// (Re a, Im a) at the end of the parameter vector.
struct AnsatzProgram {
  int n_spins = 0;
  int m = 1;
  std::vector<GateSpec> gates;  // application order
  int n_params = 0;             // includes the two a-parameters when present
  bool has_free_factor = false;
  Eigen::VectorXcd initial;     // unit-norm amplitudes on 4^N
  std::vector<std::string> param_names;

  int n_qubits() const { return 2 * n_spins; }
  int n_gate_params() const { return n_params - (has_free_factor ? 2 : 0); }
  /// Zero angles; the a-parameters start at (1, 0).
  Eigen::VectorXd initial_theta() const;
};

/// Large-Trotter ansatz for a dissipation-free Liouvillian: per layer one
/// rotation per l_h term, parameters shared within commuting groups;
/// shared_layers ties the group parameters across all layers.
AnsatzProgram build_closed(const CompiledLiouvillian& lv, int m,
                           bool shared_layers, const SuperState& initial);

/// Open-system ansatz: per layer, pair-local dissipative gates (non-unitary
/// products at layer 1, general two-qubit gates at later layers), then the
/// unitary-dissipator rotations, then the Hamiltonian rotations. Requires a
/// product initial state over qubit pairs and pair-local dissipator terms.
/// `share_general` ties the 15 general-gate parameters across the pairs of
/// a layer.
AnsatzProgram build_open(const CompiledLiouvillian& lv, int m,
                         const SuperState& initial,
                         bool share_general = true);

/// Replace the action of a (possibly non-unitary) gate G on a fixed 2-qubit
/// state by a scalar and a unitary: G psi = a U psi with a = ||G psi||.
/// U is built from bases completed around psi and G psi by pivoted modified
/// Gram-Schmidt over the computational basis.
std::pair<Complex, Eigen::Matrix4cd> nonunitary_to_unitary(
    const Eigen::Matrix4cd& g, const Eigen::Vector4cd& psi);

/// Evaluate the program: returns a * |rho^u> with the amplitude vector kept
/// unit-norm for unitary circuits and the accumulated factor separated.
SuperState apply(const AnsatzProgram& prog, const Eigen::VectorXd& theta);

/// The full unnormalized state a(theta) * |rho^u(theta)> as one vector
/// (raw non-unitary gates applied directly, free factor folded in).
Eigen::VectorXcd full_state(const AnsatzProgram& prog,
                            const Eigen::VectorXd& theta);

/// Exact analytic derivative of full_state with respect to parameter k.
Eigen::VectorXcd derivative_state(const AnsatzProgram& prog,
                                  const Eigen::VectorXd& theta, int k);

/// Decomposition of derivative_state(k) into unit-norm circuit states with
/// classical prefactors: sum_g prefactor_g * state_g == derivative_state(k).
/// This is the granularity at which the sampled estimator draws shots.
struct Insertion {
  Complex prefactor;
  Eigen::VectorXcd state;  // unit norm
};
std::vector<Insertion> insertion_states(const AnsatzProgram& prog,
                                        const Eigen::VectorXd& theta, int k);

/// General two-qubit gate: ZYZ Euler rotations on each qubit before and
/// after the entangling core exp(i(p12 XX + p13 YY + p14 ZZ)); 15 params,
/// surjective onto SU(4) up to global phase.
Eigen::Matrix4cd general_two_qubit(const Eigen::Ref<const Eigen::VectorXd>& p);
/// Analytic derivative of general_two_qubit with respect to parameter j.
Eigen::Matrix4cd general_two_qubit_derivative(
    const Eigen::Ref<const Eigen::VectorXd>& p, int j);

/// Apply a 4x4 matrix to the qubit pair (2*site, 2*site+1) of a state
/// vector; local index is bit(2*site) + 2*bit(2*site+1).
void apply_two_qubit(Eigen::VectorXcd& v, const Eigen::Matrix4cd& u, int site);

/// Structured-text dump of the gate list, groups and parameter map.
std::string describe(const AnsatzProgram& prog);

}  // namespace vql
