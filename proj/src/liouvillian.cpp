#include "vql/liouvillian.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "vql/superstate.hpp"

namespace vql {

namespace {

// Dense 2x2 Paulis for the per-site block construction.
Eigen::Matrix2cd pauli2(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// 4x4 block of the single-site left/right multiplication superoperator in
// the qubit-pair basis of the site: local index l = b_{2j} + 2*b_{2j+1}
// with (b_{2j}, b_{2j+1}) the two bits of the Pauli code.
Eigen::Matrix4cd site_block(Pauli p, bool left) {
  auto local_index = [](int code) { return ((code >> 1) & 1) + 2 * (code & 1); };
  Eigen::Matrix4cd block = Eigen::Matrix4cd::Zero();
  Eigen::Matrix2cd sp = pauli2(p);
  for (int alpha = 0; alpha < 4; ++alpha) {
    Eigen::Matrix2cd sa = pauli2(static_cast<Pauli>(alpha));
    for (int beta = 0; beta < 4; ++beta) {
      Eigen::Matrix2cd sb = pauli2(static_cast<Pauli>(beta));
      Complex v = left ? (sb * sp * sa).trace() : (sb * sa * sp).trace();
      block(local_index(beta), local_index(alpha)) = 0.5 * v;
    }
  }
  return block;
}

// Pauli decomposition of a 4x4 matrix acting on qubits (2*site, 2*site+1)
// of a 2N-qubit register; qubit 2*site is the low local bit.
PauliSum decompose_pair(const Eigen::Matrix4cd& m, int site, int n_qubits) {
  PauliSum out(n_qubits);
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      Eigen::Matrix4cd basis = Eigen::Matrix4cd::Zero();
      // kron with qubit 2*site least significant
      Eigen::Matrix2cd lo = pauli2(static_cast<Pauli>(mu));
      Eigen::Matrix2cd hi = pauli2(static_cast<Pauli>(nu));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          basis.block<2, 2>(2 * a, 2 * b) = hi(a, b) * lo;
      Complex c = (basis.adjoint() * m).trace() / 4.0;
      if (std::abs(c) <= PauliSum::kDropTol) continue;
      PauliString s(n_qubits);
      s.set(2 * site, static_cast<Pauli>(mu));
      s.set(2 * site + 1, static_cast<Pauli>(nu));
      out.add(c, s);
    }
  }
  return out.canonicalize();
}

PauliSum mult_superop(const PauliString& p, bool left) {
  const int n_qubits = 2 * p.n();
  PauliSum result(n_qubits);
  result.add(Complex(1, 0), PauliString(n_qubits));
  for (int j = 0; j < p.n(); ++j) {
    if (p.label(j) == Pauli::I) continue;
    PauliSum pair = decompose_pair(site_block(p.label(j), left), j, n_qubits);
    result = result * pair;
  }
  return result.canonicalize();
}

}  // namespace

void LindbladModel::validate(double tol) const {
  if (n_spins < 1) throw config_error("LindbladModel: n_spins must be >= 1");
  if (hamiltonian.n() != n_spins)
    throw dimension_error("LindbladModel: Hamiltonian qubit count mismatch");
  PauliSum h_minus_hdag = hamiltonian;
  h_minus_hdag -= dagger(hamiltonian);
  for (const auto& [c, s] : h_minus_hdag.terms())
    if (std::abs(c) > tol)
      throw config_error("LindbladModel: Hamiltonian is not Hermitian");
  for (const auto& jump : jumps)
    if (jump.n() != n_spins)
      throw dimension_error("LindbladModel: jump operator qubit count mismatch");
}

PauliSum left_mult_superop(const PauliString& p) { return mult_superop(p, true); }
PauliSum right_mult_superop(const PauliString& p) { return mult_superop(p, false); }

PauliSum left_mult_superop(const PauliSum& op) {
  PauliSum out(2 * op.n());
  for (const auto& [c, s] : op.terms()) out += c * left_mult_superop(s);
  return out.canonicalize();
}

PauliSum right_mult_superop(const PauliSum& op) {
  PauliSum out(2 * op.n());
  for (const auto& [c, s] : op.terms()) out += c * right_mult_superop(s);
  return out.canonicalize();
}

CompiledLiouvillian compile(const LindbladModel& model, Picture picture) {
  model.validate();
  const Complex i(0, 1);

  // L_H = -i (left(H) - right(H))
  PauliSum l_h = left_mult_superop(model.hamiltonian);
  l_h -= right_mult_superop(model.hamiltonian);
  l_h *= -i;

  // D = sum_i [ left(L) right(L^dag) - 1/2 left(L^dag L) - 1/2 right(L^dag L) ]
  PauliSum dis(2 * model.n_spins);
  for (const auto& jump : model.jumps) {
    PauliSum jd = dagger(jump);
    PauliSum jdj = jd * jump;
    dis += left_mult_superop(jump) * right_mult_superop(jd);
    dis -= Complex(0.5, 0) * left_mult_superop(jdj);
    dis -= Complex(0.5, 0) * right_mult_superop(jdj);
  }

  if (picture == Picture::heisenberg) {
    l_h = dagger(l_h);
    dis = dagger(dis);
  }

  CompiledLiouvillian out;
  out.n_spins = model.n_spins;
  out.picture = picture;
  out.l_h = l_h.canonicalize();
  PauliSum dis_dag = dagger(dis);
  PauliSum herm = dis;
  herm += dis_dag;
  herm *= Complex(0.5, 0);
  PauliSum anti = dis;
  anti -= dis_dag;
  anti *= Complex(0.5, 0);
  out.d_hermitian = herm.canonicalize();
  out.d_antihermitian = anti.canonicalize();
  return out;
}

CommutingPartition commuting_partition(const std::vector<PauliString>& strings) {
  const int n = static_cast<int>(strings.size());
  CommutingPartition out;
  out.group_of.assign(n, -1);
  if (n == 0) return out;

  // anticommutation adjacency
  std::vector<std::vector<int>> adj(n);
  std::vector<int> degree(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!strings[i].commutes_with(strings[j])) {
        adj[i].push_back(j);
        adj[j].push_back(i);
        ++degree[i];
        ++degree[j];
      }

  // greedy coloring, largest degree first (ties by input order)
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return degree[a] > degree[b]; });
  std::vector<int> color(n, -1);
  int n_colors = 0;
  for (int v : order) {
    std::vector<bool> used(static_cast<size_t>(n_colors) + 1, false);
    for (int w : adj[v])
      if (color[w] >= 0) used[color[w]] = true;
    int c = 0;
    while (used[c]) ++c;
    color[v] = c;
    n_colors = std::max(n_colors, c + 1);
  }

  // relabel colors by first appearance in input order
  std::vector<int> relabel(n_colors, -1);
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (relabel[color[i]] < 0) relabel[color[i]] = next++;
  for (int i = 0; i < n; ++i) out.group_of[i] = relabel[color[i]];
  out.n_groups = n_colors;
  return out;
}

}  // namespace vql
