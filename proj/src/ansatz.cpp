#include "vql/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace vql {

namespace {

constexpr Complex kI(0, 1);

// exp(z * Lambda) v = cosh(z) v + sinh(z) (Lambda v), using Lambda^2 = I.
void apply_rotation_inplace(Eigen::VectorXcd& v, const PauliString& lambda,
                            Complex z) {
  if (lambda.is_identity()) {
    v *= std::exp(z);
    return;
  }
  Eigen::VectorXcd lv = apply_pauli_string(lambda, v);
  v = std::cosh(z) * v + std::sinh(z) * lv;
}

Eigen::Matrix4cd dense_pair_exp(Complex z, const PauliString& local2) {
  Eigen::Matrix4cd delta = to_dense(local2);
  return std::cosh(z) * Eigen::Matrix4cd::Identity() + std::sinh(z) * delta;
}

// Product of the gate's non-unitary factors (without the identity scalar);
// factors[0] applied first.
Eigen::Matrix4cd nu_matrix(const GateSpec& g, const Eigen::VectorXd& theta) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  for (const auto& f : g.factors)
    m = dense_pair_exp(theta[f.param] * f.coeff, f.pair_string) * m;
  return m;
}

double nu_scalar(const GateSpec& g, const Eigen::VectorXd& theta) {
  if (g.identity_param < 0) return 1.0;
  return std::exp(theta[g.identity_param] * g.identity_coeff);
}

bool nu_involves(const GateSpec& g, int k) {
  if (g.identity_param == k) return true;
  for (const auto& f : g.factors)
    if (f.param == k) return true;
  return false;
}

// d/dtheta_k of [scalar * product], by product rule over the factors owning
// parameter k plus the identity-scalar contribution.
Eigen::Matrix4cd nu_dmatrix(const GateSpec& g, const Eigen::VectorXd& theta,
                            int k) {
  const int nf = static_cast<int>(g.factors.size());
  std::vector<Eigen::Matrix4cd> prefix(nf + 1);  // prefix[j] = F_{j-1}...F_0
  prefix[0] = Eigen::Matrix4cd::Identity();
  for (int j = 0; j < nf; ++j) {
    const auto& f = g.factors[j];
    prefix[j + 1] =
        dense_pair_exp(theta[f.param] * f.coeff, f.pair_string) * prefix[j];
  }
  std::vector<Eigen::Matrix4cd> suffix(nf + 1);  // suffix[j] = F_{nf-1}...F_j
  suffix[nf] = Eigen::Matrix4cd::Identity();
  for (int j = nf - 1; j >= 0; --j) {
    const auto& f = g.factors[j];
    suffix[j] =
        suffix[j + 1] * dense_pair_exp(theta[f.param] * f.coeff, f.pair_string);
  }
  Eigen::Matrix4cd d = Eigen::Matrix4cd::Zero();
  for (int j = 0; j < nf; ++j) {
    const auto& f = g.factors[j];
    if (f.param != k) continue;
    d += suffix[j + 1] * (f.coeff * to_dense(f.pair_string)) * prefix[j + 1];
  }
  if (g.identity_param == k) d += g.identity_coeff * prefix[nf];
  return nu_scalar(g, theta) * d;
}

bool gate_involves(const GateSpec& g, int k) {
  switch (g.kind) {
    case GateKind::rotation:
      return g.param == k;
    case GateKind::nonunitary_sim:
      return nu_involves(g, k);
    case GateKind::general_two_qubit:
      return k >= g.param_base && k < g.param_base + 15;
  }
  return false;
}

// Raw linear action of a gate (non-unitary factors applied directly).
void apply_gate_raw(const GateSpec& g, const Eigen::VectorXd& theta,
                    Eigen::VectorXcd& v) {
  switch (g.kind) {
    case GateKind::rotation:
      apply_rotation_inplace(v, g.generator, theta[g.param] * g.coeff);
      break;
    case GateKind::nonunitary_sim: {
      Eigen::Matrix4cd m = nu_scalar(g, theta) * nu_matrix(g, theta);
      apply_two_qubit(v, m, g.site);
      break;
    }
    case GateKind::general_two_qubit:
      apply_two_qubit(v, general_two_qubit(theta.segment(g.param_base, 15)),
                      g.site);
      break;
  }
}

// Raw derivative matrix action applied to the state before the gate.
Eigen::VectorXcd apply_gate_derivative(const GateSpec& g,
                                       const Eigen::VectorXd& theta, int k,
                                       const Eigen::VectorXcd& v_before) {
  switch (g.kind) {
    case GateKind::rotation: {
      Eigen::VectorXcd w = v_before;
      apply_rotation_inplace(w, g.generator, theta[g.param] * g.coeff);
      return g.coeff * apply_pauli_string(g.generator, w);
    }
    case GateKind::nonunitary_sim: {
      Eigen::VectorXcd w = v_before;
      apply_two_qubit(w, nu_dmatrix(g, theta, k), g.site);
      return w;
    }
    case GateKind::general_two_qubit: {
      Eigen::VectorXcd w = v_before;
      apply_two_qubit(
          w,
          general_two_qubit_derivative(theta.segment(g.param_base, 15),
                                       k - g.param_base),
          g.site);
      return w;
    }
  }
  return v_before;
}

void check_theta(const AnsatzProgram& prog, const Eigen::VectorXd& theta) {
  if (theta.size() != prog.n_params)
    throw dimension_error("parameter vector length " +
                          std::to_string(theta.size()) + " != " +
                          std::to_string(prog.n_params));
}

int min_support(const PauliString& s) {
  auto sup = s.support();
  return sup.empty() ? s.n() : sup.front();
}

// Localize a pair-supported 2N-qubit string to a 2-qubit string on
// (2*site, 2*site+1).
PauliString localize_pair(const PauliString& s, int site) {
  PauliString local(2);
  local.set(0, s.label(2 * site));
  local.set(1, s.label(2 * site + 1));
  return local;
}

// Reduced 4x4 density matrix of the qubit pair of `site`.
Eigen::Matrix4cd reduced_pair_density(const Eigen::VectorXcd& psi, int site) {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  const int64_t dim = psi.size();
  const int64_t b0 = int64_t{1} << (2 * site);
  const int64_t b1 = int64_t{1} << (2 * site + 1);
  for (int64_t m = 0; m < dim; ++m) {
    if (m & (b0 | b1)) continue;
    Eigen::Vector4cd loc;
    loc << psi[m], psi[m | b0], psi[m | b1], psi[m | b0 | b1];
    rho += loc * loc.adjoint();
  }
  return rho;
}

Eigen::Matrix2cd rz_gate(double t) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(Complex(0, -t / 2));
  m(1, 1) = std::exp(Complex(0, t / 2));
  return m;
}

Eigen::Matrix2cd ry_gate(double t) {
  Eigen::Matrix2cd m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

Eigen::Matrix2cd pauli2_dense(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::Matrix4cd kron22(const Eigen::Matrix2cd& hi, const Eigen::Matrix2cd& lo) {
  Eigen::Matrix4cd out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.block<2, 2>(2 * a, 2 * b) = hi(a, b) * lo;
  return out;
}

// euler(a,b,c) = Rz(a) Ry(b) Rz(c); deriv < 0 gives the plain product,
// deriv in {0,1,2} inserts the corresponding generator.
Eigen::Matrix2cd euler_zyz(double a, double b, double c, int deriv = -1) {
  Eigen::Matrix2cd za = rz_gate(a), yb = ry_gate(b), zc = rz_gate(c);
  const Complex mihalf(0, -0.5);
  Eigen::Matrix2cd out = za * yb * zc;
  if (deriv == 0) out = (mihalf * pauli2_dense(Pauli::Z)) * out;
  if (deriv == 1) out = za * (mihalf * pauli2_dense(Pauli::Y)) * yb * zc;
  if (deriv == 2) out = out * (mihalf * pauli2_dense(Pauli::Z));
  return out;
}

Eigen::Matrix4cd entangling_core(double x, double y, double z, int deriv = -1) {
  static const std::array<Pauli, 3> kAxes = {Pauli::X, Pauli::Y, Pauli::Z};
  const double p[3] = {x, y, z};
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Identity();
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix4cd pp = kron22(pauli2_dense(kAxes[k]), pauli2_dense(kAxes[k]));
    out = (std::cos(p[k]) * Eigen::Matrix4cd::Identity() +
           kI * std::sin(p[k]) * pp) *
          out;
    if (deriv == k) out = (kI * pp) * out;
  }
  return out;
}

}  // namespace

Eigen::VectorXd AnsatzProgram::initial_theta() const {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_params);
  if (has_free_factor) theta[n_params - 2] = 1.0;
  return theta;
}

void apply_two_qubit(Eigen::VectorXcd& v, const Eigen::Matrix4cd& u, int site) {
  const int64_t b0 = int64_t{1} << (2 * site);
  const int64_t b1 = int64_t{1} << (2 * site + 1);
  const int64_t dim = v.size();
  for (int64_t m = 0; m < dim; ++m) {
    if (m & (b0 | b1)) continue;
    Eigen::Vector4cd loc;
    loc << v[m], v[m | b0], v[m | b1], v[m | b0 | b1];
    Eigen::Vector4cd out = u * loc;
    v[m] = out[0];
    v[m | b0] = out[1];
    v[m | b1] = out[2];
    v[m | b0 | b1] = out[3];
  }
}

Eigen::Matrix4cd general_two_qubit(const Eigen::Ref<const Eigen::VectorXd>& p) {
  Eigen::Matrix4cd pre = kron22(euler_zyz(p[3], p[4], p[5]),
                                euler_zyz(p[0], p[1], p[2]));
  Eigen::Matrix4cd post = kron22(euler_zyz(p[9], p[10], p[11]),
                                 euler_zyz(p[6], p[7], p[8]));
  return post * entangling_core(p[12], p[13], p[14]) * pre;
}

Eigen::Matrix4cd general_two_qubit_derivative(
    const Eigen::Ref<const Eigen::VectorXd>& p, int j) {
  if (j < 0 || j >= 15)
    throw dimension_error("general gate parameter index out of range");
  auto pre = [&](int deriv_a, int deriv_b) {
    return kron22(euler_zyz(p[3], p[4], p[5], deriv_b),
                  euler_zyz(p[0], p[1], p[2], deriv_a));
  };
  auto post = [&](int deriv_a, int deriv_b) {
    return kron22(euler_zyz(p[9], p[10], p[11], deriv_b),
                  euler_zyz(p[6], p[7], p[8], deriv_a));
  };
  Eigen::Matrix4cd core = entangling_core(p[12], p[13], p[14]);
  if (j < 3) return post(-1, -1) * core * pre(j, -1);
  if (j < 6) return post(-1, -1) * core * pre(-1, j - 3);
  if (j < 9) return post(j - 6, -1) * core * pre(-1, -1);
  if (j < 12) return post(-1, j - 9) * core * pre(-1, -1);
  return post(-1, -1) * entangling_core(p[12], p[13], p[14], j - 12) *
         pre(-1, -1);
}

std::pair<Complex, Eigen::Matrix4cd> nonunitary_to_unitary(
    const Eigen::Matrix4cd& g, const Eigen::Vector4cd& psi) {
  Eigen::Vector4cd image = g * psi;
  const double a = image.norm();
  if (a <= 1e-14)
    throw evolver_error("nonunitary_to_unitary: gate annihilates the state");
  Eigen::Vector4cd phi = image / a;

  // Complete an orthonormal basis around the seed by modified Gram-Schmidt,
  // picking the computational basis vector with the largest residual first.
  auto complete = [](const Eigen::Vector4cd& seed) {
    Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
    b.col(0) = seed.normalized();
    int cols = 1;
    std::array<bool, 4> used{false, false, false, false};
    while (cols < 4) {
      int best = -1;
      double best_norm = -1;
      Eigen::Vector4cd best_res;
      for (int j = 0; j < 4; ++j) {
        if (used[j]) continue;
        Eigen::Vector4cd r = Eigen::Vector4cd::Unit(j);
        for (int c = 0; c < cols; ++c) r -= b.col(c).dot(r) * b.col(c);
        if (r.norm() > best_norm) {
          best_norm = r.norm();
          best = j;
          best_res = r;
        }
      }
      used[best] = true;
      b.col(cols++) = best_res / best_norm;
    }
    return b;
  };
  Eigen::Matrix4cd b_psi = complete(psi);
  Eigen::Matrix4cd b_phi = complete(phi);
  return {Complex(a, 0), b_phi * b_psi.adjoint()};
}

SuperState apply(const AnsatzProgram& prog, const Eigen::VectorXd& theta) {
  check_theta(prog, theta);
  SuperState out;
  out.n_spins = prog.n_spins;
  out.amps = prog.initial;
  out.a = Complex(1, 0);
  for (const auto& g : prog.gates) {
    switch (g.kind) {
      case GateKind::rotation:
        apply_rotation_inplace(out.amps, g.generator, theta[g.param] * g.coeff);
        break;
      case GateKind::nonunitary_sim: {
        auto [an, u] = nonunitary_to_unitary(nu_matrix(g, theta), g.pair_input);
        apply_two_qubit(out.amps, u, g.site);
        out.a *= an * nu_scalar(g, theta);
        break;
      }
      case GateKind::general_two_qubit:
        apply_two_qubit(out.amps,
                        general_two_qubit(theta.segment(g.param_base, 15)),
                        g.site);
        break;
    }
  }
  if (prog.has_free_factor)
    out.a *= Complex(theta[prog.n_params - 2], theta[prog.n_params - 1]);
  return out;
}

Eigen::VectorXcd full_state(const AnsatzProgram& prog,
                            const Eigen::VectorXd& theta) {
  check_theta(prog, theta);
  Eigen::VectorXcd v = prog.initial;
  for (const auto& g : prog.gates) apply_gate_raw(g, theta, v);
  if (prog.has_free_factor)
    v *= Complex(theta[prog.n_params - 2], theta[prog.n_params - 1]);
  return v;
}

Eigen::VectorXcd derivative_state(const AnsatzProgram& prog,
                                  const Eigen::VectorXd& theta, int k) {
  check_theta(prog, theta);
  if (k < 0 || k >= prog.n_params)
    throw dimension_error("derivative_state: parameter index out of range");

  Eigen::VectorXcd v = prog.initial;
  const bool is_a_param =
      prog.has_free_factor && k >= prog.n_params - 2;

  if (is_a_param) {
    for (const auto& g : prog.gates) apply_gate_raw(g, theta, v);
    return (k == prog.n_params - 2) ? v : Eigen::VectorXcd(kI * v);
  }

  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(v.size());
  for (const auto& g : prog.gates) {
    apply_gate_raw(g, theta, d);
    if (gate_involves(g, k)) d += apply_gate_derivative(g, theta, k, v);
    apply_gate_raw(g, theta, v);
  }
  if (prog.has_free_factor)
    d *= Complex(theta[prog.n_params - 2], theta[prog.n_params - 1]);
  return d;
}

std::vector<Insertion> insertion_states(const AnsatzProgram& prog,
                                        const Eigen::VectorXd& theta, int k) {
  check_theta(prog, theta);
  const int n_gates = static_cast<int>(prog.gates.size());

  // Unit-circuit walk: non-unitary gates replaced by their (a, U) pairs.
  std::vector<Eigen::Matrix4cd> nu_unitary(n_gates);
  std::vector<Complex> gate_phi(n_gates, Complex(1, 0));
  std::vector<std::pair<int, Eigen::VectorXcd>> before;  // contributing gates
  Eigen::VectorXcd v = prog.initial;
  Complex big_phi(1, 0);
  for (int i = 0; i < n_gates; ++i) {
    const auto& g = prog.gates[i];
    if (gate_involves(g, k)) before.emplace_back(i, v);
    switch (g.kind) {
      case GateKind::rotation:
        apply_rotation_inplace(v, g.generator, theta[g.param] * g.coeff);
        break;
      case GateKind::nonunitary_sim: {
        auto [an, u] = nonunitary_to_unitary(nu_matrix(g, theta), g.pair_input);
        nu_unitary[i] = u;
        gate_phi[i] = an * nu_scalar(g, theta);
        big_phi *= gate_phi[i];
        apply_two_qubit(v, u, g.site);
        break;
      }
      case GateKind::general_two_qubit:
        apply_two_qubit(v, general_two_qubit(theta.segment(g.param_base, 15)),
                        g.site);
        break;
    }
  }
  const Complex free = prog.has_free_factor
                           ? Complex(theta[prog.n_params - 2],
                                     theta[prog.n_params - 1])
                           : Complex(1, 0);

  std::vector<Insertion> out;
  if (prog.has_free_factor && k >= prog.n_params - 2) {
    Complex pref = (k == prog.n_params - 2) ? big_phi : kI * big_phi;
    out.push_back({pref, v});
    return out;
  }

  for (const auto& [gi, v_before] : before) {
    const auto& g = prog.gates[gi];
    Eigen::VectorXcd x = apply_gate_derivative(g, theta, k, v_before);
    for (int i = gi + 1; i < n_gates; ++i) {
      const auto& h = prog.gates[i];
      switch (h.kind) {
        case GateKind::rotation:
          apply_rotation_inplace(x, h.generator, theta[h.param] * h.coeff);
          break;
        case GateKind::nonunitary_sim:
          apply_two_qubit(x, nu_unitary[i], h.site);
          break;
        case GateKind::general_two_qubit:
          apply_two_qubit(x, general_two_qubit(theta.segment(h.param_base, 15)),
                          h.site);
          break;
      }
    }
    const double eta = x.norm();
    if (eta <= 1e-300) continue;
    out.push_back({eta * (big_phi / gate_phi[gi]) * free, x / eta});
  }
  return out;
}

AnsatzProgram build_closed(const CompiledLiouvillian& lv, int m,
                           bool shared_layers, const SuperState& initial) {
  if (lv.dissipative())
    throw config_error(
        "build_closed: Liouvillian has a dissipator; use the open ansatz");
  if (m < 1) throw config_error("build_closed: m must be >= 1");

  AnsatzProgram prog;
  prog.n_spins = lv.n_spins;
  prog.m = m;
  prog.initial = initial.amps;

  const auto& terms = lv.l_h.terms();
  std::vector<PauliString> strings;
  strings.reserve(terms.size());
  for (const auto& [c, s] : terms) strings.push_back(s);
  CommutingPartition part = commuting_partition(strings);

  // term indices per group, site-ascending within the group
  std::vector<std::vector<int>> group_terms(part.n_groups);
  for (int t = 0; t < static_cast<int>(terms.size()); ++t)
    group_terms[part.group_of[t]].push_back(t);
  for (auto& gt : group_terms)
    std::stable_sort(gt.begin(), gt.end(), [&](int a, int b) {
      int ma = min_support(strings[a]), mb = min_support(strings[b]);
      if (ma != mb) return ma < mb;
      return strings[a].lex_key() < strings[b].lex_key();
    });

  for (int r = 1; r <= m; ++r) {
    for (int gidx = 0; gidx < part.n_groups; ++gidx) {
      for (int t : group_terms[gidx]) {
        GateSpec gate;
        gate.kind = GateKind::rotation;
        gate.layer = r;
        gate.coeff = terms[t].first;
        gate.generator = terms[t].second;
        gate.param = shared_layers ? gidx : (r - 1) * part.n_groups + gidx;
        prog.gates.push_back(std::move(gate));
      }
    }
  }
  prog.n_params = shared_layers ? part.n_groups : m * part.n_groups;
  for (int p = 0; p < prog.n_params; ++p) {
    if (shared_layers)
      prog.param_names.push_back("h.g" + std::to_string(p));
    else
      prog.param_names.push_back("L" + std::to_string(p / part.n_groups + 1) +
                                 ".h.g" + std::to_string(p % part.n_groups));
  }
  return prog;
}

AnsatzProgram build_open(const CompiledLiouvillian& lv, int m,
                         const SuperState& initial, bool share_general) {
  if (m < 1) throw config_error("build_open: m must be >= 1");
  const int n_spins = lv.n_spins;

  AnsatzProgram prog;
  prog.n_spins = n_spins;
  prog.m = m;
  prog.initial = initial.amps;

  // Extract per-pair input states; the r=1 unitary replacement needs a
  // product state over the qubit pairs.
  std::vector<Eigen::Vector4cd> pair_state(n_spins);
  for (int s = 0; s < n_spins; ++s) {
    Eigen::Matrix4cd rho = reduced_pair_density(prog.initial, s);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    const double top = es.eigenvalues()(3);
    if (top < 1.0 - 1e-9)
      throw config_error(
          "build_open: initial state is not a product state over qubit pairs");
    pair_state[s] = es.eigenvectors().col(3);
  }

  // Sort the Hermitian dissipator terms into the identity term and
  // pair-local terms; anything wider cannot go into the r=1 gates.
  struct PairTerm {
    Complex coeff;
    PauliString local;
    int term_index;
  };
  std::vector<std::vector<PairTerm>> herm_by_site(n_spins);
  int identity_term = -1;
  double identity_coeff = 0.0;
  const auto& herm_terms = lv.d_hermitian.terms();
  std::vector<PauliString> herm_strings;
  for (int t = 0; t < static_cast<int>(herm_terms.size()); ++t) {
    const auto& [c, s] = herm_terms[t];
    herm_strings.push_back(s);
    auto sup = s.support();
    if (sup.empty()) {
      identity_term = t;
      identity_coeff = c.real();
      continue;
    }
    int site = sup.front() / 2;
    if (sup.back() / 2 != site)
      throw config_error(
          "build_open: dissipator term spans more than one qubit pair; the "
          "open ansatz needs single-site jump operators");
    herm_by_site[site].push_back({c, localize_pair(s, site), t});
  }
  CommutingPartition herm_part = commuting_partition(herm_strings);

  int next_param = 0;
  auto fresh_params = [&](int count) {
    int base = next_param;
    next_param += count;
    return base;
  };

  // Layer-1 dissipative parameters are shared across the whole register.
  const int diss_base = fresh_params(herm_part.n_groups);
  for (int g = 0; g < herm_part.n_groups; ++g)
    prog.param_names.push_back("L1.diss.g" + std::to_string(g));

  const auto& anti_terms = lv.d_antihermitian.terms();
  std::vector<PauliString> anti_strings;
  for (const auto& [c, s] : anti_terms) anti_strings.push_back(s);
  CommutingPartition anti_part = commuting_partition(anti_strings);

  const auto& h_terms = lv.l_h.terms();
  std::vector<PauliString> h_strings;
  for (const auto& [c, s] : h_terms) h_strings.push_back(s);
  CommutingPartition h_part = commuting_partition(h_strings);

  auto order_of_group = [](const std::vector<PauliString>& strings,
                           const CommutingPartition& part) {
    std::vector<std::vector<int>> group_terms(part.n_groups);
    for (int t = 0; t < static_cast<int>(strings.size()); ++t)
      group_terms[part.group_of[t]].push_back(t);
    for (auto& gt : group_terms)
      std::stable_sort(gt.begin(), gt.end(), [&](int a, int b) {
        int ma = min_support(strings[a]), mb = min_support(strings[b]);
        if (ma != mb) return ma < mb;
        return strings[a].lex_key() < strings[b].lex_key();
      });
    return group_terms;
  };
  auto anti_groups = order_of_group(anti_strings, anti_part);
  auto h_groups = order_of_group(h_strings, h_part);

  for (int r = 1; r <= m; ++r) {
    if (r == 1) {
      bool identity_attached = false;
      for (int s = 0; s < n_spins; ++s) {
        if (herm_by_site[s].empty() && identity_term < 0) continue;
        GateSpec gate;
        gate.kind = GateKind::nonunitary_sim;
        gate.layer = 1;
        gate.site = s;
        gate.pair_input = pair_state[s];
        auto terms_here = herm_by_site[s];
        std::stable_sort(terms_here.begin(), terms_here.end(),
                         [&](const PairTerm& a, const PairTerm& b) {
                           int ga = herm_part.group_of[a.term_index];
                           int gb = herm_part.group_of[b.term_index];
                           if (ga != gb) return ga < gb;
                           return a.local.lex_key() < b.local.lex_key();
                         });
        for (const auto& pt : terms_here)
          gate.factors.push_back(
              {pt.coeff, pt.local,
               diss_base + herm_part.group_of[pt.term_index]});
        if (!identity_attached && identity_term >= 0) {
          gate.identity_coeff = identity_coeff;
          gate.identity_param = diss_base + herm_part.group_of[identity_term];
          identity_attached = true;
        }
        if (gate.factors.empty() && gate.identity_param < 0) continue;
        prog.gates.push_back(std::move(gate));
      }
    } else {
      int base = share_general ? fresh_params(15) : -1;
      if (share_general)
        for (int p = 0; p < 15; ++p)
          prog.param_names.push_back("L" + std::to_string(r) + ".g2q.p" +
                                     std::to_string(p));
      for (int s = 0; s < n_spins; ++s) {
        GateSpec gate;
        gate.kind = GateKind::general_two_qubit;
        gate.layer = r;
        gate.site = s;
        if (share_general) {
          gate.param_base = base;
        } else {
          gate.param_base = fresh_params(15);
          for (int p = 0; p < 15; ++p)
            prog.param_names.push_back("L" + std::to_string(r) + ".g2q.s" +
                                       std::to_string(s) + ".p" +
                                       std::to_string(p));
        }
        prog.gates.push_back(std::move(gate));
      }
    }

    const int anti_base = fresh_params(anti_part.n_groups);
    for (int g = 0; g < anti_part.n_groups; ++g)
      prog.param_names.push_back("L" + std::to_string(r) + ".uu.g" +
                                 std::to_string(g));
    for (int gidx = 0; gidx < anti_part.n_groups; ++gidx)
      for (int t : anti_groups[gidx]) {
        GateSpec gate;
        gate.kind = GateKind::rotation;
        gate.layer = r;
        gate.coeff = anti_terms[t].first;
        gate.generator = anti_terms[t].second;
        gate.param = anti_base + gidx;
        prog.gates.push_back(std::move(gate));
      }

    const int h_base = fresh_params(h_part.n_groups);
    for (int g = 0; g < h_part.n_groups; ++g)
      prog.param_names.push_back("L" + std::to_string(r) + ".h.g" +
                                 std::to_string(g));
    for (int gidx = 0; gidx < h_part.n_groups; ++gidx)
      for (int t : h_groups[gidx]) {
        GateSpec gate;
        gate.kind = GateKind::rotation;
        gate.layer = r;
        gate.coeff = h_terms[t].first;
        gate.generator = h_terms[t].second;
        gate.param = h_base + gidx;
        prog.gates.push_back(std::move(gate));
      }
  }

  prog.has_free_factor = (m > 1);
  prog.n_params = next_param + (prog.has_free_factor ? 2 : 0);
  if (prog.has_free_factor) {
    prog.param_names.push_back("a.re");
    prog.param_names.push_back("a.im");
  }
  return prog;
}

std::string describe(const AnsatzProgram& prog) {
  std::ostringstream os;
  os << "ansatz n_spins=" << prog.n_spins << " qubits=" << prog.n_qubits()
     << " m=" << prog.m << " params=" << prog.n_params
     << " free_factor=" << (prog.has_free_factor ? "yes" : "no") << "\n";
  for (size_t i = 0; i < prog.gates.size(); ++i) {
    const auto& g = prog.gates[i];
    os << "gate " << i << " layer=" << g.layer << " ";
    switch (g.kind) {
      case GateKind::rotation:
        os << "rotation param=" << g.param << " coeff=(" << g.coeff.real()
           << "," << g.coeff.imag() << ") gen=" << g.generator.str();
        break;
      case GateKind::nonunitary_sim:
        os << "nonunitary site=" << g.site;
        for (const auto& f : g.factors)
          os << " [param=" << f.param << " coeff=(" << f.coeff.real() << ","
             << f.coeff.imag() << ") " << f.pair_string.str() << "]";
        if (g.identity_param >= 0)
          os << " [identity param=" << g.identity_param
             << " coeff=" << g.identity_coeff << "]";
        break;
      case GateKind::general_two_qubit:
        os << "general2q site=" << g.site << " params=[" << g.param_base << ","
           << g.param_base + 14 << "]";
        break;
    }
    os << "\n";
  }
  os << "params:";
  for (const auto& name : prog.param_names) os << " " << name;
  os << "\n";
  return os.str();
}

}  // namespace vql
