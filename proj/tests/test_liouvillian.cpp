#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "vql/experiment.hpp"
#include "vql/liouvillian.hpp"

using namespace vql;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  REQUIRE_MESSAGE(is.good(), "missing fixture ", path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// dense matrix of a superstate-space Pauli sum for comparison with the
// column-stacking oracle
Eigen::MatrixXcd dense_superop(const PauliSum& op) {
  return oracles::dense_sum(op);
}

}  // namespace

TEST_SUITE_BEGIN("liouvillian");

TEST_CASE("left/right multiplication by the identity is the identity") {
  PauliSum left = left_mult_superop(PauliString(2));
  REQUIRE(left.size() == 1);
  CHECK(left.terms()[0].first == Complex(1, 0));
  CHECK(left.terms()[0].second.is_identity());
  CHECK(right_mult_superop(PauliString(2)).approx_equal(left, 0));
}

TEST_CASE("left multiplication by sigma_z permutes the pair basis") {
  PauliSum op = left_mult_superop(PauliString::from_labels("Z"));
  auto act = [&](int64_t idx) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(4);
    e[idx] = 1.0;
    return apply_pauli_sum(op, e);
  };
  // |00> <-> |11>, |01> -> i|10>, |10> -> -i|01>  (strings b0 b1)
  auto idx = [](const char* l) {
    return superstate_index(PauliString::from_labels(l));
  };
  CHECK(std::abs(act(idx("I"))[idx("Z")] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(act(idx("Z"))[idx("I")] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(act(idx("X"))[idx("Y")] - Complex(0, 1)) < 1e-14);
  CHECK(std::abs(act(idx("Y"))[idx("X")] - Complex(0, -1)) < 1e-14);
}

TEST_CASE("left/right superoperators match the column-stacking oracle") {
  for (int n = 1; n <= 2; ++n) {
    const int64_t hdim = int64_t{1} << n;
    Eigen::MatrixXcd s = oracles::pauli_basis_change(n);
    Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(hdim, hdim);
    for (int trial = 0; trial < 12; ++trial) {
      PauliString p = oracles::random_string(n);
      Eigen::MatrixXcd pd = oracles::dense_pauli(p);
      Eigen::MatrixXcd left_cs =
          s.adjoint() * oracles::kron_dense(eye, pd) * s;
      Eigen::MatrixXcd right_cs =
          s.adjoint() * oracles::kron_dense(pd.transpose(), eye) * s;
      CHECK((dense_superop(left_mult_superop(p)) - left_cs)
                .cwiseAbs()
                .maxCoeff() < 1e-13);
      CHECK((dense_superop(right_mult_superop(p)) - right_cs)
                .cwiseAbs()
                .maxCoeff() < 1e-13);
      // rho -> P rho Q commutes as left/right compositions
      PauliString q = oracles::random_string(n);
      PauliSum lr = left_mult_superop(p) * right_mult_superop(q);
      PauliSum rl = right_mult_superop(q) * left_mult_superop(p);
      CHECK(lr.approx_equal(rl, 1e-13));
    }
  }
}

TEST_CASE("compile reproduces the explicit N=2 Heisenberg TFI form") {
  LindbladModel model = build_tfi(2, 1.0, 1.0, Boundary::periodic);
  CompiledLiouvillian lv = compile(model, Picture::heisenberg);
  CHECK(lv.d_antihermitian.empty());
  CHECK(lv.d_hermitian.empty());

  // i h (y1 - z0 y1 + y3 - z2 y3) + i J/2 * signed permutations of
  // (y,x,x,x) and (x,y,y,y)
  PauliSum expect(4);
  const Complex ih(0, 1.0);
  expect.add(ih, PauliString::from_labels("IYII"));
  expect.add(-ih, PauliString::from_labels("ZYII"));
  expect.add(ih, PauliString::from_labels("IIIY"));
  expect.add(-ih, PauliString::from_labels("IIZY"));
  const Complex ij2(0, 0.5);
  const char* perms_yxxx[4] = {"YXXX", "XYXX", "XXYX", "XXXY"};
  const char* perms_xyyy[4] = {"XYYY", "YXYY", "YYXY", "YYYX"};
  for (int k = 0; k < 4; ++k) {
    const Complex sign = (k % 2 == 0) ? Complex(1, 0) : Complex(-1, 0);
    expect.add(sign * ij2, PauliString::from_labels(perms_yxxx[k]));
    expect.add(sign * ij2, PauliString::from_labels(perms_xyyy[k]));
  }
  expect.canonicalize();

  REQUIRE(lv.l_h.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(lv.l_h.terms()[i].second == expect.terms()[i].second);
    CHECK(std::abs(lv.l_h.terms()[i].first - expect.terms()[i].first) < 1e-14);
  }

  // golden fixture cross-check (generated independently)
  PauliSum fixture = pauli_sum_from_text(
      read_file(std::string(VQL_FIXTURES_DIR) +
                "/appendix_b_heisenberg_tfi_n2.txt"),
      4);
  CHECK(lv.l_h.approx_equal(fixture, 1e-12));
}

TEST_CASE("compile reproduces the explicit N=2 open TFI Liouvillian") {
  LindbladModel model = build_open_tfi(2, 1.0, 1.0, 0.5);
  CompiledLiouvillian lv = compile(model, Picture::schroedinger);
  PauliSum fixture = pauli_sum_from_text(
      read_file(std::string(VQL_FIXTURES_DIR) + "/appendix_b_open_tfi_n2.txt"),
      4);
  CHECK(lv.total().approx_equal(fixture, 1e-12));

  // spot-check the quoted dissipator terms: gamma/4 sigma^z_i, the pair
  // terms, and the constant
  const double g4 = 0.5 / 4.0;
  const PauliSum total = lv.total();
  auto coeff_of = [&](const char* labels) {
    PauliString s = PauliString::from_labels(labels);
    for (const auto& [c, t] : total.terms())
      if (t == s) return c;
    return Complex(0, 0);
  };
  CHECK(std::abs(coeff_of("ZIII") - Complex(g4, 0)) < 1e-14);
  CHECK(std::abs(coeff_of("IZII") - Complex(g4, 0)) < 1e-14);
  CHECK(std::abs(coeff_of("XXII") - Complex(-g4, 0)) < 1e-14);
  CHECK(std::abs(coeff_of("YYII") - Complex(g4, 0)) < 1e-14);
  CHECK(std::abs(coeff_of("XYII") - Complex(0, g4)) < 1e-14);
  CHECK(std::abs(coeff_of("YXII") - Complex(0, g4)) < 1e-14);
  CHECK(std::abs(coeff_of("IIII") - Complex(-0.5, 0)) < 1e-14);
}

TEST_CASE("zero model compiles to the zero operator") {
  LindbladModel model;
  model.n_spins = 2;
  model.hamiltonian = PauliSum(2);
  CompiledLiouvillian lv = compile(model, Picture::schroedinger);
  CHECK(lv.l_h.empty());
  CHECK(lv.d_antihermitian.empty());
  CHECK(lv.d_hermitian.empty());
}

TEST_CASE("dense equivalence, reality, trace row and splitting, N <= 3") {
  for (int n = 2; n <= 3; ++n) {
    for (bool open_system : {false, true}) {
      LindbladModel model =
          open_system ? build_open_tfi(n, 1.0, 1.0, 0.5)
                      : build_tfi(n, 1.0, 1.0, Boundary::periodic);
      for (Picture pic : {Picture::schroedinger, Picture::heisenberg}) {
        CompiledLiouvillian lv = compile(model, pic);
        Eigen::MatrixXcd dense = dense_superop(lv.total());
        Eigen::MatrixXcd oracle = oracles::lindblad_superop_pauli(model, pic);
        CHECK((dense - oracle).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(dense.imag().cwiseAbs().maxCoeff() < 1e-12);

        // splitting invariants
        PauliSum lh_plus_dag = lv.l_h;
        lh_plus_dag += dagger(lv.l_h);
        CHECK(lh_plus_dag.empty());
        PauliSum anti_plus_dag = lv.d_antihermitian;
        anti_plus_dag += dagger(lv.d_antihermitian);
        CHECK(anti_plus_dag.empty());
        PauliSum herm_minus_dag = lv.d_hermitian;
        herm_minus_dag -= dagger(lv.d_hermitian);
        CHECK(herm_minus_dag.empty());

        // trace preservation: row of P_0 vanishes (Schroedinger picture)
        if (pic == Picture::schroedinger)
          CHECK(dense.row(0).cwiseAbs().maxCoeff() < 1e-12);

        // locality: k1=1, k2=2 inputs give support on <= 4 contiguous
        // simulated qubits (wrap allowed on the periodic chain)
        const PauliSum compiled_total = lv.total();
        for (const auto& [c, s] : compiled_total.terms()) {
          auto sup = s.support();
          CHECK(static_cast<int>(sup.size()) <= 4);
          if (!sup.empty()) {
            int span = sup.back() - sup.front();
            bool contiguous = span <= 3;
            if (!contiguous) {
              // wrap window: qubits near both ends only
              bool wrap = true;
              for (int q : sup)
                wrap = wrap && (q <= 1 || q >= 2 * n - 2);
              contiguous = wrap;
            }
            CHECK(contiguous);
          }
        }
      }
    }
  }
}

TEST_CASE("compile validates the model") {
  LindbladModel bad;
  bad.n_spins = 1;
  PauliSum h(1);
  h.add(Complex(0, 1), PauliString::from_labels("X"));  // not Hermitian
  bad.hamiltonian = h;
  CHECK_THROWS_AS(compile(bad, Picture::schroedinger), Error);
}

TEST_CASE("commuting partition of the TFI super-Hamiltonian has 2 groups") {
  LindbladModel model = build_tfi(2, 1.0, 1.0, Boundary::periodic);
  CompiledLiouvillian lv = compile(model, Picture::heisenberg);
  std::vector<PauliString> strings;
  for (const auto& [c, s] : lv.l_h.terms()) strings.push_back(s);
  CommutingPartition part = commuting_partition(strings);
  CHECK(part.n_groups == 2);
  // within each group everything commutes
  for (size_t i = 0; i < strings.size(); ++i)
    for (size_t j = i + 1; j < strings.size(); ++j)
      if (part.group_of[i] == part.group_of[j])
        CHECK(strings[i].commutes_with(strings[j]));
}

TEST_CASE("commuting partition edge cases") {
  std::vector<PauliString> same(5, PauliString::from_labels("XY"));
  CHECK(commuting_partition(same).n_groups == 1);

  std::vector<PauliString> anti = {PauliString::from_labels("X"),
                                   PauliString::from_labels("Y"),
                                   PauliString::from_labels("Z")};
  CHECK(commuting_partition(anti).n_groups == 3);

  CHECK(commuting_partition({}).n_groups == 0);
}

TEST_SUITE_END();
