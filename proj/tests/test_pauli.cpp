#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "vql/pauli.hpp"

using namespace vql;

TEST_SUITE_BEGIN("pauli");

TEST_CASE("single-qubit products") {
  auto x = PauliString::from_labels("X");
  auto y = PauliString::from_labels("Y");
  auto [phase_xy, r_xy] = pauli_mul(x, y);
  CHECK(phase_xy == Complex(0, 1));
  CHECK(r_xy == PauliString::from_labels("Z"));

  auto [phase_xx, r_xx] = pauli_mul(x, x);
  CHECK(phase_xx == Complex(1, 0));
  CHECK(r_xx.is_identity());
}

TEST_CASE("two-qubit product against dense oracle") {
  auto p = PauliString::from_labels("XZ");
  auto q = PauliString::from_labels("YX");
  auto [phase, r] = pauli_mul(p, q);
  Eigen::MatrixXcd lhs = oracles::dense_pauli(p) * oracles::dense_pauli(q);
  Eigen::MatrixXcd rhs = phase * oracles::dense_pauli(r);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("product phase is exact for random pairs up to n=4") {
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      auto p = oracles::random_string(n);
      auto q = oracles::random_string(n);
      auto [phase, r] = pauli_mul(p, q);
      Eigen::MatrixXcd lhs = oracles::dense_pauli(p) * oracles::dense_pauli(q);
      Eigen::MatrixXcd rhs = phase * oracles::dense_pauli(r);
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("pauli_mul rejects length mismatch") {
  CHECK_THROWS_AS(pauli_mul(PauliString::from_labels("X"),
                            PauliString::from_labels("XY")),
                  Error);
}

TEST_CASE("apply_pauli_sum basics") {
  PauliSum identity(1);
  identity.add(1.0, PauliString(1));
  Eigen::VectorXcd v(2);
  v << Complex(0.3, 0.1), Complex(-0.7, 0.2);
  CHECK((apply_pauli_sum(identity, v) - v).norm() == doctest::Approx(0));

  PauliSum z(1);
  z.add(1.0, PauliString::from_labels("Z"));
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2), e1 = Eigen::VectorXcd::Zero(2);
  e0[0] = 1;
  e1[1] = 1;
  CHECK((apply_pauli_sum(z, e0) - e0).norm() == doctest::Approx(0));
  CHECK((apply_pauli_sum(z, e1) + e1).norm() == doctest::Approx(0));
}

TEST_CASE("apply_pauli_sum equals dense mat-vec on random 3-qubit sums") {
  for (int trial = 0; trial < 20; ++trial) {
    PauliSum op = oracles::random_sum(3, 6);
    Eigen::MatrixXcd dense = oracles::dense_sum(op);
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(8);
    CHECK((apply_pauli_sum(op, v) - dense * v).norm() < 1e-13);
  }
}

TEST_CASE("apply_pauli_sum rejects wrong dimension") {
  PauliSum z(2);
  z.add(1.0, PauliString::from_labels("ZI"));
  Eigen::VectorXcd v(3);
  v.setZero();
  CHECK_THROWS_AS(apply_pauli_sum(z, v), Error);
}

TEST_CASE("dagger conjugates coefficients and is an involution") {
  PauliSum op(2);
  op.add(Complex(0, 1), PauliString::from_labels("XZ"));
  PauliSum opd = dagger(op);
  REQUIRE(opd.size() == 1);
  CHECK(opd.terms()[0].first == Complex(0, -1));
  CHECK(opd.terms()[0].second == PauliString::from_labels("XZ"));

  PauliSum real_sum(2);
  real_sum.add(0.5, PauliString::from_labels("XY"));
  real_sum.add(-1.5, PauliString::from_labels("ZI"));
  CHECK(dagger(real_sum).approx_equal(real_sum, 0));

  PauliSum rand = oracles::random_sum(3, 5);
  CHECK(dagger(dagger(rand)).approx_equal(rand, 0));
}

TEST_CASE("canonicalization merges, prunes and is order-independent") {
  PauliSum a(2);
  a.add(0.25, PauliString::from_labels("XY"));
  a.add(1.0, PauliString::from_labels("ZZ"));
  a.add(0.75, PauliString::from_labels("XY"));
  a.add(-1.0, PauliString::from_labels("ZZ"));  // exact cancellation
  a.canonicalize();
  REQUIRE(a.size() == 1);
  CHECK(a.terms()[0].first == Complex(1.0, 0));

  // shuffled insertion orders agree term by term
  std::vector<std::pair<Complex, PauliString>> terms;
  for (int k = 0; k < 12; ++k)
    terms.emplace_back(oracles::uniform(-1, 1), oracles::random_string(3));
  PauliSum fwd(3), shuffled(3);
  for (const auto& [c, s] : terms) fwd.add(c, s);
  std::mt19937_64 gen(7);
  std::shuffle(terms.begin(), terms.end(), gen);
  for (const auto& [c, s] : terms) shuffled.add(c, s);
  fwd.canonicalize();
  shuffled.canonicalize();
  CHECK(fwd.approx_equal(shuffled, 1e-15));
  REQUIRE(fwd.size() == shuffled.size());
  for (size_t i = 0; i < fwd.size(); ++i)
    CHECK(fwd.terms()[i].second == shuffled.terms()[i].second);

  PauliSum again = fwd;
  again.canonicalize();
  REQUIRE(again.size() == fwd.size());
  for (size_t i = 0; i < fwd.size(); ++i)
    CHECK(again.terms()[i].first == fwd.terms()[i].first);
}

TEST_CASE("sum product equals dense product") {
  PauliSum a = oracles::random_sum(2, 4);
  PauliSum b = oracles::random_sum(2, 4);
  Eigen::MatrixXcd lhs = oracles::dense_sum(a * b);
  Eigen::MatrixXcd rhs = oracles::dense_sum(a) * oracles::dense_sum(b);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("text round trip") {
  PauliSum op(4);
  op.add(Complex(0.0, 1.0), PauliString::from_labels("IXYZ"));
  op.add(Complex(-0.5, 0.0), PauliString::from_labels("ZZII"));
  std::string text = to_text(op);
  CHECK(text.find("0 1 IXYZ") != std::string::npos);
  PauliSum back = pauli_sum_from_text(text, 4);
  CHECK(back.approx_equal(op, 0));
}

TEST_SUITE_END();
