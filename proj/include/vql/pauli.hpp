#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vql/errors.hpp"

namespace vql {

using Complex = std::complex<double>;

/// Single-qubit Pauli labels. The integer values double as the basis codes
/// used by the superstate index map (I=0, X=1, Y=2, Z=3).
enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Paulis on n qubits, stored as x/z bit
/// masks (two bits per qubit across two machine words). Supports n <= 32.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n);

  /// Parse from a label string such as "IXYZ"; qubit 0 is the leftmost
  /// character.
  static PauliString from_labels(std::string_view labels);
  /// Identity string with a single non-trivial Pauli at `qubit`.
  static PauliString single(int n, int qubit, Pauli p);

  int n() const { return n_; }
  Pauli label(int qubit) const;
  void set(int qubit, Pauli p);
  bool is_identity() const { return xs_ == 0 && zs_ == 0; }

  uint64_t x_mask() const { return xs_; }
  uint64_t z_mask() const { return zs_; }
  /// Number of qubits carrying Y (needed for the i^{#Y} phase in dense
  /// actions).
  int y_count() const;
  int support_size() const;
  std::vector<int> support() const;

  /// True iff the strings commute as operators (symplectic product even).
  bool commutes_with(const PauliString& other) const;

  /// Sort key giving lexicographic order on labels with qubit 0 most
  /// significant; used for canonical term ordering.
  uint64_t lex_key() const;

  std::string str() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.xs_ == b.xs_ && a.zs_ == b.zs_;
  }
  friend bool operator!=(const PauliString& a, const PauliString& b) {
    return !(a == b);
  }

 private:
  uint64_t xs_ = 0;
  uint64_t zs_ = 0;
  int n_ = 0;
};

struct PauliProduct {
  Complex phase;  // in {1, i, -1, -i}
  PauliString string;
};

/// sigma_p * sigma_q = phase * sigma_r as dense matrices.
PauliProduct pauli_mul(const PauliString& p, const PauliString& q);

/// Linear combination of Pauli strings with complex coefficients.
/// Canonical form merges equal strings, sorts lexicographically and prunes
/// coefficients below the drop tolerance.
class PauliSum {
 public:
  static constexpr double kDropTol = 1e-14;

  PauliSum() = default;
  explicit PauliSum(int n) : n_(n) {}
  PauliSum(int n, std::vector<std::pair<Complex, PauliString>> terms)
      : terms_(std::move(terms)), n_(n) {
    canonicalize();
  }

  int n() const { return n_; }
  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  const std::vector<std::pair<Complex, PauliString>>& terms() const {
    return terms_;
  }

  void add(Complex coeff, const PauliString& s);
  PauliSum& canonicalize(double drop_tol = kDropTol);

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(Complex scalar);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(Complex s, PauliSum a) { return a *= s; }
  friend PauliSum operator*(PauliSum a, Complex s) { return a *= s; }
  /// Operator product, expanded term by term through pauli_mul.
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  /// Equality of canonical forms with per-coefficient tolerance.
  bool approx_equal(const PauliSum& other, double tol = 1e-12) const;

 private:
  std::vector<std::pair<Complex, PauliString>> terms_;
  int n_ = 0;
};

/// Hermitian adjoint: coefficients conjugated, strings unchanged.
PauliSum dagger(const PauliSum& op);

/// Apply a single string to an amplitude vector by bit-indexed permutation
/// with phase; no dense matrix is formed.
Eigen::VectorXcd apply_pauli_string(const PauliString& s,
                                    const Eigen::Ref<const Eigen::VectorXcd>& v);

/// Apply a Pauli sum to an amplitude vector, term by term.
Eigen::VectorXcd apply_pauli_sum(const PauliSum& op,
                                 const Eigen::Ref<const Eigen::VectorXcd>& v);

/// Dense 2^n x 2^n matrix of a string/sum (little-endian qubit order).
/// Guarded to n <= 12.
Eigen::MatrixXcd to_dense(const PauliString& s);
Eigen::MatrixXcd to_dense(const PauliSum& op);

/// Textual rendering, one term per line: "coeff_re coeff_im labels".
std::string to_text(const PauliSum& op);
PauliSum pauli_sum_from_text(std::string_view text, int n);
std::ostream& operator<<(std::ostream& os, const PauliSum& op);

}  // namespace vql
