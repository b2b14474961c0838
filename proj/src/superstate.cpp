#include "vql/superstate.hpp"

#include <bit>
#include <cmath>
#include <ostream>

namespace vql {

namespace {

constexpr Complex kIPow[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                              Complex(0, -1)};

int spins_of_dim(int64_t dim) {
  int n = 0;
  while ((int64_t{1} << (2 * n)) < dim) ++n;
  if ((int64_t{1} << (2 * n)) != dim)
    throw dimension_error("superstate dimension is not a power of four");
  return n;
}

int check_square_pow2(const Eigen::MatrixXcd& op) {
  if (op.rows() != op.cols())
    throw dimension_error("vectorize: matrix is not square");
  int n = 0;
  while ((int64_t{1} << n) < op.rows()) ++n;
  if ((int64_t{1} << n) != op.rows())
    throw dimension_error("vectorize: dimension is not a power of two");
  return n;
}

}  // namespace

int64_t superstate_index(const PauliString& alpha) {
  int64_t m = 0;
  for (int j = 0; j < alpha.n(); ++j) {
    auto c = static_cast<int64_t>(alpha.label(j));
    m |= ((c >> 1) & 1) << (2 * j);
    m |= (c & 1) << (2 * j + 1);
  }
  return m;
}

PauliString alpha_of_index(int64_t index, int n_spins) {
  PauliString alpha(n_spins);
  for (int j = 0; j < n_spins; ++j) {
    int64_t b0 = (index >> (2 * j)) & 1;
    int64_t b1 = (index >> (2 * j + 1)) & 1;
    alpha.set(j, static_cast<Pauli>((b0 << 1) | b1));
  }
  return alpha;
}

SuperState vectorize(const Eigen::MatrixXcd& op) {
  const int n = check_square_pow2(op);
  const int64_t hdim = op.rows();
  SuperState s;
  s.n_spins = n;
  s.amps.resize(int64_t{1} << (2 * n));
  const double norm = std::pow(2.0, -0.5 * n);
  // Tr(sigma_alpha M) via the permutation structure of sigma_alpha:
  // column l has its only entry ph(l) at row l ^ xs.
  for (int64_t idx = 0; idx < s.amps.size(); ++idx) {
    PauliString alpha = alpha_of_index(idx, n);
    const uint64_t xs = alpha.x_mask();
    const uint64_t zs = alpha.z_mask();
    const Complex base = kIPow[alpha.y_count() & 3];
    Complex tr = 0;
    for (int64_t l = 0; l < hdim; ++l) {
      double sign = (std::popcount(static_cast<uint64_t>(l) & zs) & 1) ? -1.0
                                                                       : 1.0;
      tr += base * sign * op(l, static_cast<int64_t>(l ^ xs));
    }
    // coefficient of the Hermitian P_alpha: Tr(P_alpha M) = Tr(sigma M)/2^{N/2}
    s.amps[idx] = tr * norm;
  }
  return s;
}

Eigen::MatrixXcd devectorize(const SuperState& s) {
  const int n = spins_of_dim(s.amps.size());
  const int64_t hdim = int64_t{1} << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(hdim, hdim);
  const double norm = std::pow(2.0, -0.5 * n);
  for (int64_t idx = 0; idx < s.amps.size(); ++idx) {
    const Complex c = s.a * s.amps[idx] * norm;
    if (c == Complex(0, 0)) continue;
    PauliString alpha = alpha_of_index(idx, n);
    const uint64_t xs = alpha.x_mask();
    const uint64_t zs = alpha.z_mask();
    const Complex base = kIPow[alpha.y_count() & 3];
    for (int64_t l = 0; l < hdim; ++l) {
      double sign = (std::popcount(static_cast<uint64_t>(l) & zs) & 1) ? -1.0
                                                                       : 1.0;
      out(static_cast<int64_t>(l ^ xs), l) += c * base * sign;
    }
  }
  return out;
}

Complex overlap(const SuperState& x, const SuperState& y) {
  if (x.n_spins != y.n_spins || x.amps.size() != y.amps.size())
    throw dimension_error("overlap: superstate dimension mismatch");
  return std::conj(x.a) * y.a * x.amps.dot(y.amps);
}

Complex trace_of(const SuperState& s) {
  return s.a * std::pow(2.0, 0.5 * s.n_spins) * s.amps[0];
}

double purity(const SuperState& s) {
  return std::norm(s.a) * s.amps.squaredNorm();
}

void dump_amplitudes(const SuperState& s, std::ostream& os) {
  os.precision(17);
  for (int64_t i = 0; i < s.amps.size(); ++i)
    os << i << " " << s.amps[i].real() << " " << s.amps[i].imag() << "\n";
}

}  // namespace vql
