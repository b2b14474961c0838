#include "vql/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <sstream>

namespace vql {

namespace {

constexpr int kMaxQubits = 32;
constexpr int kMaxDenseQubits = 12;

// code -> (x bit, z bit): I=(0,0), X=(1,0), Y=(1,1), Z=(0,1)
constexpr uint8_t code_x(uint8_t c) { return c == 1 || c == 2; }
constexpr uint8_t code_z(uint8_t c) { return c == 2 || c == 3; }
constexpr uint8_t code_of(uint8_t x, uint8_t z) {
  return x ? (z ? 2 : 1) : (z ? 3 : 0);
}

// Phase of sigma_a * sigma_b on a single qubit, as an exponent of i.
// Nonzero only when a, b are distinct non-identity labels.
constexpr int kPhaseExp[4][4] = {
    // b:  I   X   Y   Z            a:
    {0, 0, 0, 0},   // I
    {0, 0, 1, 3},   // X   (XY=iZ, XZ=-iY)
    {0, 3, 0, 1},   // Y   (YX=-iZ, YZ=iX)
    {0, 1, 3, 0},   // Z   (ZX=iY, ZY=-iX)
};

constexpr Complex kIPow[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                              Complex(0, -1)};

double sign_of_parity(uint64_t bits) {
  return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

}  // namespace

PauliString::PauliString(int n) : n_(n) {
  if (n < 0 || n > kMaxQubits)
    throw dimension_error("PauliString supports 0..32 qubits, got " +
                          std::to_string(n));
}

PauliString PauliString::from_labels(std::string_view labels) {
  PauliString s(static_cast<int>(labels.size()));
  for (int q = 0; q < s.n_; ++q) {
    switch (labels[q]) {
      case 'I': case 'i': case '0': break;
      case 'X': case 'x': s.set(q, Pauli::X); break;
      case 'Y': case 'y': s.set(q, Pauli::Y); break;
      case 'Z': case 'z': s.set(q, Pauli::Z); break;
      default:
        throw dimension_error(std::string("bad Pauli label '") + labels[q] +
                              "'");
    }
  }
  return s;
}

PauliString PauliString::single(int n, int qubit, Pauli p) {
  PauliString s(n);
  s.set(qubit, p);
  return s;
}

Pauli PauliString::label(int qubit) const {
  uint8_t x = (xs_ >> qubit) & 1;
  uint8_t z = (zs_ >> qubit) & 1;
  return static_cast<Pauli>(code_of(x, z));
}

void PauliString::set(int qubit, Pauli p) {
  if (qubit < 0 || qubit >= n_)
    throw dimension_error("qubit index out of range");
  uint64_t bit = uint64_t{1} << qubit;
  uint8_t c = static_cast<uint8_t>(p);
  xs_ = (xs_ & ~bit) | (code_x(c) ? bit : 0);
  zs_ = (zs_ & ~bit) | (code_z(c) ? bit : 0);
}

int PauliString::y_count() const { return std::popcount(xs_ & zs_); }

int PauliString::support_size() const { return std::popcount(xs_ | zs_); }

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  uint64_t m = xs_ | zs_;
  for (int q = 0; q < n_; ++q)
    if ((m >> q) & 1) out.push_back(q);
  return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
  int anti = std::popcount(xs_ & other.zs_) + std::popcount(zs_ & other.xs_);
  return (anti & 1) == 0;
}

uint64_t PauliString::lex_key() const {
  uint64_t key = 0;
  for (int q = 0; q < n_; ++q)
    key = (key << 2) | static_cast<uint64_t>(label(q));
  return key;
}

std::string PauliString::str() const {
  static constexpr char kLabels[] = "IXYZ";
  std::string out(n_, 'I');
  for (int q = 0; q < n_; ++q)
    out[q] = kLabels[static_cast<int>(label(q))];
  return out;
}

PauliProduct pauli_mul(const PauliString& p, const PauliString& q) {
  if (p.n() != q.n())
    throw dimension_error("pauli_mul: length mismatch (" +
                          std::to_string(p.n()) + " vs " +
                          std::to_string(q.n()) + ")");
  PauliString r(p.n());
  int exp = 0;
  for (int k = 0; k < p.n(); ++k) {
    uint8_t a = static_cast<uint8_t>(p.label(k));
    uint8_t b = static_cast<uint8_t>(q.label(k));
    exp += kPhaseExp[a][b];
    r.set(k, static_cast<Pauli>(code_of(code_x(a) ^ code_x(b),
                                        code_z(a) ^ code_z(b))));
  }
  return {kIPow[exp & 3], r};
}

void PauliSum::add(Complex coeff, const PauliString& s) {
  if (s.n() != n_)
    throw dimension_error("PauliSum::add: string has wrong qubit count");
  terms_.emplace_back(coeff, s);
}

PauliSum& PauliSum::canonicalize(double drop_tol) {
  std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) {
    return a.second.lex_key() < b.second.lex_key();
  });
  std::vector<std::pair<Complex, PauliString>> merged;
  merged.reserve(terms_.size());
  for (const auto& [c, s] : terms_) {
    if (!merged.empty() && merged.back().second == s)
      merged.back().first += c;
    else
      merged.emplace_back(c, s);
  }
  std::erase_if(merged,
                [&](const auto& t) { return std::abs(t.first) <= drop_tol; });
  terms_ = std::move(merged);
  return *this;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_ != n_ && !other.terms_.empty())
    throw dimension_error("PauliSum +=: qubit count mismatch");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return canonicalize();
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  PauliSum neg = other;
  neg *= Complex(-1, 0);
  return *this += neg;
}

PauliSum& PauliSum::operator*=(Complex scalar) {
  for (auto& [c, s] : terms_) c *= scalar;
  return canonicalize();
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n() != b.n())
    throw dimension_error("PauliSum *: qubit count mismatch");
  PauliSum out(a.n());
  for (const auto& [ca, sa] : a.terms())
    for (const auto& [cb, sb] : b.terms()) {
      auto [phase, r] = pauli_mul(sa, sb);
      out.add(ca * cb * phase, r);
    }
  return out.canonicalize();
}

bool PauliSum::approx_equal(const PauliSum& other, double tol) const {
  PauliSum diff = *this;
  diff -= other;
  for (const auto& [c, s] : diff.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

PauliSum dagger(const PauliSum& op) {
  PauliSum out(op.n());
  for (const auto& [c, s] : op.terms()) out.add(std::conj(c), s);
  return out.canonicalize();
}

Eigen::VectorXcd apply_pauli_string(
    const PauliString& s, const Eigen::Ref<const Eigen::VectorXcd>& v) {
  const int64_t dim = int64_t{1} << s.n();
  if (v.size() != dim)
    throw dimension_error("apply_pauli_string: vector length " +
                          std::to_string(v.size()) + " != 2^" +
                          std::to_string(s.n()));
  Eigen::VectorXcd out(dim);
  const uint64_t xs = s.x_mask();
  const uint64_t zs = s.z_mask();
  const Complex base = kIPow[s.y_count() & 3];
  for (int64_t m = 0; m < dim; ++m)
    out[static_cast<int64_t>(m ^ xs)] =
        base * sign_of_parity(static_cast<uint64_t>(m) & zs) * v[m];
  return out;
}

Eigen::VectorXcd apply_pauli_sum(const PauliSum& op,
                                 const Eigen::Ref<const Eigen::VectorXcd>& v) {
  const int64_t dim = int64_t{1} << op.n();
  if (v.size() != dim)
    throw dimension_error("apply_pauli_sum: vector length mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (const auto& [c, s] : op.terms()) {
    const uint64_t xs = s.x_mask();
    const uint64_t zs = s.z_mask();
    const Complex base = c * kIPow[s.y_count() & 3];
    for (int64_t m = 0; m < dim; ++m)
      out[static_cast<int64_t>(m ^ xs)] +=
          base * sign_of_parity(static_cast<uint64_t>(m) & zs) * v[m];
  }
  return out;
}

Eigen::MatrixXcd to_dense(const PauliString& s) {
  if (s.n() > kMaxDenseQubits)
    throw size_cap_error("to_dense limited to 12 qubits");
  const int64_t dim = int64_t{1} << s.n();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  const uint64_t xs = s.x_mask();
  const uint64_t zs = s.z_mask();
  const Complex base = kIPow[s.y_count() & 3];
  for (int64_t m = 0; m < dim; ++m)
    out(static_cast<int64_t>(m ^ xs), m) =
        base * sign_of_parity(static_cast<uint64_t>(m) & zs);
  return out;
}

Eigen::MatrixXcd to_dense(const PauliSum& op) {
  if (op.n() > kMaxDenseQubits)
    throw size_cap_error("to_dense limited to 12 qubits");
  const int64_t dim = int64_t{1} << op.n();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [c, s] : op.terms()) out += c * to_dense(s);
  return out;
}

std::string to_text(const PauliSum& op) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [c, s] : op.terms())
    os << c.real() << " " << c.imag() << " " << s.str() << "\n";
  return os.str();
}

PauliSum pauli_sum_from_text(std::string_view text, int n) {
  PauliSum out(n);
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    std::string labels;
    if (!(ls >> re >> im >> labels))
      throw config_error("bad PauliSum text line: " + line);
    PauliString s = PauliString::from_labels(labels);
    if (s.n() != n) throw dimension_error("PauliSum text: wrong qubit count");
    out.add(Complex(re, im), s);
  }
  return out.canonicalize();
}

std::ostream& operator<<(std::ostream& os, const PauliSum& op) {
  return os << to_text(op);
}

}  // namespace vql
