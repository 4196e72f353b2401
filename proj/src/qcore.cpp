#include "qimaging/qcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace qimaging {

namespace {

using Index = Eigen::Index;

inline std::size_t bit_at(std::size_t x, std::size_t pos, std::size_t n) {
  return (x >> (n - 1 - pos)) & 1U;
}

inline std::size_t with_bit(std::size_t x, std::size_t pos, std::size_t n, std::size_t b) {
  const std::size_t mask = std::size_t{1} << (n - 1 - pos);
  return b ? (x | mask) : (x & ~mask);
}

void require_square(const ComplexMatrix& m, std::size_t dim, const char* what) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != dim) {
    std::ostringstream os;
    os << what << ": expected " << dim << "x" << dim << " matrix, got " << m.rows() << "x"
       << m.cols();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Register

Register::Register(std::vector<std::string> wires) : wires_(std::move(wires)) {
  if (wires_.empty()) throw std::invalid_argument("Register: needs at least one wire");
  if (wires_.size() > 16) throw std::invalid_argument("Register: too many wires");
  std::unordered_set<std::string> seen;
  for (const auto& w : wires_) {
    if (w.empty()) throw std::invalid_argument("Register: empty wire label");
    if (!seen.insert(w).second) throw std::invalid_argument("Register: duplicate label " + w);
  }
}

Register Register::imaging() { return Register({"s1", "i1", "i2", "s2"}); }

std::size_t Register::index_of(std::string_view label) const {
  for (std::size_t k = 0; k < wires_.size(); ++k)
    if (wires_[k] == label) return k;
  throw std::invalid_argument("unknown wire label '" + std::string(label) + "'");
}

bool Register::contains(std::string_view label) const {
  return std::find(wires_.begin(), wires_.end(), label) != wires_.end();
}

std::vector<std::size_t> Register::indices_of(std::span<const std::string> labels) const {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    const auto k = index_of(l);
    if (std::find(out.begin(), out.end(), k) != out.end())
      throw std::invalid_argument("repeated wire label '" + l + "'");
    out.push_back(k);
  }
  return out;
}

Register Register::subset(std::span<const std::string> labels) const {
  indices_of(labels);
  return Register(std::vector<std::string>(labels.begin(), labels.end()));
}

std::vector<std::string> Register::complement(std::span<const std::string> labels) const {
  indices_of(labels);
  std::vector<std::string> out;
  for (const auto& w : wires_)
    if (std::find(labels.begin(), labels.end(), w) == labels.end()) out.push_back(w);
  return out;
}

// ---------------------------------------------------------------------------
// Density matrices

StateDiagnostics diagnose_state(const ComplexMatrix& m) {
  StateDiagnostics d;
  if (m.rows() != m.cols() || m.rows() == 0) {
    d.hermiticity_error = std::numeric_limits<double>::infinity();
    return d;
  }
  d.hermiticity_error = max_abs_diff(m, m.adjoint());
  d.trace_error = std::abs(m.trace() - cplx{1.0, 0.0});
  if (!m.allFinite()) {
    d.hermiticity_error = std::numeric_limits<double>::infinity();
    return d;
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(Register reg, ComplexMatrix mat)
    : reg_(std::move(reg)), mat_(std::move(mat)) {
  require_square(mat_, reg_.dim(), "DensityMatrix");
  const auto d = diagnose_state(mat_);
  if (!d.valid()) {
    std::ostringstream os;
    os << "DensityMatrix: invalid state (hermiticity error " << d.hermiticity_error
       << ", trace error " << d.trace_error << ", min eigenvalue " << d.min_eigenvalue << ")";
    throw std::domain_error(os.str());
  }
}

DensityMatrix DensityMatrix::from_pure(Register reg, const ComplexVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw std::invalid_argument("from_pure: zero vector");
  const ComplexVector v = psi / norm;
  return DensityMatrix(std::move(reg), outer(v, v));
}

DensityMatrix DensityMatrix::basis_state(Register reg, std::string_view bits) {
  if (bits.size() != reg.size())
    throw std::invalid_argument("basis_state: bit string length does not match register");
  return from_pure(std::move(reg), ket(bits));
}

double DensityMatrix::purity() const { return (mat_ * mat_).trace().real(); }

// ---------------------------------------------------------------------------
// Pauli strings

const ComplexMatrix& pauli_matrix(Pauli p) {
  static const std::array<ComplexMatrix, 4> mats = [] {
    const cplx i{0.0, 1.0};
    std::array<ComplexMatrix, 4> m;
    for (auto& x : m) x = ComplexMatrix::Zero(2, 2);
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -i, i, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  return mats[static_cast<std::size_t>(p)];
}

ComplexMatrix pauli_matrix(std::span<const Pauli> letters) {
  if (letters.empty()) throw std::invalid_argument("pauli_matrix: empty string");
  ComplexMatrix m = pauli_matrix(letters[0]);
  for (std::size_t k = 1; k < letters.size(); ++k) m = kron(m, pauli_matrix(letters[k]));
  return m;
}

PauliString PauliString::parse(std::string_view text, cplx coefficient) {
  PauliString p;
  p.coefficient = coefficient;
  for (char c : text) {
    switch (c) {
      case 'I': p.letters.push_back(Pauli::I); break;
      case 'X': p.letters.push_back(Pauli::X); break;
      case 'Y': p.letters.push_back(Pauli::Y); break;
      case 'Z': p.letters.push_back(Pauli::Z); break;
      default: throw std::invalid_argument("PauliString: bad letter in '" + std::string(text) + "'");
    }
  }
  if (p.letters.empty()) throw std::invalid_argument("PauliString: empty");
  return p;
}

std::string PauliString::label() const {
  std::string s;
  for (auto l : letters) s.push_back("IXYZ"[static_cast<std::size_t>(l)]);
  return s;
}

ComplexMatrix to_matrix(const PauliString& p) { return p.coefficient * pauli_matrix(p.letters); }

ComplexMatrix to_matrix(std::span<const PauliString> terms) {
  if (terms.empty()) throw std::invalid_argument("to_matrix: no terms");
  ComplexMatrix sum = to_matrix(terms[0]);
  for (std::size_t k = 1; k < terms.size(); ++k) {
    if (terms[k].letters.size() != terms[0].letters.size())
      throw std::invalid_argument("to_matrix: mixed string lengths");
    sum += to_matrix(terms[k]);
  }
  return sum;
}

cplx pauli_coefficient(const ComplexMatrix& m, std::span<const Pauli> letters) {
  const std::size_t n = letters.size();
  const std::size_t dim = std::size_t{1} << n;
  require_square(m, dim, "pauli_coefficient");
  std::size_t flip = 0;
  for (std::size_t w = 0; w < n; ++w)
    if (letters[w] == Pauli::X || letters[w] == Pauli::Y) flip = with_bit(flip, w, n, 1);

  // P|c> = phase(c) |c ^ flip>, so Tr[P^dagger m] = sum_c conj(phase(c)) m(c ^ flip, c).
  cplx acc{0.0, 0.0};
  for (std::size_t c = 0; c < dim; ++c) {
    cplx phase{1.0, 0.0};
    for (std::size_t w = 0; w < n; ++w) {
      const auto b = bit_at(c, w, n);
      switch (letters[w]) {
        case Pauli::Y: phase *= b ? cplx{0.0, -1.0} : cplx{0.0, 1.0}; break;
        case Pauli::Z: if (b) phase = -phase; break;
        default: break;
      }
    }
    acc += std::conj(phase) * m(static_cast<Index>(c ^ flip), static_cast<Index>(c));
  }
  return acc / static_cast<double>(dim);
}

std::vector<PauliString> pauli_decompose(const ComplexMatrix& m, const Register& reg,
                                         double drop_below) {
  if (m.rows() != m.cols()) throw std::invalid_argument("pauli_decompose: non-square input");
  require_square(m, reg.dim(), "pauli_decompose");
  const std::size_t n = reg.size();
  const std::size_t count = std::size_t{1} << (2 * n);
  std::vector<PauliString> out;
  std::vector<Pauli> letters(n);
  for (std::size_t code = 0; code < count; ++code) {
    for (std::size_t w = 0; w < n; ++w)
      letters[w] = static_cast<Pauli>((code >> (2 * (n - 1 - w))) & 3U);
    const cplx c = pauli_coefficient(m, letters);
    if (std::abs(c) > drop_below) out.push_back(PauliString{letters, c});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tensor products and register operations

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Index>(dim), static_cast<Index>(dim));
}

ComplexMatrix outer(const ComplexVector& v, const ComplexVector& w) { return v * w.adjoint(); }

ComplexVector ket(std::string_view bits) {
  if (bits.empty()) throw std::invalid_argument("ket: empty bit string");
  std::size_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("ket: bad bit string");
    idx = (idx << 1) | static_cast<std::size_t>(c == '1');
  }
  ComplexVector v = ComplexVector::Zero(Index{1} << bits.size());
  v(static_cast<Index>(idx)) = 1.0;
  return v;
}

ComplexMatrix embed(const ComplexMatrix& op, std::span<const std::string> targets,
                    const Register& reg) {
  if (targets.empty()) throw std::invalid_argument("embed: no targets");
  const auto pos = reg.indices_of(targets);
  const std::size_t n = reg.size();
  const std::size_t m = pos.size();
  require_square(op, std::size_t{1} << m, "embed");

  std::size_t target_mask = 0;
  for (auto p : pos) target_mask = with_bit(target_mask, p, n, 1);
  auto sub = [&](std::size_t x) {
    std::size_t s = 0;
    for (std::size_t k = 0; k < m; ++k) s = (s << 1) | bit_at(x, pos[k], n);
    return static_cast<Index>(s);
  };

  const std::size_t dim = reg.dim();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r & ~target_mask) == (c & ~target_mask))
        out(static_cast<Index>(r), static_cast<Index>(c)) = op(sub(r), sub(c));
  return out;
}

ComplexMatrix permute_wires(const ComplexMatrix& m, const Register& reg,
                            std::span<const std::string> order) {
  if (order.size() != reg.size())
    throw std::invalid_argument("permute_wires: order must list every wire");
  const auto src = reg.indices_of(order);
  const std::size_t n = reg.size();
  const std::size_t dim = reg.dim();
  require_square(m, dim, "permute_wires");

  std::vector<Index> old_index(dim);
  for (std::size_t y = 0; y < dim; ++y) {
    std::size_t x = 0;
    for (std::size_t j = 0; j < n; ++j) x = with_bit(x, src[j], n, bit_at(y, j, n));
    old_index[y] = static_cast<Index>(x);
  }
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) = m(old_index[r], old_index[c]);
  return out;
}

DensityMatrix permute_wires(const DensityMatrix& rho, std::span<const std::string> order) {
  return DensityMatrix(rho.reg().subset(order), permute_wires(rho.matrix(), rho.reg(), order));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const Register& reg,
                            std::span<const std::string> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  const auto kept = reg.indices_of(keep);
  const auto traced = reg.indices_of(reg.complement(keep));
  const std::size_t n = reg.size();
  require_square(m, reg.dim(), "partial_trace");

  const std::size_t dk = std::size_t{1} << kept.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  auto full = [&](std::size_t a, std::size_t t) {
    std::size_t x = 0;
    for (std::size_t j = 0; j < kept.size(); ++j)
      x = with_bit(x, kept[j], n, (a >> (kept.size() - 1 - j)) & 1U);
    for (std::size_t j = 0; j < traced.size(); ++j)
      x = with_bit(x, traced[j], n, (t >> (traced.size() - 1 - j)) & 1U);
    return static_cast<Index>(x);
  };

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Index>(dk), static_cast<Index>(dk));
  for (std::size_t a = 0; a < dk; ++a)
    for (std::size_t b = 0; b < dk; ++b) {
      cplx acc{0.0, 0.0};
      for (std::size_t t = 0; t < dt; ++t) acc += m(full(a, t), full(b, t));
      out(static_cast<Index>(a), static_cast<Index>(b)) = acc;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  return DensityMatrix(rho.reg().subset(keep), partial_trace(rho.matrix(), rho.reg(), keep));
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const Register& reg,
                                std::span<const std::string> subsystem) {
  if (subsystem.empty() || subsystem.size() >= reg.size())
    throw std::invalid_argument("partial_transpose: subsystem must be a proper nonempty subset");
  const auto pos = reg.indices_of(subsystem);
  const std::size_t n = reg.size();
  const std::size_t dim = reg.dim();
  require_square(m, dim, "partial_transpose");

  std::size_t mask = 0;
  for (auto p : pos) mask = with_bit(mask, p, n, 1);
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t r2 = (r & ~mask) | (c & mask);
      const std::size_t c2 = (c & ~mask) | (r & mask);
      out(static_cast<Index>(r2), static_cast<Index>(c2)) = m(static_cast<Index>(r), static_cast<Index>(c));
    }
  return out;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, std::span<const std::string> subsystem) {
  return partial_transpose(rho.matrix(), rho.reg(), subsystem);
}

// ---------------------------------------------------------------------------
// Spectra and comparisons

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("hermitian_eigenvalues: non-square input");
  if (!is_hermitian(m, 1e-10)) throw std::invalid_argument("hermitian_eigenvalues: input is not Hermitian");
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m).front(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs_diff(m, m.adjoint()) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() &&
         max_abs_diff(m.adjoint() * m, ComplexMatrix::Identity(m.rows(), m.cols())) <= tol;
}

}  // namespace qimaging
