#pragma once

// Dense complex linear algebra on small labelled qubit registers.
//
// Tensor order convention: the leftmost wire of a Register is the most
// significant tensor factor, so basis index bit (n-1-k) belongs to wire k.
// Encoding is |0> = (1,0)^T, |1> = (0,1)^T.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qimaging {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Absolute tolerance for algebraic identities.
inline constexpr double kAlgebraTol = 1e-12;
/// Slack allowed below zero for eigenvalues of positive operators.
inline constexpr double kPsdSlack = 1e-10;

/// Ordered, uniquely labelled set of qubit wires.
class Register {
 public:
  explicit Register(std::vector<std::string> wires);

  /// The four-wire register of the imaging circuit: s1, i1, i2, s2.
  static Register imaging();

  std::size_t size() const { return wires_.size(); }
  std::size_t dim() const { return std::size_t{1} << wires_.size(); }
  const std::vector<std::string>& wires() const { return wires_; }
  const std::string& operator[](std::size_t k) const { return wires_[k]; }

  /// Position of a label; throws std::invalid_argument for unknown labels.
  std::size_t index_of(std::string_view label) const;
  bool contains(std::string_view label) const;

  /// Positions of several labels, in the order given. Rejects repeats.
  std::vector<std::size_t> indices_of(std::span<const std::string> labels) const;

  /// Sub-register made of the given labels, in the order given.
  Register subset(std::span<const std::string> labels) const;

  /// Labels of this register not listed in `labels`, in register order.
  std::vector<std::string> complement(std::span<const std::string> labels) const;

  friend bool operator==(const Register&, const Register&) = default;

 private:
  std::vector<std::string> wires_;
};

using Wires = std::vector<std::string>;

/// Result of checking the density-matrix invariants of a matrix.
struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |m - m^dagger|
  double trace_error = 0.0;        // |Tr m - 1|
  double min_eigenvalue = 0.0;
  bool valid() const {
    return hermiticity_error <= kAlgebraTol && trace_error <= kAlgebraTol &&
           min_eigenvalue >= -kPsdSlack;
  }
};

StateDiagnostics diagnose_state(const ComplexMatrix& m);

/// Positive, unit-trace operator on a register. Construction validates the
/// invariants and throws std::domain_error when they fail.
class DensityMatrix {
 public:
  DensityMatrix(Register reg, ComplexMatrix mat);

  static DensityMatrix from_pure(Register reg, const ComplexVector& psi);
  /// Computational basis state, e.g. basis_state(reg, "0101").
  static DensityMatrix basis_state(Register reg, std::string_view bits);

  const Register& reg() const { return reg_; }
  const ComplexMatrix& matrix() const { return mat_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  cplx operator()(Eigen::Index r, Eigen::Index c) const { return mat_(r, c); }

  double purity() const;

 private:
  Register reg_;
  ComplexMatrix mat_;
};

/// Letter of a Pauli string.
enum class Pauli : unsigned char { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-wire Pauli operators with a coefficient.
struct PauliString {
  std::vector<Pauli> letters;
  cplx coefficient{1.0, 0.0};

  /// Parses strings like "XY" or "IZZI".
  static PauliString parse(std::string_view text, cplx coefficient = 1.0);
  std::string label() const;
};

const ComplexMatrix& pauli_matrix(Pauli p);
ComplexMatrix pauli_matrix(std::span<const Pauli> letters);
/// Builds the operator coefficient * P.
ComplexMatrix to_matrix(const PauliString& p);
/// Sum of the terms' matrices; all terms must have equal length.
ComplexMatrix to_matrix(std::span<const PauliString> terms);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix identity(std::size_t dim);
/// |v><w|
ComplexMatrix outer(const ComplexVector& v, const ComplexVector& w);
/// Basis ket from a bit string, e.g. ket("01").
ComplexVector ket(std::string_view bits);

/// Places `op` on `targets` of `reg` and the identity elsewhere. The first
/// target is the most significant factor of `op`; targets may be in any order
/// and need not be adjacent.
ComplexMatrix embed(const ComplexMatrix& op, std::span<const std::string> targets,
                    const Register& reg);

/// Reorders the tensor factors of an operator on `reg` into `order`.
ComplexMatrix permute_wires(const ComplexMatrix& m, const Register& reg,
                            std::span<const std::string> order);
DensityMatrix permute_wires(const DensityMatrix& rho, std::span<const std::string> order);

/// Traces out every wire not in `keep`; result wires follow `keep` order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const Register& reg,
                            std::span<const std::string> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);

/// Transposes the tensor factors listed in `subsystem`.
ComplexMatrix partial_transpose(const ComplexMatrix& m, const Register& reg,
                                std::span<const std::string> subsystem);
ComplexMatrix partial_transpose(const DensityMatrix& rho,
                                std::span<const std::string> subsystem);

/// Tr[P^dagger m] / 2^n for a single Pauli string P.
cplx pauli_coefficient(const ComplexMatrix& m, std::span<const Pauli> letters);

/// Expansion m = sum_P c_P P with c_P = Tr[P^dagger m] / 2^n. Terms with
/// |c_P| <= drop_below are omitted. Strings are in lexicographic I<X<Y<Z order.
std::vector<PauliString> pauli_decompose(const ComplexMatrix& m, const Register& reg,
                                         double drop_below = 1e-14);

/// Real spectrum of a Hermitian matrix, ascending. Throws for non-Hermitian
/// input (tolerance 1e-10).
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& m, double tol = kAlgebraTol);
bool is_unitary(const ComplexMatrix& m, double tol = kAlgebraTol);

}  // namespace qimaging
