#include "qimaging/channels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qimaging {

double normalize_angle(double radians) {
  if (!std::isfinite(radians)) throw std::invalid_argument("angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(radians, two_pi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

ObjectParams::ObjectParams(double transmission, double phase) : t_(transmission) {
  if (!(transmission >= 0.0 && transmission <= 1.0))
    throw std::invalid_argument("object transmission T must lie in [0, 1]");
  gamma_ = normalize_angle(phase);
}

// ---------------------------------------------------------------------------

KrausChannel::KrausChannel(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("KrausChannel: no Kraus operators");
  const auto d = ops_.front().rows();
  for (const auto& k : ops_) {
    if (k.rows() != d || k.cols() != d || d == 0)
      throw std::invalid_argument("KrausChannel: operators must be square and of equal size");
    if (!k.allFinite()) throw std::invalid_argument("KrausChannel: non-finite entry");
  }
  const double err = trace_preservation_error();
  if (err > kPsdSlack) {
    std::ostringstream os;
    os << "KrausChannel: not trace preserving (error " << err << ")";
    throw std::domain_error(os.str());
  }
}

ComplexMatrix KrausChannel::apply(const ComplexMatrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != dim() || x.rows() != x.cols())
    throw std::invalid_argument("KrausChannel::apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& k : ops_) out.noalias() += k * x * k.adjoint();
  return out;
}

double KrausChannel::trace_preservation_error() const {
  ComplexMatrix s = ComplexMatrix::Zero(ops_.front().rows(), ops_.front().cols());
  for (const auto& k : ops_) s.noalias() += k.adjoint() * k;
  return max_abs_diff(s, ComplexMatrix::Identity(s.rows(), s.cols()));
}

KrausChannel identity_channel(std::size_t dim) { return KrausChannel({identity(dim)}); }

KrausChannel object_channel(const ObjectParams& p) {
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = p.transmission();
  k1(0, 1) = std::sqrt(std::max(0.0, 1.0 - p.t() * p.t()));
  return KrausChannel({k0, k1});
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  if (outer.dim() != inner.dim()) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<ComplexMatrix> ops;
  ops.reserve(outer.ops().size() * inner.ops().size());
  for (const auto& a : outer.ops())
    for (const auto& b : inner.ops()) ops.push_back(a * b);
  return KrausChannel(std::move(ops));
}

KrausChannel embed_channel(const KrausChannel& ch, const Wires& targets, const Register& reg) {
  if (ch.dim() != (std::size_t{1} << targets.size()))
    throw std::invalid_argument("embed_channel: channel dimension does not match targets");
  std::vector<ComplexMatrix> ops;
  for (const auto& k : ch.ops()) ops.push_back(embed(k, targets, reg));
  return KrausChannel(std::move(ops));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, const Wires& targets) {
  if (ch.dim() != (std::size_t{1} << targets.size()))
    throw std::invalid_argument("apply_channel: channel dimension does not match targets");
  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& k : ch.ops()) {
    const ComplexMatrix big = embed(k, targets, rho.reg());
    out.noalias() += big * rho.matrix() * big.adjoint();
  }
  return DensityMatrix(rho.reg(), std::move(out));
}

// ---------------------------------------------------------------------------

ChiMatrix chi_matrix(const KrausChannel& ch) {
  if (ch.dim() != 2) throw std::invalid_argument("chi_matrix: only single-qubit channels are supported");
  // K_l = sum_a a_la sigma_a / sqrt(2)  =>  a_la = Tr[sigma_a K_l] / sqrt(2).
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ChiMatrix chi{Eigen::Matrix4cd::Zero()};
  for (const auto& k : ch.ops()) {
    Eigen::Vector4cd a;
    for (int alpha = 0; alpha < 4; ++alpha)
      a(alpha) = (pauli_matrix(static_cast<Pauli>(alpha)) * k).trace() * inv_sqrt2;
    chi.entries.noalias() += a * a.adjoint();
  }
  return chi;
}

ComplexMatrix chi_apply(const ChiMatrix& chi, const ComplexMatrix& x) {
  if (x.rows() != 2 || x.cols() != 2) throw std::invalid_argument("chi_apply: expects a 2x2 operator");
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const cplx c = chi.entries(a, b);
      if (c == cplx{}) continue;
      out.noalias() += c * pauli_matrix(static_cast<Pauli>(a)) * x * pauli_matrix(static_cast<Pauli>(b));
    }
  return 0.5 * out;
}

ComplexMatrix choi_matrix(const LinearMap& map, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      ComplexMatrix eij = ComplexMatrix::Zero(d, d);
      eij(i, j) = 1.0;
      choi += kron(map(eij), eij);
    }
  return choi;
}

ComplexMatrix choi_matrix(const KrausChannel& ch) {
  return choi_matrix([&ch](const ComplexMatrix& x) { return ch.apply(x); }, ch.dim());
}

namespace {
ChoiCheck check(const ComplexMatrix& choi) {
  ChoiCheck c;
  c.min_eigenvalue = min_eigenvalue(choi);
  c.positive = c.min_eigenvalue >= -kPsdSlack;
  return c;
}
}  // namespace

ChoiCheck choi_psd_check(const KrausChannel& ch) { return check(choi_matrix(ch)); }

ChoiCheck choi_psd_check(const LinearMap& map, std::size_t dim) { return check(choi_matrix(map, dim)); }

// ---------------------------------------------------------------------------

ComplexVector default_mixer_state() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector minus(2), plus(2);
  minus << s, -s;
  plus << s, s;
  return kron(minus, plus);
}

ModeMixer mode_mixer(const ComplexVector& xi, MixerConvention convention) {
  if (xi.size() != 4) throw std::invalid_argument("mode_mixer: Xi must be a two-qubit state");
  if (std::abs(xi.norm() - 1.0) > kAlgebraTol) throw std::invalid_argument("mode_mixer: Xi must be a unit vector");

  const ComplexVector k00 = ket("00"), k01 = ket("01"), k10 = ket("10"), k11 = ket("11");
  ComplexMatrix op = xi * (k01 + k10).adjoint();
  if (convention == MixerConvention::literal_identity) {
    op += outer(k00, k00) + outer(k11, k11);
  } else {
    op += outer(k00 + k11, k00 + k11);
  }
  return {xi, op, convention};
}

ComplexMatrix apply_mode_mixer_unnormalized(const ComplexMatrix& m, const Register& reg,
                                            const ModeMixer& mm, const Wires& targets) {
  if (targets.size() != 2) throw std::invalid_argument("mode mixer acts on exactly two wires");
  const ComplexMatrix big = embed(mm.op, targets, reg);
  return big * m * big.adjoint();
}

DensityMatrix apply_mode_mixer(const DensityMatrix& rho, const ModeMixer& mm, const Wires& targets) {
  ComplexMatrix out = apply_mode_mixer_unnormalized(rho.matrix(), rho.reg(), mm, targets);
  const double norm = out.trace().real();
  if (!(norm > 1e-14))
    throw std::domain_error("mode mixer: vanishing normalisation, state has no weight on the mixer support");
  out /= norm;
  return DensityMatrix(rho.reg(), std::move(out));
}

}  // namespace qimaging
