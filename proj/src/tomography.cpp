#include "qimaging/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qimaging {

namespace {

using Index = Eigen::Index;

std::vector<Pauli> letters_of(std::size_t code, std::size_t n) {
  std::vector<Pauli> out(n);
  for (std::size_t w = 0; w < n; ++w) out[w] = static_cast<Pauli>((code >> (2 * (n - 1 - w))) & 3U);
  return out;
}

void check_bipartition(const Register& reg, const Wires& a, const Wires& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("operator_schmidt: both blocks must be nonempty");
  if (a.size() + b.size() != reg.size())
    throw std::invalid_argument("operator_schmidt: blocks must partition the register");
  Wires all = a;
  all.insert(all.end(), b.begin(), b.end());
  reg.indices_of(all);  // throws on unknown or repeated labels
}

SchmidtData hermitian_route(const ComplexMatrix& m, std::size_t na, std::size_t nb, double drop) {
  const std::size_t ka = std::size_t{1} << (2 * na);
  const std::size_t kb = std::size_t{1} << (2 * nb);
  const double da = static_cast<double>(std::size_t{1} << na);
  const double db = static_cast<double>(std::size_t{1} << nb);

  // m = sum_jk C_jk (P_j / sqrt(da)) (x) (Q_k / sqrt(db)), C real for Hermitian m.
  Eigen::MatrixXd c(static_cast<Index>(ka), static_cast<Index>(kb));
  std::vector<Pauli> letters(na + nb);
  for (std::size_t j = 0; j < ka; ++j) {
    const auto pa = letters_of(j, na);
    std::copy(pa.begin(), pa.end(), letters.begin());
    for (std::size_t k = 0; k < kb; ++k) {
      const auto pb = letters_of(k, nb);
      std::copy(pb.begin(), pb.end(), letters.begin() + static_cast<std::ptrdiff_t>(na));
      c(static_cast<Index>(j), static_cast<Index>(k)) =
          pauli_coefficient(m, letters).real() * std::sqrt(da * db);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtData sd;
  sd.hermitian_gauge = true;
  const auto& s = svd.singularValues();
  for (Index l = 0; l < s.size(); ++l) {
    if (s(l) <= drop) break;
    ComplexMatrix a = ComplexMatrix::Zero(static_cast<Index>(da), static_cast<Index>(da));
    ComplexMatrix b = ComplexMatrix::Zero(static_cast<Index>(db), static_cast<Index>(db));
    for (std::size_t j = 0; j < ka; ++j) {
      const double u = svd.matrixU()(static_cast<Index>(j), l);
      if (u != 0.0) a += (u / std::sqrt(da)) * pauli_matrix(letters_of(j, na));
    }
    for (std::size_t k = 0; k < kb; ++k) {
      const double v = svd.matrixV()(static_cast<Index>(k), l);
      if (v != 0.0) b += (v / std::sqrt(db)) * pauli_matrix(letters_of(k, nb));
    }
    sd.r.push_back(s(l));
    sd.a_ops.push_back(std::move(a));
    sd.b_ops.push_back(std::move(b));
  }
  return sd;
}

SchmidtData realignment_route(const ComplexMatrix& m, std::size_t na, std::size_t nb, double drop) {
  const Index da = Index{1} << na;
  const Index db = Index{1} << nb;
  // R[(a a'), (b b')] = m[(a b), (a' b')]
  ComplexMatrix r(da * da, db * db);
  for (Index a = 0; a < da; ++a)
    for (Index a2 = 0; a2 < da; ++a2)
      for (Index b = 0; b < db; ++b)
        for (Index b2 = 0; b2 < db; ++b2) r(a * da + a2, b * db + b2) = m(a * db + b, a2 * db + b2);

  Eigen::JacobiSVD<ComplexMatrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtData sd;
  sd.hermitian_gauge = false;
  const auto& s = svd.singularValues();
  for (Index l = 0; l < s.size(); ++l) {
    if (s(l) <= drop) break;
    ComplexMatrix a(da, da), b(db, db);
    for (Index i = 0; i < da; ++i)
      for (Index j = 0; j < da; ++j) a(i, j) = svd.matrixU()(i * da + j, l);
    for (Index i = 0; i < db; ++i)
      for (Index j = 0; j < db; ++j) b(i, j) = std::conj(svd.matrixV()(i * db + j, l));
    sd.r.push_back(s(l));
    sd.a_ops.push_back(std::move(a));
    sd.b_ops.push_back(std::move(b));
  }
  sd.hermitian_gauge = std::all_of(sd.a_ops.begin(), sd.a_ops.end(), [](const auto& x) { return is_hermitian(x); }) &&
                       std::all_of(sd.b_ops.begin(), sd.b_ops.end(), [](const auto& x) { return is_hermitian(x); });
  return sd;
}

void require_probability(double p) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw std::invalid_argument("estimate_object: probability outside [0, 1]");
}

bool same_phase(double a, double b) { return std::abs(normalize_angle(a - b)) < 1e-12; }

}  // namespace

// ---------------------------------------------------------------------------

SchmidtData operator_schmidt(const ComplexMatrix& m, const Register& reg, const Wires& a_wires,
                             const Wires& b_wires, double drop_below) {
  check_bipartition(reg, a_wires, b_wires);
  Wires order = a_wires;
  order.insert(order.end(), b_wires.begin(), b_wires.end());
  const ComplexMatrix mm = permute_wires(m, reg, order);

  SchmidtData sd = is_hermitian(mm) ? hermitian_route(mm, a_wires.size(), b_wires.size(), drop_below)
                                    : realignment_route(mm, a_wires.size(), b_wires.size(), drop_below);
  sd.a_wires = a_wires;
  sd.b_wires = b_wires;
  sd.reconstruction_error = sd.rank() == 0 ? mm.cwiseAbs().maxCoeff() : max_abs_diff(schmidt_reconstruct(sd), mm);
  return sd;
}

SchmidtData operator_schmidt(const DensityMatrix& rho, const Wires& a_wires, const Wires& b_wires) {
  return operator_schmidt(rho.matrix(), rho.reg(), a_wires, b_wires);
}

ComplexMatrix schmidt_reconstruct(const SchmidtData& sd) {
  if (sd.rank() == 0) throw std::invalid_argument("schmidt_reconstruct: empty decomposition");
  ComplexMatrix out = sd.r[0] * kron(sd.a_ops[0], sd.b_ops[0]);
  for (std::size_t l = 1; l < sd.rank(); ++l) out += sd.r[l] * kron(sd.a_ops[l], sd.b_ops[l]);
  return out;
}

std::vector<cplx> aapt_predict(const SchmidtData& sd, const KrausChannel& ch, const PostOperation& post) {
  const std::size_t da = std::size_t{1} << sd.a_wires.size();
  if (ch.dim() != da) throw std::invalid_argument("aapt_predict: channel does not act on the system block");
  const Register block(sd.a_wires);

  auto apply_post = [&](const ComplexMatrix& x) -> ComplexMatrix {
    if (const auto* k = std::get_if<KrausChannel>(&post)) {
      if (k->dim() != da) throw std::invalid_argument("aapt_predict: post-operation block mismatch");
      return k->apply(x);
    }
    if (const auto* mm = std::get_if<ModeMixer>(&post)) {
      if (sd.a_wires.size() != 2) throw std::invalid_argument("aapt_predict: mode mixer needs a two-wire block");
      return apply_mode_mixer_unnormalized(x, block, *mm, sd.a_wires);
    }
    return x;
  };

  std::vector<cplx> out;
  out.reserve(sd.rank());
  for (std::size_t l = 0; l < sd.rank(); ++l) out.push_back(sd.r[l] * apply_post(ch.apply(sd.a_ops[l])).trace());
  return out;
}

std::vector<cplx> ancilla_expectations(const SchmidtData& sd, const ComplexMatrix& rho_b) {
  std::vector<cplx> out;
  for (const auto& b : sd.b_ops) {
    if (b.rows() != rho_b.rows() || b.cols() != rho_b.cols())
      throw std::invalid_argument("ancilla_expectations: block mismatch");
    out.push_back((b.adjoint() * rho_b).trace());
  }
  return out;
}

// ---------------------------------------------------------------------------

ObjectEstimate estimate_object(std::span<const PhaseSample> samples, EstimationMethod method,
                               std::optional<std::uint64_t> shots) {
  for (const auto& s : samples) {
    if (!std::isfinite(s.phi) || !std::isfinite(s.p_h)) throw std::invalid_argument("estimate_object: non-finite sample");
    require_probability(s.p_h);
  }
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (same_phase(samples[i].phi, samples[j].phi)) throw std::invalid_argument("estimate_object: duplicate phase values");
  if (shots && *shots == 0) throw std::invalid_argument("estimate_object: shots must be positive");

  std::vector<PhaseSample> used;
  if (method == EstimationMethod::two_point) {
    if (samples.size() < 2) throw std::invalid_argument("estimate_object: two-point method needs two phase values");
    auto find = [&](double phi) {
      return std::find_if(samples.begin(), samples.end(), [&](const auto& s) { return same_phase(s.phi, phi); });
    };
    const auto zero = find(0.0);
    const auto quarter = find(std::numbers::pi / 2);
    if (zero != samples.end() && quarter != samples.end())
      used = {*zero, *quarter};
    else
      used = {samples[0], samples[1]};
  } else {
    if (samples.size() < 3) throw std::invalid_argument("estimate_object: least squares needs at least three phase values");
    used.assign(samples.begin(), samples.end());
  }

  // 1 - 2 P_h(phi) = c cos(phi) - s sin(phi), with c = T cos(gamma), s = T sin(gamma).
  const auto n = static_cast<Index>(used.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = std::cos(used[i].phi);
    x(i, 1) = -std::sin(used[i].phi);
    y(i) = 1.0 - 2.0 * used[i].p_h;
  }
  const Eigen::Matrix2d gram = x.transpose() * x;
  if (std::abs(gram.determinant()) < 1e-12)
    throw std::invalid_argument("estimate_object: phase values cannot separate T from gamma");
  const Eigen::Matrix2d gram_inv = gram.inverse();
  const Eigen::Vector2d cs = gram_inv * (x.transpose() * y);
  const double c = cs(0), s = cs(1);

  ObjectEstimate est;
  est.method = method;
  est.t_hat = std::hypot(c, s);
  est.gamma_hat = normalize_angle(std::atan2(s, c));

  if (shots) {
    const double nshots = static_cast<double>(*shots);
    Eigen::VectorXd var(n);
    for (Index i = 0; i < n; ++i) {
      const double p = std::clamp(used[i].p_h, 0.0, 1.0);
      var(i) = 4.0 * p * (1.0 - p) / nshots;
    }
    const Eigen::MatrixXd h = gram_inv * x.transpose();  // 2 x n
    const Eigen::Matrix2d cov = h * var.asDiagonal() * h.transpose();
    if (est.t_hat > 0.0) {
      const Eigen::Vector2d gt(c / est.t_hat, s / est.t_hat);
      const Eigen::Vector2d gg(-s / (est.t_hat * est.t_hat), c / (est.t_hat * est.t_hat));
      est.stderr_t = std::sqrt(std::max(0.0, gt.dot(cov * gt)));
      est.stderr_gamma = std::sqrt(std::max(0.0, gg.dot(cov * gg)));
    } else {
      est.stderr_t = std::sqrt(0.5 * cov.trace());
      est.stderr_gamma = std::numeric_limits<double>::infinity();
    }
    est.degenerate = est.t_hat < 3.0 * *est.stderr_t || est.t_hat < kAnalyticDegeneracy;
  } else {
    est.degenerate = est.t_hat < kAnalyticDegeneracy;
  }
  if (est.degenerate) est.gamma_hat = std::numeric_limits<double>::quiet_NaN();
  return est;
}

double cos_component(double p_h_at_zero) {
  require_probability(p_h_at_zero);
  return 1.0 - 2.0 * p_h_at_zero;
}

double visibility(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("visibility: empty series");
  for (double p : series)
    if (!(p >= 0.0)) throw std::invalid_argument("visibility: negative or non-finite value");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*hi + *lo == 0.0) throw std::invalid_argument("visibility: all-zero series");
  return (*hi - *lo) / (*hi + *lo);
}

double FringeFit::amplitude() const { return std::hypot(cos_coef, sin_coef); }

FringeFit fit_fringe(std::span<const double> angles, std::span<const double> values) {
  if (angles.size() != values.size()) throw std::invalid_argument("fit_fringe: size mismatch");
  if (angles.size() < 3) throw std::invalid_argument("fit_fringe: needs at least three points");
  const auto n = static_cast<Index>(angles.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(angles[static_cast<std::size_t>(i)]);
    x(i, 2) = std::sin(angles[static_cast<std::size_t>(i)]);
    y(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d coef = x.colPivHouseholderQr().solve(y);
  return {coef(0), coef(1), coef(2)};
}

}  // namespace qimaging
