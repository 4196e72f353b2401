#include "qimaging/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qimaging {

namespace {

const Wires kIdlers{"i1", "i2"};
const Wires kSignals{"s1", "s2"};

// Probabilities from floating-point traces can stray past [0, 1] by rounding.
double checked_probability(double p, const char* what) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
    throw std::invalid_argument(std::string(what) + ": probability outside [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

std::vector<DensityMatrix> probe_preparation_trace() {
  const Register reg = Register::imaging();
  std::vector<DensityMatrix> steps;
  steps.push_back(DensityMatrix::basis_state(reg, "0000"));
  steps.push_back(apply_unitary(steps.back(), hadamard(), {"i2"}));
  steps.push_back(apply_unitary(steps.back(), cnot(ControlPolarity::on_zero), {"i2", "i1"}));
  steps.push_back(apply_unitary(steps.back(), cnot(), {"i1", "s1"}));
  steps.push_back(apply_unitary(steps.back(), cnot(), {"i2", "s2"}));
  return steps;
}

ProbeState prepare_probe() {
  auto steps = probe_preparation_trace();
  return {std::move(steps.back()), ProbeKind::bell, 0.0};
}

ComplexMatrix encoded_identity() {
  ComplexMatrix p = ComplexMatrix::Zero(16, 16);
  for (const char* bits : {"0000", "0011", "1100", "1111"}) p += outer(ket(bits), ket(bits));
  return p;
}

ProbeState prepare_werner(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("Werner parameter xi must lie in [0, 1]");
  const auto bell = prepare_probe();
  ComplexMatrix w = (xi / 4.0) * encoded_identity() + (1.0 - xi) * bell.rho.matrix();
  return {DensityMatrix(Register::imaging(), std::move(w)), ProbeKind::werner, xi};
}

PipelineStages run_pipeline_stages(const ProbeState& probe, const ObjectParams& obj,
                                   const std::optional<ModeMixer>& mm) {
  DensityMatrix after_object = apply_channel(probe.rho, object_channel(obj), {"i1"});
  DensityMatrix after_mixer = mm ? apply_mode_mixer(after_object, *mm, kIdlers) : after_object;
  DensityMatrix signal = partial_trace(after_mixer, kSignals);
  return {std::move(after_object), std::move(after_mixer), SignalState{std::move(signal)}};
}

SignalState run_pipeline(const ProbeState& probe, const ObjectParams& obj,
                         const std::optional<ModeMixer>& mm) {
  return run_pipeline_stages(probe, obj, mm).signal;
}

ComplexMatrix optical_signal_state(const ObjectParams& obj) {
  const ComplexVector k10 = ket("10"), k01 = ket("01");
  const cplx t = obj.transmission();
  return 0.5 * (outer(k10, k10) + t * outer(k10, k01) + std::conj(t) * outer(k01, k10) +
                outer(k01, k01));
}

ComplexMatrix detector_projector_h() { return outer(ket("10"), ket("10")); }
ComplexMatrix detector_projector_g() { return outer(ket("01"), ket("01")); }

MeasurementPair measurement_pair(double phi) {
  const Register reg({"s1", "s2"});
  const ComplexMatrix cx = embed(cnot().matrix, Wires{"s1", "s2"}, reg);
  const ComplexMatrix h = embed(hadamard().matrix, Wires{"s1"}, reg);
  const ComplexMatrix z = embed(phase_shifter(phi).matrix, Wires{"s1"}, reg);
  // The signal state meets Z_phi first, then the beam splitter, then the detectors.
  const ComplexMatrix v = cx * h * cx * z;
  return {phi, v.adjoint() * detector_projector_h() * v, v.adjoint() * detector_projector_g() * v};
}

DetectionProbabilities detection_probabilities(const SignalState& sig, const MeasurementPair& mp) {
  const auto& rho = sig.rho.matrix();
  if (rho.rows() != 4) throw std::invalid_argument("detection_probabilities: expects a two-wire signal state");
  return {(mp.m_h * rho).trace().real(), (mp.m_g * rho).trace().real()};
}

DetectionCounts sample_detections(double p_h, std::uint64_t shots, std::uint64_t seed) {
  if (!std::isfinite(p_h)) throw std::invalid_argument("sample_detections: invalid probability");
  p_h = checked_probability(p_h, "sample_detections");
  if (shots == 0) throw std::invalid_argument("sample_detections: shots must be at least 1");
  std::mt19937_64 rng(seed);
  DetectionCounts c;
  c.n_h = std::binomial_distribution<std::uint64_t>(shots, p_h)(rng);
  c.n_g = shots - c.n_h;
  return c;
}

DetectionCounts sample_detections(double p_h, double p_g, std::uint64_t shots, std::mt19937_64& rng) {
  if (!std::isfinite(p_h) || !std::isfinite(p_g)) throw std::invalid_argument("sample_detections: invalid probability");
  p_h = checked_probability(p_h, "sample_detections");
  p_g = checked_probability(p_g, "sample_detections");
  if (p_h + p_g > 1.0 + 1e-12) throw std::invalid_argument("sample_detections: probabilities sum above 1");
  if (shots == 0) throw std::invalid_argument("sample_detections: shots must be at least 1");

  DetectionCounts c;
  using Binomial = std::binomial_distribution<std::uint64_t>;
  c.n_h = Binomial(shots, p_h)(rng);
  const std::uint64_t rest = shots - c.n_h;
  const double rest_p = std::min(1.0, p_h >= 1.0 ? 0.0 : p_g / (1.0 - p_h));
  c.n_g = rest == 0 ? 0 : Binomial(rest, rest_p)(rng);
  c.n_none = rest - c.n_g;
  return c;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace qimaging
