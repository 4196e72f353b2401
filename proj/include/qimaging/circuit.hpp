#pragma once

// The four-wire imaging circuit: probe preparation on (s1, i1, i2, s2), the
// object on i1, the mode mixer on (i1, i2), idler discard, and the
// phase-shifted Bell measurement on the signal pair.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qimaging/channels.hpp"
#include "qimaging/gates.hpp"
#include "qimaging/qcore.hpp"

namespace qimaging {

enum class ProbeKind { bell, werner };

struct ProbeState {
  DensityMatrix rho;
  ProbeKind kind = ProbeKind::bell;
  double xi = 0.0;
};

/// (|1100> + |0011>)/sqrt(2) prepared by H(i2), CNOT0(i2 -> i1),
/// CNOT(i1 -> s1), CNOT(i2 -> s2) on |0000>.
ProbeState prepare_probe();

/// Intermediate states of prepare_probe, starting with |0000>.
std::vector<DensityMatrix> probe_preparation_trace();

/// Projector onto the encoded two-qubit subspace, |00> and |11> on (s1, i1)
/// times |00> and |11> on (i2, s2).
ComplexMatrix encoded_identity();

/// (xi/4) encoded_identity + (1 - xi) |probe><probe|, xi in [0, 1].
ProbeState prepare_werner(double xi);

struct SignalState {
  DensityMatrix rho;  // on (s1, s2)
};

struct PipelineStages {
  DensityMatrix after_object;
  DensityMatrix after_mixer;  // equals after_object when no mixer is used
  SignalState signal;
};

/// Object on i1, mixer on (i1, i2), then trace out both idlers. Passing
/// std::nullopt for the mixer leaves the idlers distinguishable.
PipelineStages run_pipeline_stages(const ProbeState& probe, const ObjectParams& obj,
                                   const std::optional<ModeMixer>& mm);
SignalState run_pipeline(const ProbeState& probe, const ObjectParams& obj,
                         const std::optional<ModeMixer>& mm);

/// Signal state from the optical treatment of the interferometer:
/// 1/2 (|10><10| + T e^{i g}|10><01| + T e^{-i g}|01><10| + |01><01|).
ComplexMatrix optical_signal_state(const ObjectParams& obj);

struct MeasurementPair {
  double phi = 0.0;
  ComplexMatrix m_h;
  ComplexMatrix m_g;
};

/// Detector projectors: a photon in s1 only (h) or in s2 only (g).
ComplexMatrix detector_projector_h();
ComplexMatrix detector_projector_g();

/// Observables for detectors h and g after a phase shifter Z_phi on s1 and
/// the output beam splitter CNOT(s1 -> s2), H(s1), CNOT(s1 -> s2).
MeasurementPair measurement_pair(double phi);

struct DetectionProbabilities {
  double p_h = 0.0;
  double p_g = 0.0;
  double p_none() const { return 1.0 - p_h - p_g; }
};

DetectionProbabilities detection_probabilities(const SignalState& sig, const MeasurementPair& mp);

struct DetectionCounts {
  std::uint64_t n_h = 0;
  std::uint64_t n_g = 0;
  std::uint64_t n_none = 0;
};

/// Binomial split of `shots` runs between detectors h and g.
DetectionCounts sample_detections(double p_h, std::uint64_t shots, std::uint64_t seed);
/// Three-outcome version; runs with no click are counted in n_none.
DetectionCounts sample_detections(double p_h, double p_g, std::uint64_t shots, std::mt19937_64& rng);

/// Independent stream seed for task `index` under a root seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace qimaging
