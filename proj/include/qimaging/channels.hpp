#pragma once

// Quantum operations: the semi-transparent object channel (an amplitude
// damping map with a transmission phase), its chi-matrix and Choi forms, and
// the renormalising mode mixer that makes the two idler sources
// indistinguishable.

#include <functional>
#include <vector>

#include "qimaging/qcore.hpp"

namespace qimaging {

/// Maps an angle into (-pi, pi].
double normalize_angle(double radians);

/// Transmission amplitude T in [0, 1] and transmission phase gamma.
class ObjectParams {
 public:
  ObjectParams(double transmission, double phase);

  double t() const { return t_; }
  double gamma() const { return gamma_; }
  /// Complex transmission factor T e^{i gamma}.
  cplx transmission() const { return std::polar(t_, gamma_); }

 private:
  double t_;
  double gamma_;
};

/// Completely positive, trace-preserving map given by Kraus operators.
/// Construction rejects operator lists that are not trace preserving.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> ops);

  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  std::size_t dim() const { return static_cast<std::size_t>(ops_.front().rows()); }

  /// sum_k K x K^dagger
  ComplexMatrix apply(const ComplexMatrix& x) const;
  /// max |sum_k K^dagger K - I|
  double trace_preservation_error() const;

 private:
  std::vector<ComplexMatrix> ops_;
};

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

KrausChannel identity_channel(std::size_t dim);

/// Kraus form of the object: K0 = diag(1, T e^{i gamma}),
/// K1 = sqrt(1 - T^2) |0><1|.
KrausChannel object_channel(const ObjectParams& p);

/// `outer` after `inner`.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);

/// Channel acting on `targets` of `reg` and trivially elsewhere.
KrausChannel embed_channel(const KrausChannel& ch, const Wires& targets, const Register& reg);

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, const Wires& targets);

/// Process matrix in the basis sigma_alpha / sqrt(2), normalised so that
/// E[rho] = 1/2 sum_ab chi_ab sigma_a rho sigma_b.
struct ChiMatrix {
  Eigen::Matrix4cd entries;
};

ChiMatrix chi_matrix(const KrausChannel& ch);
/// Applies the channel encoded by chi to a 2x2 operator.
ComplexMatrix chi_apply(const ChiMatrix& chi, const ComplexMatrix& x);

/// Choi matrix sum_ij E(|i><j|) (x) |i><j|.
ComplexMatrix choi_matrix(const LinearMap& map, std::size_t dim);
ComplexMatrix choi_matrix(const KrausChannel& ch);

struct ChoiCheck {
  bool positive = false;
  double min_eigenvalue = 0.0;
};

ChoiCheck choi_psd_check(const KrausChannel& ch);
ChoiCheck choi_psd_check(const LinearMap& map, std::size_t dim);

enum class MixerConvention {
  /// Identity on span{|00>, |11>}.
  literal_identity,
  /// (|00> + |11>)(<00| + <11|) on that block. Kept for comparison runs.
  coupled_block,
};

/// Renormalising projection that sends |01> and |10> of two idler wires to
/// a common state |Xi>.
struct ModeMixer {
  ComplexVector xi;
  ComplexMatrix op;
  MixerConvention convention = MixerConvention::literal_identity;
};

/// |Xi> = |-> (x) |+>, produced by a Hadamard, a CZ and a |+> projection.
ComplexVector default_mixer_state();

ModeMixer mode_mixer(const ComplexVector& xi = default_mixer_state(),
                     MixerConvention convention = MixerConvention::literal_identity);

/// M rho M^dagger without renormalisation; this is the linear part of the mixer.
ComplexMatrix apply_mode_mixer_unnormalized(const ComplexMatrix& m, const Register& reg,
                                            const ModeMixer& mm, const Wires& targets);

/// M rho M^dagger / Tr[M rho M^dagger]. Throws std::domain_error when the
/// trace is at most 1e-14, i.e. rho has no weight on the mixer's support.
DensityMatrix apply_mode_mixer(const DensityMatrix& rho, const ModeMixer& mm, const Wires& targets);

}  // namespace qimaging
