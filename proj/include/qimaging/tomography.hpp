#pragma once

// Ancilla-assisted process tomography with undetected particles: operator
// Schmidt decomposition of the probe, the linear relation between ancilla
// expectations and the unknown channel, and recovery of (T, gamma) from
// phase-swept detection probabilities.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qimaging/channels.hpp"
#include "qimaging/qcore.hpp"

namespace qimaging {

/// rho = sum_l r_l A_l (x) B_l with Tr[A_l A_m^dagger] = Tr[B_l B_m^dagger] = delta_lm.
struct SchmidtData {
  std::vector<double> r;
  std::vector<ComplexMatrix> a_ops;  // on a_wires
  std::vector<ComplexMatrix> b_ops;  // on b_wires
  Wires a_wires;
  Wires b_wires;
  /// True when every A_l and B_l is Hermitian. Holds whenever the input is.
  bool hermitian_gauge = false;
  double reconstruction_error = 0.0;

  std::size_t rank() const { return r.size(); }
};

/// Operator Schmidt decomposition across (a_wires | b_wires), which must
/// partition the register. Hermitian input is expanded in normalised Pauli
/// bases and factored with a real SVD, so every A_l and B_l is Hermitian and
/// r_l >= 0. Other input goes through a complex SVD of the realigned matrix.
/// Terms with r_l <= drop_below are discarded.
SchmidtData operator_schmidt(const ComplexMatrix& m, const Register& reg, const Wires& a_wires,
                             const Wires& b_wires, double drop_below = 1e-12);
SchmidtData operator_schmidt(const DensityMatrix& rho, const Wires& a_wires, const Wires& b_wires);

/// sum_l r_l A_l (x) B_l, on a_wires followed by b_wires.
ComplexMatrix schmidt_reconstruct(const SchmidtData& sd);

/// Known operation applied to the undetected block after the unknown channel.
/// A ModeMixer contributes its linear part M x M^dagger (no renormalisation).
using PostOperation = std::variant<std::monostate, KrausChannel, ModeMixer>;

/// <B_l^dagger> = r_l Tr[F(E(A_l))] for every Schmidt term. `ch` and the
/// post-operation act on the whole A block.
std::vector<cplx> aapt_predict(const SchmidtData& sd, const KrausChannel& ch,
                               const PostOperation& post = std::monostate{});

/// Tr[B_l^dagger rho_b] for a state on the B block.
std::vector<cplx> ancilla_expectations(const SchmidtData& sd, const ComplexMatrix& rho_b);

enum class EstimationMethod { two_point, least_squares };

struct PhaseSample {
  double phi = 0.0;
  double p_h = 0.0;
};

struct ObjectEstimate {
  double t_hat = 0.0;
  double gamma_hat = 0.0;  // NaN when degenerate
  std::optional<double> stderr_t;
  std::optional<double> stderr_gamma;
  EstimationMethod method = EstimationMethod::two_point;
  bool degenerate = false;
};

/// Degeneracy threshold on t_hat when probabilities are exact.
inline constexpr double kAnalyticDegeneracy = 1e-9;

/// Inverts P_h(phi) = [1 - T cos(gamma + phi)] / 2.
///
/// two_point uses the samples at phi = 0 and phi = pi/2 when both are present
/// (c = 1 - 2 P_h(0), s = 2 P_h(pi/2) - 1) and otherwise the first two
/// samples. least_squares fits c cos(phi) - s sin(phi) to 1 - 2 P_h over all
/// samples (at least three). When `shots` is given, standard errors follow
/// from binomial variances and the estimate is degenerate below three
/// standard errors; otherwise below kAnalyticDegeneracy.
///
/// Throws std::invalid_argument for too few samples, duplicate phases, or
/// phases that cannot separate T from gamma (e.g. only 0 and pi).
ObjectEstimate estimate_object(std::span<const PhaseSample> samples, EstimationMethod method,
                               std::optional<std::uint64_t> shots = std::nullopt);

/// T cos(gamma) from the unshifted measurement alone. This is all a single
/// phase setting determines.
double cos_component(double p_h_at_zero);

/// (max - min) / (max + min) of a fringe.
double visibility(std::span<const double> series);

/// Least-squares fit of offset + a cos(x) + b sin(x).
struct FringeFit {
  double offset = 0.0;
  double cos_coef = 0.0;
  double sin_coef = 0.0;
  double amplitude() const;
};

FringeFit fit_fringe(std::span<const double> angles, std::span<const double> values);

}  // namespace qimaging
