#pragma once

#include <optional>
#include <string>

#include "qimaging/qcore.hpp"

namespace qimaging {

/// A named unitary on one or two wires.
struct Gate {
  std::string name;
  ComplexMatrix matrix;
  std::size_t arity = 1;
  std::optional<double> angle;  // radians, for parametrised gates
};

enum class ControlPolarity { on_one, on_zero };

Gate hadamard();
Gate pauli_gate(Pauli which);
Gate cz();
/// CNOT with the control as the first wire. `on_zero` flips the target when
/// the control is |0>.
Gate cnot(ControlPolarity polarity = ControlPolarity::on_one);
/// Z_phi = diag(1, e^{i phi}).
Gate phase_shifter(double phi);

/// rho -> U rho U^dagger with U the gate embedded on `targets`.
DensityMatrix apply_unitary(const DensityMatrix& rho, const Gate& g, const Wires& targets);

}  // namespace qimaging
