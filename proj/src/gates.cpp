#include "qimaging/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace qimaging {

Gate hadamard() {
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return {"H", h, 1, std::nullopt};
}

Gate pauli_gate(Pauli which) {
  static const char* names[] = {"I", "X", "Y", "Z"};
  return {names[static_cast<int>(which)], pauli_matrix(which), 1, std::nullopt};
}

Gate cz() {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return {"CZ", m, 2, std::nullopt};
}

Gate cnot(ControlPolarity polarity) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  if (polarity == ControlPolarity::on_one) {
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
    return {"CNOT", m, 2, std::nullopt};
  }
  m(0, 1) = m(1, 0) = 1.0;
  m(2, 2) = m(3, 3) = 1.0;
  return {"CNOT0", m, 2, std::nullopt};
}

Gate phase_shifter(double phi) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, phi);
  return {"Zphi", m, 1, phi};
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Gate& g, const Wires& targets) {
  if (targets.size() != g.arity)
    throw std::invalid_argument("apply_unitary: gate " + g.name + " expects " +
                                std::to_string(g.arity) + " target wire(s)");
  const ComplexMatrix u = embed(g.matrix, targets, rho.reg());
  return DensityMatrix(rho.reg(), u * rho.matrix() * u.adjoint());
}

}  // namespace qimaging
