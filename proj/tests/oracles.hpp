#pragma once

// Test-only reference computations. These deliberately avoid the library's
// index arithmetic so they can serve as independent checks.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// op (x) I on wires ordered [targets..., rest...], then an explicit
/// tensor-axis permutation back to register order.
inline Mat embed_by_permutation(const Mat& op, const std::vector<int>& target_pos, int n) {
  std::vector<int> order = target_pos;  // order[k] = register position of factor k
  for (int w = 0; w < n; ++w) {
    bool used = false;
    for (int t : target_pos) used |= (t == w);
    if (!used) order.push_back(w);
  }
  const int rest = n - static_cast<int>(target_pos.size());
  Mat big = op;
  for (int k = 0; k < rest; ++k) {
    Mat tmp(big.rows() * 2, big.cols() * 2);
    tmp.setZero();
    for (int i = 0; i < big.rows(); ++i)
      for (int j = 0; j < big.cols(); ++j) {
        tmp(2 * i, 2 * j) = big(i, j);
        tmp(2 * i + 1, 2 * j + 1) = big(i, j);
      }
    big = tmp;
  }
  const int dim = 1 << n;
  auto to_bits = [n](int x) {
    std::vector<int> b(n);
    for (int k = 0; k < n; ++k) b[k] = (x >> (n - 1 - k)) & 1;
    return b;
  };
  auto from_bits = [n](const std::vector<int>& b) {
    int x = 0;
    for (int k = 0; k < n; ++k) x = 2 * x + b[k];
    return x;
  };
  Mat out = Mat::Zero(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      // factor-order bits -> register-order bits
      const auto rb = to_bits(r), cb = to_bits(c);
      std::vector<int> rr(n), cc(n);
      for (int k = 0; k < n; ++k) {
        rr[order[k]] = rb[k];
        cc[order[k]] = cb[k];
      }
      out(from_bits(rr), from_bits(cc)) = big(r, c);
    }
  return out;
}

/// Closed-form detection probability for the Bell probe.
inline double p_h(double t, double gamma, double phi) { return 0.5 * (1.0 - t * std::cos(gamma + phi)); }
inline double p_g(double t, double gamma, double phi) { return 0.5 * (1.0 + t * std::cos(gamma + phi)); }

inline Mat pauli(char c) {
  Mat m(2, 2);
  const cplx i{0, 1};
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron2(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Two-letter Pauli product, e.g. pp("XY") = X (x) Y.
inline Mat pp(const char* s) { return kron2(pauli(s[0]), pauli(s[1])); }

/// Phase-shifted measurement observables written directly in Pauli form.
inline std::array<Mat, 2> measurement_pauli_form(double phi) {
  const Mat one_photon = (pp("II") - pp("ZZ")) / 2.0;
  const Mat mod = std::cos(phi) * (pp("XX") + pp("YY")) / 2.0 + std::sin(phi) * (pp("XY") - pp("YX")) / 2.0;
  return {0.5 * (one_photon - mod), 0.5 * (one_photon + mod)};
}

inline Mat bell(const char* which) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  const std::string w(which);
  if (w == "phi+") v << s, 0, 0, s;
  if (w == "phi-") v << s, 0, 0, -s;
  if (w == "psi+") v << 0, s, s, 0;
  if (w == "psi-") v << 0, s, -s, 0;
  return v * v.adjoint();
}

/// Minimum partial-transpose eigenvalue of the encoded Werner state.
inline double werner_ppt_min(double xi) { return std::min(0.0, (3.0 * xi - 2.0) / 4.0); }

inline Mat random_matrix(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline Mat random_hermitian(std::mt19937_64& rng, int dim) {
  const Mat g = random_matrix(rng, dim);
  return 0.5 * (g + g.adjoint());
}

inline Mat random_density(std::mt19937_64& rng, int dim) {
  const Mat g = random_matrix(rng, dim);
  Mat rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

inline Mat random_unitary(std::mt19937_64& rng, int dim) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, dim));
  return qr.householderQ() * Mat::Identity(dim, dim);
}

inline double max_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace oracle
