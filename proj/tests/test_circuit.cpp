#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qimaging/circuit.hpp"

using namespace qimaging;
using std::numbers::pi;

namespace {
const Register kReg = Register::imaging();
}

TEST_CASE("probe preparation") {
  const auto probe = prepare_probe();
  const ComplexVector v = (ket("1100") + ket("0011")) / std::sqrt(2.0);
  CHECK(max_abs_diff(probe.rho.matrix(), outer(v, v)) < 1e-15);
  CHECK(probe.kind == ProbeKind::bell);
  CHECK(probe.rho.purity() == doctest::Approx(1.0));

  const auto trace = probe_preparation_trace();
  REQUIRE(trace.size() == 5);
  CHECK(max_abs_diff(trace.front().matrix(), outer(ket("0000"), ket("0000"))) == 0.0);
  const ComplexVector phi2 = (ket("0100") + ket("0010")) / std::sqrt(2.0);
  CHECK(max_abs_diff(trace[2].matrix(), outer(phi2, phi2)) < 1e-15);
  CHECK(max_abs_diff(trace.back().matrix(), probe.rho.matrix()) == 0.0);

  const ComplexMatrix pt = partial_transpose(probe.rho, Wires{"i2", "s2"});
  CHECK(min_eigenvalue(pt) == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("Werner probe") {
  CHECK_THROWS_AS(prepare_werner(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(prepare_werner(1.5), std::invalid_argument);
  CHECK(max_abs_diff(prepare_werner(0.0).rho.matrix(), prepare_probe().rho.matrix()) < 1e-15);
  CHECK(max_abs_diff(prepare_werner(1.0).rho.matrix(), encoded_identity() / 4.0) < 1e-15);
  CHECK(encoded_identity().trace().real() == doctest::Approx(4.0));

  for (double xi : {0.0, 0.2, 0.5, 2.0 / 3.0, 0.9, 1.0}) {
    const auto w = prepare_werner(xi);
    CHECK(w.kind == ProbeKind::werner);
    const double ppt = min_eigenvalue(partial_transpose(w.rho, Wires{"i2", "s2"}));
    CHECK(ppt == doctest::Approx(oracle::werner_ppt_min(xi)).epsilon(1e-12));

    const double t = 0.8, g = 0.4;
    for (double phi : {0.0, pi / 2, 1.1}) {
      const auto sig = run_pipeline(w, ObjectParams(t, g), mode_mixer());
      const double ph = detection_probabilities(sig, measurement_pair(phi)).p_h;
      CHECK(ph == doctest::Approx(0.5 * (1 - xi / 2) - 0.5 * (1 - xi) * t * std::cos(g + phi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pipeline reproduces the optical signal state") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> tdist(0.0, 1.0), gdist(-pi, pi);
  const auto probe = prepare_probe();
  for (int k = 0; k < 50; ++k) {
    const ObjectParams obj(tdist(rng), gdist(rng));
    const auto sig = run_pipeline(probe, obj, mode_mixer());
    CHECK(sig.rho.reg() == Register({"s1", "s2"}));
    CHECK(max_abs_diff(sig.rho.matrix(), optical_signal_state(obj)) < 1e-12);
  }

  SUBCASE("stages") {
    const auto st = run_pipeline_stages(probe, ObjectParams(0.5, 0.2), mode_mixer());
    CHECK(std::abs(st.after_mixer.matrix().trace() - cplx(1.0)) < 1e-12);
    const auto none = run_pipeline_stages(probe, ObjectParams(0.5, 0.2), std::nullopt);
    CHECK(max_abs_diff(none.after_mixer.matrix(), none.after_object.matrix()) == 0.0);
  }
  SUBCASE("without the mixer there is no interference") {
    for (double phi : {0.0, 0.7, 2.0}) {
      const auto sig = run_pipeline(probe, ObjectParams(0.9, 0.3), std::nullopt);
      CHECK(detection_probabilities(sig, measurement_pair(phi)).p_h == doctest::Approx(0.5).epsilon(1e-13));
    }
  }
}

TEST_CASE("measurement observables") {
  CHECK(max_abs_diff(detector_projector_h(), outer(ket("10"), ket("10"))) == 0.0);
  CHECK(max_abs_diff(detector_projector_g(), outer(ket("01"), ket("01"))) == 0.0);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> angle(-pi, pi);
  for (int k = 0; k < 100; ++k) {
    const double phi = angle(rng);
    const auto mp = measurement_pair(phi);
    const auto ref = oracle::measurement_pauli_form(phi);
    CHECK(max_abs_diff(mp.m_h, ref[0]) < 1e-13);
    CHECK(max_abs_diff(mp.m_g, ref[1]) < 1e-13);
    CHECK(max_abs_diff(mp.m_h * mp.m_h, mp.m_h) < 1e-13);
    CHECK(max_abs_diff(mp.m_h * mp.m_g, ComplexMatrix::Zero(4, 4)) < 1e-13);
  }
}

TEST_CASE("detection probabilities") {
  const auto probe = prepare_probe();
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> tdist(0.0, 1.0), angle(-pi, pi);
  for (int k = 0; k < 100; ++k) {
    const double t = tdist(rng), g = angle(rng), phi = angle(rng);
    const auto p = detection_probabilities(run_pipeline(probe, ObjectParams(t, g), mode_mixer()), measurement_pair(phi));
    CHECK(p.p_h == doctest::Approx(oracle::p_h(t, g, phi)).epsilon(1e-12));
    CHECK(p.p_g == doctest::Approx(oracle::p_g(t, g, phi)).epsilon(1e-12));
    CHECK(std::abs(p.p_none()) < 1e-12);
  }
  // phase shift and object phase enter only through their sum
  const auto a = detection_probabilities(run_pipeline(probe, ObjectParams(0.6, 0.5), mode_mixer()), measurement_pair(0.2));
  const auto b = detection_probabilities(run_pipeline(probe, ObjectParams(0.6, 0.2), mode_mixer()), measurement_pair(0.5));
  CHECK(a.p_h == doctest::Approx(b.p_h).epsilon(1e-13));
}

TEST_CASE("sampling") {
  const auto c1 = sample_detections(0.3, 10000, 7);
  const auto c2 = sample_detections(0.3, 10000, 7);
  CHECK(c1.n_h == c2.n_h);
  CHECK(c1.n_h + c1.n_g == 10000);
  CHECK(c1.n_none == 0);
  CHECK(std::abs(static_cast<double>(c1.n_h) / 10000 - 0.3) < 0.02);
  CHECK(sample_detections(0.0, 100, 1).n_h == 0);
  CHECK(sample_detections(1.0, 100, 1).n_h == 100);
  CHECK_THROWS_AS(sample_detections(1.5, 100, 1), std::invalid_argument);

  std::mt19937_64 rng(9);
  const auto c3 = sample_detections(0.2, 0.5, 5000, rng);
  CHECK(c3.n_h + c3.n_g + c3.n_none == 5000);
  CHECK(c3.n_none > 0);
  CHECK_THROWS_AS(sample_detections(0.7, 0.5, 10, rng), std::invalid_argument);

  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
