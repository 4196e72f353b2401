// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "qimaging/scan.hpp"
#include "qimaging/tomography.hpp"

using namespace qimaging;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// (T, gamma) grid over [0, 1] x (-pi, pi].
template <typename F>
void for_grid(int n, F&& f) {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) f(a / double(n - 1), -pi + 2 * pi * (b + 1) / n);
}

double angle_error(double a, double b) { return std::abs(normalize_angle(a - b)); }

Outcome detection_law() {
  Outcome o;
  const auto probe = prepare_probe();
  const auto mm = mode_mixer();
  const auto m0 = measurement_pair(0.0);
  double err = 0, sum_err = 0;
  for_grid(20, [&](double t, double g) {
    const auto p = detection_probabilities(run_pipeline(probe, ObjectParams(t, g), mm), m0);
    err = std::max({err, std::abs(p.p_h - (1 - t * std::cos(g)) / 2), std::abs(p.p_g - (1 + t * std::cos(g)) / 2)});
    sum_err = std::max(sum_err, std::abs(p.p_h + p.p_g - 1));
  });
  o.require(err <= 1e-12, fmt("P error %.3g", err));
  o.require(sum_err <= 1e-12, fmt("P_h + P_g error %.3g", sum_err));
  o.detail = o.pass ? fmt("max |P - (1 -/+ T cos g)/2| = %.2e on 20x20 grid", err) : o.detail;
  return o;
}

Outcome signal_state_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> td(0, 1), gd(-pi, pi);
  const auto probe = prepare_probe();
  const auto mm = mode_mixer();
  double err = 0;
  for (int k = 0; k < 50; ++k) {
    const ObjectParams obj(td(rng), gd(rng));
    err = std::max(err, max_abs_diff(run_pipeline(probe, obj, mm).rho.matrix(), optical_signal_state(obj)));
  }
  o.require(err <= 1e-12, fmt("entrywise error %.3g", err));
  if (o.pass) o.detail = fmt("max entrywise error %.2e over 50 random objects", err);
  return o;
}

Outcome phase_sweep() {
  Outcome o;
  const auto probe = prepare_probe();
  const auto mm = mode_mixer();
  const auto phis = uniform_phases(24);
  std::vector<MeasurementPair> mps;
  for (double phi : phis) mps.push_back(measurement_pair(phi));

  double law = 0, rt_t = 0, rt_g = 0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> td(0.05, 1), gd(-pi, pi);
  for (int k = 0; k < 20; ++k) {
    const double t = td(rng), g = gd(rng);
    const auto sig = run_pipeline(probe, ObjectParams(t, g), mm);
    std::vector<PhaseSample> samples;
    for (std::size_t j = 0; j < phis.size(); ++j) {
      const double p = detection_probabilities(sig, mps[j]).p_h;
      law = std::max(law, std::abs(p - 0.5 * (1 - t * std::cos(g + phis[j]))));
      samples.push_back({phis[j], p});
    }
    const auto est = estimate_object(samples, EstimationMethod::least_squares);
    rt_t = std::max(rt_t, std::abs(est.t_hat - t));
    rt_g = std::max(rt_g, angle_error(est.gamma_hat, g));
  }
  o.require(law <= 1e-12, fmt("sweep law error %.3g", law));
  o.require(rt_t <= 1e-12 && rt_g <= 1e-12, fmt("analytic round trip error %.3g", std::max(rt_t, rt_g)));

  const double t = 0.6, g = -1.0;
  const std::uint64_t shots = 100000;
  const auto sig = run_pipeline(probe, ObjectParams(t, g), mm);
  std::vector<double> exact;
  for (const auto& mp : mps) exact.push_back(detection_probabilities(sig, mp).p_h);
  int good = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::vector<PhaseSample> samples;
    for (std::size_t j = 0; j < phis.size(); ++j) {
      const auto c = sample_detections(exact[j], shots, derive_seed(derive_seed(kDefaultSeed, trial), j));
      samples.push_back({phis[j], double(c.n_h) / double(shots)});
    }
    const auto est = estimate_object(samples, EstimationMethod::least_squares, shots);
    if (std::abs(est.t_hat - t) < 0.02 && angle_error(est.gamma_hat, g) < 0.04) ++good;
  }
  o.require(good >= 95, "only " + std::to_string(good) + "/100 shot trials within bounds");
  if (o.pass)
    o.detail = fmt("law err %.2e", law) + fmt(", round trip err %.2e", std::max(rt_t, rt_g)) + ", " +
               std::to_string(good) +
               "/100 shot trials within (0.02, 0.04)";
  return o;
}

Outcome object_channel_validity() {
  Outcome o;
  double tp = 0, choi_min = 1;
  for_grid(20, [&](double t, double g) {
    const auto ch = object_channel(ObjectParams(t, g));
    tp = std::max(tp, ch.trace_preservation_error());
    choi_min = std::min(choi_min, choi_psd_check(ch).min_eigenvalue);
  });
  o.require(tp <= 1e-12, fmt("trace preservation error %.3g", tp));
  o.require(choi_min >= -1e-10, fmt("Choi min eigenvalue %.3g", choi_min));

  double chi_err = 0;
  for_grid(20, [&](double t, double g) {
    const auto ch = object_channel(ObjectParams(t, g));
    const auto chi = chi_matrix(ch);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(2, 2);
        e(i, j) = 1.0;
        chi_err = std::max(chi_err, max_abs_diff(chi_apply(chi, e), ch.apply(e)));
      }
  });
  o.require(chi_err <= 1e-12, fmt("chi round trip error %.3g", chi_err));

  // Jacobian of the real and imaginary chi entries with respect to (T, gamma).
  auto flat = [](double t, double g) {
    const auto chi = chi_matrix(object_channel(ObjectParams(t, g))).entries;
    Eigen::VectorXd v(32);
    for (int k = 0; k < 16; ++k) {
      v(2 * k) = chi(k / 4, k % 4).real();
      v(2 * k + 1) = chi(k / 4, k % 4).imag();
    }
    return v;
  };
  int min_rank = 99, max_rank = 0;
  const double h = 1e-6;
  for (double t : {0.2, 0.5, 0.8})
    for (double g : {-2.0, 0.3, 1.7}) {
      Eigen::MatrixXd jac(32, 2);
      jac.col(0) = (flat(t + h, g) - flat(t - h, g)) / (2 * h);
      jac.col(1) = (flat(t, g + h) - flat(t, g - h)) / (2 * h);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
      const auto s = svd.singularValues();
      int rank = 0;
      for (int k = 0; k < s.size(); ++k) rank += s(k) > 1e-6 * s(0) ? 1 : 0;
      min_rank = std::min(min_rank, rank);
      max_rank = std::max(max_rank, rank);
    }
  o.require(min_rank == 2 && max_rank == 2, "Jacobian rank " + std::to_string(min_rank) + ".." +
                                                std::to_string(max_rank));
  if (o.pass)
    o.detail = fmt("TP err %.2e", tp) + fmt(", Choi min %.2e", choi_min) + fmt(", chi round trip %.2e", chi_err) +
               ", Jacobian rank 2";
  return o;
}

Outcome schmidt_structure() {
  Outcome o;
  const auto probe = prepare_probe();
  const auto sd = operator_schmidt(probe.rho, Wires{"i1", "i2"}, Wires{"s1", "s2"});
  o.require(sd.rank() == 4, "rank " + std::to_string(sd.rank()));
  double sv = 0;
  for (double r : sd.r) sv = std::max(sv, std::abs(std::abs(r) - 0.5));
  o.require(sv <= 1e-12, fmt("singular value error %.3g", sv));

  const double n = std::sqrt(8.0);
  const std::array<ComplexMatrix, 4> ops = {
      (oracle::pp("II") - oracle::pp("ZZ")) / n, (oracle::pp("ZI") - oracle::pp("IZ")) / n,
      (oracle::pp("XX") + oracle::pp("YY")) / n, (oracle::pp("XY") - oracle::pp("YX")) / n};
  const double r[] = {0.5, 0.5, 0.5, -0.5};
  const ComplexMatrix rho = permute_wires(probe.rho, Wires{"i1", "i2", "s1", "s2"}).matrix();
  double basis = 0;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      basis = std::max(basis, std::abs((kron(ops[l], ops[m]) * rho).trace() - cplx(l == m ? r[l] : 0.0)));
  o.require(basis <= 1e-12, fmt("explicit basis error %.3g", basis));
  if (o.pass) o.detail = fmt("|r| = 1/2 x4 (err %.2e)", sv) + fmt(", explicit basis err %.2e", basis);
  return o;
}

Outcome bell_measurements() {
  Outcome o;
  const char* names[] = {"phi+", "phi-", "psi+", "psi-"};
  // signs of II, XX, YY, ZZ
  const double signs[4][4] = {{1, 1, -1, 1}, {1, -1, 1, 1}, {1, 1, 1, -1}, {1, -1, -1, -1}};
  const ComplexVector kets[] = {(ket("00") + ket("11")) / std::sqrt(2.0), (ket("00") - ket("11")) / std::sqrt(2.0),
                                (ket("01") + ket("10")) / std::sqrt(2.0), (ket("01") - ket("10")) / std::sqrt(2.0)};
  double err = 0;
  for (int b = 0; b < 4; ++b) {
    const ComplexMatrix expansion = (signs[b][0] * oracle::pp("II") + signs[b][1] * oracle::pp("XX") +
                                     signs[b][2] * oracle::pp("YY") + signs[b][3] * oracle::pp("ZZ")) /
                                    4.0;
    err = std::max(err, max_abs_diff(outer(kets[b], kets[b]), expansion));
    err = std::max(err, max_abs_diff(to_matrix(pauli_decompose(oracle::bell(names[b]), Register({"a", "b"}))),
                                     expansion));
  }
  o.require(err <= 1e-12, fmt("Bell expansion error %.3g", err));
  const auto m0 = measurement_pair(0.0);
  const double mh = max_abs_diff(m0.m_h, outer(kets[3], kets[3]));
  const double mg = max_abs_diff(m0.m_g, outer(kets[2], kets[2]));
  o.require(mh <= 1e-12 && mg <= 1e-12, fmt("M(0) error %.3g", std::max(mh, mg)));
  if (o.pass) o.detail = fmt("expansions err %.2e", err) + fmt(", M(0) = Bell projectors err %.2e", std::max(mh, mg));
  return o;
}

Outcome werner_experiment() {
  Outcome o;
  const double t = 0.8, g = 0.4;
  const auto phis = uniform_phases(24);
  const auto mm = mode_mixer();
  double amp_err = 0;
  std::string report;
  for (double xi : {0.0, 0.25, 0.5, 2.0 / 3.0, 0.75, 0.9, 1.0}) {
    const auto w = prepare_werner(xi);
    const auto sig = run_pipeline(w, ObjectParams(t, g), mm);
    std::vector<double> ph;
    double click = 0;
    for (double phi : phis) {
      const auto p = detection_probabilities(sig, measurement_pair(phi));
      ph.push_back(p.p_h);
      click += p.p_h + p.p_g;
    }
    const auto fit = fit_fringe(phis, ph);
    const double amplitude = 2 * fit.amplitude();
    const double ppt = min_eigenvalue(partial_transpose(w.rho, Wires{"i2", "s2"}));
    if (xi != 0.75) amp_err = std::max(amp_err, std::abs(amplitude - (1 - xi) * t));
    if (xi < 2.0 / 3.0) o.require(ppt < 0, fmt("PPT not negative at xi=%.3g", xi));
    if (xi == 2.0 / 3.0) o.require(std::abs(ppt) < 1e-9, fmt("|PPT min| %.3g at xi=2/3", ppt));
    if (xi == 0.75) {
      o.require(amplitude > 0, "no modulation at the separable point xi=0.75");
      amp_err = std::max(amp_err, std::abs(amplitude - (1 - xi) * t));
    }
    report += fmt(" [xi=%.3g", xi) + fmt(" offset=%.6g", fit.offset) + fmt(" vs 1/2, p_click=%.6g]",
                                                                          click / double(phis.size()));
  }
  o.require(amp_err <= 1e-12, fmt("amplitude error %.3g", amp_err));
  if (o.pass) o.detail = fmt("amplitude err %.2e, PPT sign change at 2/3, xi=0.75 amplitude > 0;", amp_err) + report;
  return o;
}

Outcome which_path_necessity() {
  Outcome o;
  const auto probe = prepare_probe();
  double err = 0;
  for_grid(20, [&](double t, double g) {
    const auto sig = run_pipeline(probe, ObjectParams(t, g), std::nullopt);
    for (double phi : {0.0, 1.0, pi / 2, 2.5}) {
      const auto p = detection_probabilities(sig, measurement_pair(phi));
      err = std::max({err, std::abs(p.p_h - 0.5), std::abs(p.p_g - 0.5)});
    }
  });
  o.require(err <= 1e-12, fmt("max |P - 1/2| %.3g", err));
  if (o.pass) o.detail = fmt("without the mixer max |P - 1/2| = %.2e on 20x20 grid x 4 phases", err);
  return o;
}

Outcome desk_scale_imaging() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = 16;
  std::vector<double> t(n * n), g(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      t[r * n + c] = 0.1 + 0.9 * double((r * 7 + c * 3) % 16) / 15.0;
      g[r * n + c] = -pi + 2 * pi * double((r * 5 + c * 11) % 16 + 0.5) / 16.0;
    }
  const ImageMaps maps(n, n, t, g);

  const auto exact = image_scan(maps, ScanConfig{{0.0, pi / 2}, std::nullopt, kDefaultSeed, {}});
  double err = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& e = exact.pixels[i].estimate;
    err = std::max({err, std::abs(e.t_hat - t[i]), angle_error(e.gamma_hat, g[i])});
  }
  o.require(exact.error_count() == 0 && err <= 1e-12, fmt("analytic reconstruction error %.3g", err));

  const auto noisy = image_scan(maps, ScanConfig{uniform_phases(8), 10000, kDefaultSeed, {}});
  double sq = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) sq += std::pow(noisy.pixels[i].estimate.t_hat - t[i], 2);
  const double rmse = std::sqrt(sq / double(maps.size()));
  o.require(noisy.error_count() == 0 && rmse < 0.03, fmt("RMSE(t_hat) %.3g", rmse));

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 10.0, fmt("scan took %.3g s", secs));
  if (o.pass)
    o.detail = fmt("analytic err %.2e", err) + fmt(", RMSE(t_hat) %.4f", rmse) + fmt(", %.2f s", secs);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"detection law", detection_law},
      {"signal state equivalence", signal_state_equivalence},
      {"phase sweep and estimation", phase_sweep},
      {"object channel validity", object_channel_validity},
      {"Schmidt structure", schmidt_structure},
      {"Bell measurements", bell_measurements},
      {"Werner experiment", werner_experiment},
      {"which-path necessity", which_path_necessity},
      {"imaging at desk scale", desk_scale_imaging},
  };
  int failures = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s %d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", id - failures, id);
  return failures ? 1 : 0;
}
