#include "qimaging/scan.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include <omp.h>

namespace qimaging {

ImageMaps::ImageMaps(std::size_t width, std::size_t height, std::vector<double> t_map,
                     std::vector<double> gamma_map)
    : width_(width), height_(height), t_map_(std::move(t_map)), gamma_map_(std::move(gamma_map)) {
  if (width_ == 0 || height_ == 0) throw std::invalid_argument("ImageMaps: empty image");
  if (t_map_.size() != width_ * height_ || gamma_map_.size() != width_ * height_)
    throw std::invalid_argument("ImageMaps: T and gamma maps must both be width x height");
  for (double t : t_map_)
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("ImageMaps: T values must lie in [0, 1]");
  for (double g : gamma_map_)
    if (!std::isfinite(g)) throw std::invalid_argument("ImageMaps: gamma values must be finite");
}

std::size_t ImageEstimate::error_count() const {
  std::size_t n = 0;
  for (const auto& p : pixels) n += p.ok() ? 0 : 1;
  return n;
}

std::vector<double> uniform_phases(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return out;
}

namespace {

// Read-only state shared by all pixels of one scan.
struct ScanContext {
  ProbeState probe;
  ModeMixer mixer;
  std::vector<MeasurementPair> measurements;
  EstimationMethod method;
};

ScanContext make_context(const ScanConfig& cfg) {
  if (cfg.phi_sweep.empty()) throw std::invalid_argument("image_scan: empty phase sweep");
  if (cfg.shots && *cfg.shots == 0) throw std::invalid_argument("image_scan: shots must be positive");
  ScanContext ctx{prepare_probe(), mode_mixer(), {}, EstimationMethod::least_squares};
  for (double phi : cfg.phi_sweep) ctx.measurements.push_back(measurement_pair(phi));
  ctx.method = cfg.method.value_or(cfg.phi_sweep.size() == 2 ? EstimationMethod::two_point
                                                            : EstimationMethod::least_squares);
  return ctx;
}

PixelResult estimate_pixel(const ImageMaps& maps, std::size_t idx, const ScanContext& ctx, const ScanConfig& cfg) {
  PixelResult out;
  try {
    const ObjectParams obj(maps.t(idx), maps.gamma(idx));
    const SignalState sig = run_pipeline(ctx.probe, obj, ctx.mixer);
    const std::uint64_t pixel_seed = derive_seed(cfg.seed, idx);
    std::vector<PhaseSample> samples;
    samples.reserve(ctx.measurements.size());
    for (std::size_t k = 0; k < ctx.measurements.size(); ++k) {
      double p_h = detection_probabilities(sig, ctx.measurements[k]).p_h;
      if (cfg.shots) {
        const auto counts = sample_detections(p_h, *cfg.shots, derive_seed(pixel_seed, k));
        p_h = static_cast<double>(counts.n_h) / static_cast<double>(*cfg.shots);
      }
      samples.push_back({ctx.measurements[k].phi, p_h});
    }
    out.estimate = estimate_object(samples, ctx.method, cfg.shots);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

ImageEstimate empty_result(const ImageMaps& maps) {
  ImageEstimate res;
  res.width = maps.width();
  res.height = maps.height();
  res.pixels.resize(maps.size());
  return res;
}

// Fills the phase rows of one (T, gamma) point, starting at row `first`.
void grid_point(const ProbeState& probe, const ModeMixer& mixer, const std::vector<MeasurementPair>& mps, double t,
                double gamma, std::size_t first, std::optional<std::uint64_t> shots, std::uint64_t seed,
                std::vector<ProbabilityRow>& rows) {
  const SignalState sig = run_pipeline(probe, ObjectParams(t, gamma), mixer);
  for (std::size_t k = 0; k < mps.size(); ++k) {
    auto p = detection_probabilities(sig, mps[k]);
    if (shots) {
      std::mt19937_64 rng(derive_seed(seed, first + k));
      const auto c = sample_detections(p.p_h, probe.kind == ProbeKind::bell ? 1.0 - p.p_h : p.p_g, *shots, rng);
      p.p_h = static_cast<double>(c.n_h) / static_cast<double>(*shots);
      p.p_g = static_cast<double>(c.n_g) / static_cast<double>(*shots);
    }
    rows[first + k] = {t, gamma, mps[k].phi, p.p_h, p.p_g};
  }
}

struct GridSetup {
  ModeMixer mixer;
  std::vector<MeasurementPair> mps;
};

GridSetup grid_setup(const std::vector<double>& ts, const std::vector<double>& gammas,
                     const std::vector<double>& phis, std::optional<std::uint64_t> shots) {
  if (ts.empty() || gammas.empty() || phis.empty()) throw std::invalid_argument("probability_grid: empty axis");
  if (shots && *shots == 0) throw std::invalid_argument("probability_grid: shots must be positive");
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("probability_grid: T values must lie in [0, 1]");
  for (double g : gammas)
    if (!std::isfinite(g)) throw std::invalid_argument("probability_grid: gamma values must be finite");
  for (double phi : phis)
    if (!std::isfinite(phi)) throw std::invalid_argument("probability_grid: phase values must be finite");
  GridSetup s{mode_mixer(), {}};
  for (double phi : phis) s.mps.push_back(measurement_pair(phi));
  return s;
}

}  // namespace

ImageEstimate image_scan(const ImageMaps& maps, const ScanConfig& cfg) {
  const ScanContext ctx = make_context(cfg);
  ImageEstimate res = empty_result(maps);
  const auto n = static_cast<std::int64_t>(maps.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    res.pixels[idx] = estimate_pixel(maps, idx, ctx, cfg);
  }
  return res;
}

ImageEstimate image_scan_serial(const ImageMaps& maps, const ScanConfig& cfg) {
  const ScanContext ctx = make_context(cfg);
  ImageEstimate res = empty_result(maps);
  for (std::size_t idx = 0; idx < maps.size(); ++idx) res.pixels[idx] = estimate_pixel(maps, idx, ctx, cfg);
  return res;
}

std::vector<ProbabilityRow> probability_grid(const ProbeState& probe, const std::vector<double>& ts,
                                             const std::vector<double>& gammas,
                                             const std::vector<double>& phis,
                                             std::optional<std::uint64_t> shots, std::uint64_t seed) {
  const GridSetup setup = grid_setup(ts, gammas, phis, shots);
  const std::size_t np = phis.size(), ng = gammas.size();
  std::vector<ProbabilityRow> rows(ts.size() * ng * np);
  const auto n = static_cast<std::int64_t>(ts.size() * ng);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto point = static_cast<std::size_t>(i);
    grid_point(probe, setup.mixer, setup.mps, ts[point / ng], gammas[point % ng], point * np, shots, seed, rows);
  }
  return rows;
}

std::vector<ProbabilityRow> probability_grid_serial(const ProbeState& probe, const std::vector<double>& ts,
                                                    const std::vector<double>& gammas,
                                                    const std::vector<double>& phis,
                                                    std::optional<std::uint64_t> shots, std::uint64_t seed) {
  const GridSetup setup = grid_setup(ts, gammas, phis, shots);
  std::vector<ProbabilityRow> rows(ts.size() * gammas.size() * phis.size());
  std::size_t first = 0;
  for (double t : ts)
    for (double g : gammas) {
      grid_point(probe, setup.mixer, setup.mps, t, g, first, shots, seed, rows);
      first += phis.size();
    }
  return rows;
}

void configure_threads_from_env() {
  if (const char* env = std::getenv("QIMAGING_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) omp_set_num_threads(static_cast<int>(n));
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace qimaging
