#pragma once

// Data-parallel drivers. Every pixel / grid point runs the full pipeline
// independently, so the OpenMP kernels and their serial references produce
// identical results for the same seed; results are stored by index, never by
// completion order.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qimaging/circuit.hpp"
#include "qimaging/tomography.hpp"

namespace qimaging {

inline constexpr std::uint64_t kDefaultSeed = 271828;

/// Per-pixel transmission amplitude and phase, row-major.
class ImageMaps {
 public:
  ImageMaps(std::size_t width, std::size_t height, std::vector<double> t_map,
            std::vector<double> gamma_map);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return t_map_.size(); }
  double t(std::size_t idx) const { return t_map_[idx]; }
  double gamma(std::size_t idx) const { return gamma_map_[idx]; }
  const std::vector<double>& t_map() const { return t_map_; }
  const std::vector<double>& gamma_map() const { return gamma_map_; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> t_map_;
  std::vector<double> gamma_map_;
};

struct ScanConfig {
  std::vector<double> phi_sweep;
  std::optional<std::uint64_t> shots;  // unset: exact probabilities
  std::uint64_t seed = kDefaultSeed;
  /// Defaults to two_point for a two-value sweep, least_squares otherwise.
  std::optional<EstimationMethod> method;
};

struct PixelResult {
  ObjectEstimate estimate;
  std::string error;  // empty on success
  bool ok() const { return error.empty(); }
};

struct ImageEstimate {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<PixelResult> pixels;  // row-major

  const PixelResult& at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
  std::size_t error_count() const;
};

/// `n` phases evenly spaced over [0, 2 pi).
std::vector<double> uniform_phases(std::size_t n);

ImageEstimate image_scan(const ImageMaps& maps, const ScanConfig& cfg);
ImageEstimate image_scan_serial(const ImageMaps& maps, const ScanConfig& cfg);

struct ProbabilityRow {
  double t = 0.0;
  double gamma = 0.0;
  double phi = 0.0;
  double p_h = 0.0;
  double p_g = 0.0;
};

/// Detection probabilities over the product grid T x gamma x phi (rows in
/// that nesting order). With `shots`, rows hold sampled frequencies.
std::vector<ProbabilityRow> probability_grid(const ProbeState& probe, const std::vector<double>& ts,
                                             const std::vector<double>& gammas,
                                             const std::vector<double>& phis,
                                             std::optional<std::uint64_t> shots, std::uint64_t seed);
std::vector<ProbabilityRow> probability_grid_serial(const ProbeState& probe, const std::vector<double>& ts,
                                                    const std::vector<double>& gammas,
                                                    const std::vector<double>& phis,
                                                    std::optional<std::uint64_t> shots, std::uint64_t seed);

/// Applies QIMAGING_THREADS (if set and positive) to the OpenMP runtime.
void configure_threads_from_env();
int max_threads();

}  // namespace qimaging
