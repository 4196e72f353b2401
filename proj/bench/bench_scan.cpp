// Serial reference vs OpenMP kernel for the image scan and the probability grid.
// Usage: bench_scan [image side] [shots]; thread count from QIMAGING_THREADS.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "qimaging/scan.hpp"

using namespace qimaging;

namespace {

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool same(const ImageEstimate& a, const ImageEstimate& b) {
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    if (a.pixels[i].estimate.t_hat != b.pixels[i].estimate.t_hat) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
  const std::uint64_t shots = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 10000;
  configure_threads_from_env();

  std::vector<double> t(n * n), g(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    const bool dark = ((i / n) / 4 + (i % n) / 4) % 2;
    t[i] = dark ? 0.3 : 0.9;
    g[i] = dark ? -1.2 : 0.8;
  }
  const ImageMaps maps(n, n, t, g);
  const ScanConfig cfg{uniform_phases(8), shots, kDefaultSeed, {}};

  ImageEstimate serial, parallel;
  const double ts = best_of(3, [&] { serial = image_scan_serial(maps, cfg); });
  const double tp = best_of(3, [&] { parallel = image_scan(maps, cfg); });
  std::printf("image %zux%zu, 8 phases, %llu shots, %d threads\n", n, n, static_cast<unsigned long long>(shots),
              max_threads());
  std::printf("  serial   %8.3f s\n  parallel %8.3f s  speedup %.2fx  identical %s\n", ts, tp, ts / tp,
              same(serial, parallel) ? "yes" : "NO");

  std::vector<double> ts_axis, gs_axis;
  for (int k = 0; k < 40; ++k) ts_axis.push_back(k / 39.0);
  for (int k = 0; k < 40; ++k) gs_axis.push_back(-std::numbers::pi + 2 * std::numbers::pi * (k + 1) / 40);
  const auto phis = uniform_phases(24);
  const auto probe = prepare_werner(0.3);
  std::vector<ProbabilityRow> rs, rp;
  const double gs = best_of(3, [&] { rs = probability_grid_serial(probe, ts_axis, gs_axis, phis, shots, 1); });
  const double gp = best_of(3, [&] { rp = probability_grid(probe, ts_axis, gs_axis, phis, shots, 1); });
  bool grid_same = rs.size() == rp.size();
  for (std::size_t i = 0; grid_same && i < rs.size(); ++i) grid_same = rs[i].p_h == rp[i].p_h && rs[i].p_g == rp[i].p_g;
  std::printf("probability grid %zu rows\n  serial   %8.3f s\n  parallel %8.3f s  speedup %.2fx  identical %s\n",
              rs.size(), gs, gp, gs / gp, grid_same ? "yes" : "NO");
  return same(serial, parallel) && grid_same ? 0 : 1;
}
