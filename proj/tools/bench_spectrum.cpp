// Compares the serial reference batch kernel against the OpenMP one on a
// representative spectral-line workload and checks the outputs are
// bit-identical.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fluxlock/circuit_model.hpp"
#include "fluxlock/spectrum.hpp"

using namespace fluxlock;

namespace {

double run_batch(const EnergyParams& params, const std::vector<double>& phi,
                 ExecutionPolicy policy, int reps,
                 std::vector<SpectralResult>& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    out = eigenlevels_batch(params, phi, {}, policy);
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n_points = 96;
  int reps = 3;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--points") == 0) n_points = std::atoi(argv[i + 1]);
    if (std::strcmp(argv[i], "--reps") == 0) reps = std::atoi(argv[i + 1]);
  }

  EnergyParams params{9.21, 3.97, 1.95};
  std::vector<double> phi(n_points);
  for (int i = 0; i < n_points; ++i) {
    phi[i] = -0.6 + 1.2 * static_cast<double>(i) / (n_points - 1);
  }

#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  std::printf("spectral batch: %d flux points, best of %d reps, %d thread(s)\n",
              n_points, reps, threads);

  std::vector<SpectralResult> serial_out, parallel_out;
  // warm the cached ladder bases so neither branch pays first-touch costs
  (void)eigenlevels(params, {0.31}, {});

  double t_serial =
      run_batch(params, phi, ExecutionPolicy::serial, reps, serial_out);
  double t_parallel =
      run_batch(params, phi, ExecutionPolicy::parallel, reps, parallel_out);

  bool identical = serial_out.size() == parallel_out.size();
  for (size_t i = 0; identical && i < serial_out.size(); ++i) {
    identical = serial_out[i].dim_used == parallel_out[i].dim_used &&
                serial_out[i].levels_ghz == parallel_out[i].levels_ghz;
  }

  std::printf("  serial   : %8.3f ms  (%.3f ms/point)\n", 1e3 * t_serial,
              1e3 * t_serial / n_points);
  std::printf("  parallel : %8.3f ms  (%.3f ms/point)\n", 1e3 * t_parallel,
              1e3 * t_parallel / n_points);
  std::printf("  speedup  : %.2fx\n", t_serial / t_parallel);
  std::printf("  outputs  : %s\n",
              identical ? "bit-identical" : "MISMATCH (bug!)");
  return identical ? 0 : 1;
}
