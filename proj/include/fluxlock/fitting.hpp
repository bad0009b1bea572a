#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxlock/circuit_model.hpp"
#include "fluxlock/flux_geometry.hpp"
#include "fluxlock/spectrum.hpp"

namespace fluxlock {

// One spectroscopy point.  The trapped-fluxon number m is data, not a fit
// parameter: it is pinned per cooldown before fitting.
struct SpectroRecord {
  double b_ut = 0.0;
  double freq_ghz = 0.0;
  double sigma_ghz = 0.0;
  int m = 0;
  std::string transition = "0-1";  // "0-j", "0-j/n" or "res-0-j"
  std::string cooldown;
};

struct SpectroscopyDataset {
  std::vector<SpectroRecord> records;

  void validate() const;  // throws Error{malformed_input}
  bool has_parity(bool odd) const;
};

// Joint fit parameters, in this fixed order (covariance rows/columns match):
// E_J, E_C, E_L [GHz], A_eff [um^2], alpha.
struct FitParams {
  double e_j_ghz = 0.0;
  double e_c_ghz = 0.0;
  double e_l_ghz = 0.0;
  double a_eff_um2 = 0.0;
  double alpha = 0.0;

  static constexpr int kCount = 5;
  static const std::array<const char*, kCount>& names();
  std::array<double, kCount> to_array() const;
  static FitParams from_array(const std::array<double, kCount>& a);

  EnergyParams energies() const { return {e_j_ghz, e_c_ghz, e_l_ghz}; }
};

struct FitResult {
  FitParams estimates;
  FitParams sigmas;
  Eigen::Matrix<double, 5, 5> covariance;
  double chi2 = 0.0;
  int n_points = 0;
  int iterations = 0;
  bool converged = false;
  bool at_bound = false;
  std::vector<double> residuals;    // weighted, same order as dataset
  std::vector<double> chi2_trace;   // seed chi2 first, then per accepted step
  int eigen_dim = 0;                // fixed basis size used by the evaluator
};

struct FitConfig {
  int max_iterations = 200;
  double eigen_tolerance = 1e-10;
  double jacobian_rel_step = 1e-6;
  std::optional<double> f_resonator_ghz;  // needed for "res-0-j" records
  SidebandMode sideband = SidebandMode::difference;
};

// Weighted Levenberg-Marquardt over all cooldowns at once.  Non-convergence
// is reported via converged=false (with the chi2 trace), not an exception.
FitResult fit_spectrum(const SpectroscopyDataset& data, const FitParams& seed,
                       const FitConfig& config = {});

// Deterministic starting point built from the locked extrema of the data:
// plasma-frequency reading of the 0-locked maximum, half-flux splitting and
// curvature of the pi-locked branch.  partial=true when one parity is missing
// and defaults had to fill in.
struct SeedResult {
  FitParams params;
  bool partial = false;
  std::string note;
};

SeedResult initial_guess(const SpectroscopyDataset& data);

// Lorentzian line pull-out for single traces: c + A*(g/2)^2/((f-f0)^2+(g/2)^2).
struct LorentzianFit {
  double center_ghz = 0.0;
  double center_sigma_ghz = 0.0;
  double fwhm_ghz = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
};

LorentzianFit fit_lorentzian(std::span<const double> freq_ghz,
                             std::span<const double> response);

// Synthetic dataset generator for round-trip and coverage tests.  Fully
// deterministic for a given seed (own Box-Muller, no library distributions).
struct SynthOptions {
  double noise_sigma_ghz = 0.0;       // also used as the recorded sigma
  double recorded_sigma_ghz = 1e-3;   // sigma column when noise is zero
  std::vector<std::string> transitions = {"0-1"};
  std::optional<double> f_resonator_ghz;
  SidebandMode sideband = SidebandMode::difference;
  double eigen_tolerance = 1e-10;
};

SpectroscopyDataset synth_dataset(const EnergyParams& params,
                                  const GradiometerGeometry& geom,
                                  std::span<const LockState> locks,
                                  std::span<const double> field_grid_ut,
                                  std::uint64_t seed,
                                  const SynthOptions& opts = {});

}  // namespace fluxlock
