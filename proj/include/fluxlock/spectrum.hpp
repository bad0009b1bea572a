#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxlock/circuit_model.hpp"
#include "fluxlock/flux_geometry.hpp"

namespace fluxlock {

// Batch kernels come in two flavours: a plain serial loop kept as the
// reference implementation, and an OpenMP version.  Results are required to
// be bit-identical (each point writes into a preallocated slot).
enum class ExecutionPolicy { serial, parallel };

// One eigenlevel solve per total-flux value.
std::vector<SpectralResult> eigenlevels_batch(
    const EnergyParams& params, std::span<const double> phi_tot_phi0,
    const EigenOptions& opts = {},
    ExecutionPolicy policy = ExecutionPolicy::parallel);

struct Transition {
  int lower = 0;
  int upper = 1;
};

struct LinePoint {
  double b_ut = 0.0;
  double freq_ghz = 0.0;
  bool converged = false;
};

struct LineOptions {
  double tolerance = 1e-9;
  ExecutionPolicy policy = ExecutionPolicy::parallel;
};

// Transition frequency versus applied uniform field for one lock state.
std::vector<LinePoint> line(const EnergyParams& params,
                            const GradiometerGeometry& geom, LockState lock,
                            Transition transition,
                            std::span<const double> field_grid_ut,
                            const LineOptions& opts = {});

// Families mirror what shows up in two-tone spectroscopy: the direct 0-j
// lines, their n-photon subharmonics, resonator-mediated sidebands and the
// readout tone itself.
enum class SidebandMode { difference, sum, both };

struct FamilyOptions : LineOptions {
  int max_upper_level = 2;
  std::vector<int> multiphoton_orders = {2, 3};
  SidebandMode sideband = SidebandMode::difference;
  bool include_readout = true;
};

struct FamilyCurve {
  std::string family;      // "main", "multiphoton", "resonator", "readout"
  std::string transition;  // e.g. "0-1", "0-2/2", "res-0-1"
  std::vector<LinePoint> points;
};

std::vector<FamilyCurve> line_families(const EnergyParams& params,
                                       const GradiometerGeometry& geom,
                                       LockState lock,
                                       std::span<const double> field_grid_ut,
                                       std::optional<double> f_resonator_ghz,
                                       const FamilyOptions& opts = {});

struct DispersionResult {
  double value_ghz_per_phi0 = 0.0;
  double richardson_delta = 0.0;  // |coarse - fine| step consistency check
};

// d f01 / d phi_tot by central differences with one Richardson refinement.
DispersionResult flux_dispersion(const EnergyParams& params, PhaseBias bias,
                                 double step_phi0 = 1e-5);

struct SweetSpotResult {
  double b_ut = 0.0;
  double phi_eff_target_phi0 = 0.0;
  double phi_tot_target_phi0 = 0.0;
  bool field_insensitive = false;  // A_eff = 0: every field is a sweet spot
};

// Field that parks the total flux on the nearest extremum of the spectrum:
// half-integer for odd m, integer for even m.
SweetSpotResult sweet_spot_field(const GradiometerGeometry& geom,
                                 LockState lock);

}  // namespace fluxlock
