#pragma once

#include "fluxlock/circuit_model.hpp"

namespace fluxlock {

// Real-space discretisation used as an independent cross-check of the
// oscillator-basis solver: 4th-order finite differences on a uniform phase
// grid with hard-wall boundaries, solved with a banded LAPACK eigensolver.
struct PhaseGrid {
  double phi_max_rad = 0.0;  // grid spans [-phi_max, +phi_max]
  int n_points = 1501;       // odd, >= 501
};

struct PhaseGridOptions {
  int n_levels = 3;
  double boundary_mass_tol = 1e-8;
  bool absolute_levels = false;
};

// Window wide enough that the inductive potential at the walls clears the
// highest requested level by a comfortable margin.
PhaseGrid default_phase_grid(const EnergyParams& params, PhaseBias bias,
                             int n_levels = 3, int n_points = 1501);

// Lowest levels in GHz.  Throws Error{grid_too_small} when the ground or any
// requested state leaks probability mass > boundary_mass_tol onto the walls.
std::vector<double> phase_grid_levels(const EnergyParams& params,
                                      PhaseBias bias, const PhaseGrid& grid,
                                      const PhaseGridOptions& opts = {});

}  // namespace fluxlock
