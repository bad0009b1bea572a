#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fluxlock {

// Circuit energies in GHz (E/h).  e_j_ghz may be zero (pure harmonic
// oscillator); the other two must be strictly positive.
struct EnergyParams {
  double e_j_ghz = 0.0;
  double e_c_ghz = 0.0;
  double e_l_ghz = 0.0;

  void validate() const;  // throws Error{invalid_parameters}

  // sqrt(8*E_C*E_L), the inductive plasma frequency.
  double plasma_frequency_ghz() const;
  // Zero-point phase spread: phi = phi_zpf*(a + a^dag)/sqrt(2).
  double phi_zpf() const;
};

// External flux bias through the loop, in flux quanta.  delta_rad() is the
// phase offset 2*pi*phi_tot that enters the inductive term.
struct PhaseBias {
  double phi_tot_phi0 = 0.0;

  double delta_rad() const;
};

struct EigenOptions {
  double tolerance = 1e-9;  // relative f01 change between dim and dim/2
  int n_levels = 3;
  int start_dim = 40;
  int max_dim = 2048;
  bool absolute_levels = false;  // default: levels relative to ground
};

// Levels in GHz, ascending.  When absolute_levels is false levels[0] == 0.
// converged=false means max_dim was hit before the tolerance was met; the
// best available levels are still populated so callers can inspect them.
struct SpectralResult {
  std::vector<double> levels_ghz;
  int dim_used = 0;
  bool converged = false;
  double residual = 0.0;  // last relative f01 change seen

  double transition_ghz(int lower, int upper) const;
};

// Dense Hamiltonian in the harmonic-oscillator number basis, in GHz.
// Exactly symmetric; the cosine term is built from the spectral decomposition
// of the truncated phase operator.
Eigen::MatrixXd build_hamiltonian(const EnergyParams& params, PhaseBias bias,
                                  int dim);

// Lowest levels with automatic basis-size doubling until the 0-1 splitting is
// stable to opts.tolerance (relative).
SpectralResult eigenlevels(const EnergyParams& params, PhaseBias bias,
                           const EigenOptions& opts = {});

// Same spectrum at a caller-chosen fixed basis size, no convergence loop.
// Used by batch/fit paths that have already probed a sufficient dim.
std::vector<double> eigenlevels_fixed(const EnergyParams& params,
                                      PhaseBias bias, int dim, int n_levels,
                                      bool absolute_levels = false);

// Unit conversions between fabrication quantities and circuit energies.
// Each pair round-trips to full double precision.
double capacitance_ff_to_ec_ghz(double c_ff);
double ec_ghz_to_capacitance_ff(double ec_ghz);
double inductance_nh_to_el_ghz(double l_nh);
double el_ghz_to_inductance_nh(double el_ghz);
double inductance_nh_to_squares(double l_nh, double sheet_inductance_nh);
double squares_to_inductance_nh(double squares, double sheet_inductance_nh);

}  // namespace fluxlock
