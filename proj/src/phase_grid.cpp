#include "fluxlock/phase_grid.hpp"

#include <cmath>
#include <vector>

#include <lapacke.h>

#include "fluxlock/errors.hpp"

namespace fluxlock {

PhaseGrid default_phase_grid(const EnergyParams& params, PhaseBias bias,
                             int n_levels, int n_points) {
  params.validate();
  // Highest absolute level is below fp*(n+2.5) + 2*E_J for these potentials;
  // demand the wall potential clears it by 20*E_L on top of that.
  double fp = params.plasma_frequency_ghz();
  double e_high = fp * (n_levels + 2.5) + 2.0 * params.e_j_ghz;
  double reach =
      std::sqrt(2.0 * (e_high + 20.0 * params.e_l_ghz + 2.0 * params.e_j_ghz) /
                params.e_l_ghz);
  return {std::abs(bias.delta_rad()) + reach, n_points};
}

std::vector<double> phase_grid_levels(const EnergyParams& params,
                                      PhaseBias bias, const PhaseGrid& grid,
                                      const PhaseGridOptions& opts) {
  params.validate();
  if (!std::isfinite(bias.phi_tot_phi0)) {
    throw Error(ErrorCode::invalid_parameters, "flux bias must be finite");
  }
  if (grid.n_points < 501 || grid.n_points % 2 == 0) {
    throw Error(ErrorCode::invalid_dimension,
                "phase grid needs an odd point count >= 501");
  }
  if (!(grid.phi_max_rad > 0.0) || !std::isfinite(grid.phi_max_rad)) {
    throw Error(ErrorCode::invalid_value, "phi_max must be positive");
  }
  if (opts.n_levels < 1) {
    throw Error(ErrorCode::invalid_value, "n_levels must be >= 1");
  }

  const int n = grid.n_points;
  const int n_levels = std::min(opts.n_levels, n);
  const double h = 2.0 * grid.phi_max_rad / (n - 1);
  const double delta = bias.delta_rad();
  const double kin = 4.0 * params.e_c_ghz / (12.0 * h * h);

  // 4th-order central difference for -d^2/dphi^2, pentadiagonal symmetric.
  // Lower-band column-major storage for dsbevx: ab[(i-j) + j*ldab].
  const int kd = 2;
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<size_t>(ldab) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double phi = -grid.phi_max_rad + j * h;
    double v = 0.5 * params.e_l_ghz * (phi + delta) * (phi + delta) -
               params.e_j_ghz * std::cos(phi);
    ab[0 + static_cast<size_t>(j) * ldab] = 30.0 * kin + v;
    if (j + 1 < n) ab[1 + static_cast<size_t>(j) * ldab] = -16.0 * kin;
    if (j + 2 < n) ab[2 + static_cast<size_t>(j) * ldab] = kin;
  }

  std::vector<double> w(n), z(static_cast<size_t>(n) * n_levels);
  std::vector<double> q(static_cast<size_t>(n) * n);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, kd, ab.data(), ldab, q.data(), n,
      0.0, 0.0, 1, n_levels, abstol, &found, w.data(), z.data(), n,
      ifail.data());
  if (info != 0 || found < n_levels) {
    throw Error(ErrorCode::no_convergence, "banded eigensolver failed");
  }

  // Hard walls are only valid if no requested state touches them.
  double boundary_mass = 0.0;
  for (int k = 0; k < n_levels; ++k) {
    double lo = z[static_cast<size_t>(k) * n];
    double hi = z[static_cast<size_t>(k) * n + n - 1];
    boundary_mass += lo * lo + hi * hi;
  }
  if (boundary_mass > opts.boundary_mass_tol) {
    throw Error(ErrorCode::grid_too_small,
                "wavefunction mass at the grid boundary; enlarge phi_max");
  }

  std::vector<double> levels(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    levels[k] = w[k] - (opts.absolute_levels ? 0.0 : w[0]);
  }
  return levels;
}

}  // namespace fluxlock
