#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxlock/circuit_model.hpp"

namespace fluxlock {

// Twin-loop gradiometer: two loops of areas A' (left) and A'' (right) share a
// central inductance trace.  alpha = (L'' - L')/(L'' + L') is the inductive
// imbalance of the two arms; |alpha| < 1.
struct GradiometerGeometry {
  double area_left_um2 = 0.0;
  double area_right_um2 = 0.0;
  double ring_area_um2 = 0.0;
  double alpha = 0.0;
  std::optional<double> width_asym_um;  // design knob x, informational

  static GradiometerGeometry from_inductances(double area_left_um2,
                                              double area_right_um2,
                                              double ring_area_um2,
                                              double l_left_ph,
                                              double l_right_ph);

  void validate() const;  // throws Error{invalid_parameters}

  double area_delta_um2() const { return area_left_um2 - area_right_um2; }
  double area_sum_um2() const { return area_left_um2 + area_right_um2; }
};

// Out-of-plane field over each loop, microtesla.  b_cooldown_ut is the field
// that was applied while crossing the superconducting transition; it sets the
// trapped-fluxon number, not the operating flux.
struct FieldBias {
  double b_left_ut = 0.0;
  double b_right_ut = 0.0;

  static FieldBias uniform(double b_ut) { return {b_ut, b_ut}; }
};

// Number of flux quanta trapped in the central ring during cooldown.  Odd m
// shifts the qubit by half a flux quantum per loop ("pi-locked"); even m
// leaves it near zero ("0-locked").
struct LockState {
  int m = 0;

  bool pi_locked() const;
  const char* parity_name() const;  // "pi" or "zero"
};

// Gradiometric flux in flux quanta: the differential pickup of the two loops
// plus the imbalance-weighted common mode.
double effective_flux_phi0(const GradiometerGeometry& geom,
                           const FieldBias& field);

// Net pickup area for a uniform field: dA/2 + (alpha/2)(A' + A'').
double effective_area_um2(const GradiometerGeometry& geom);

// Rounds the cooldown ring flux to the nearest integer.  Throws
// Error{ambiguous_cooldown_flux} when the flux is within ambiguity_tol_phi0
// of a half-integer boundary, where the trapped number is not reproducible.
LockState trapped_fluxons(double b_cooldown_ut, const GradiometerGeometry& geom,
                          double ambiguity_tol_phi0 = 1e-3);

// Total flux seen by the junction: phi_eff + m(1+alpha)/2.
PhaseBias total_flux(double phi_eff_phi0, LockState lock, double alpha);

// Offset of the zero-field bias point from the nearest (half-)integer of
// total flux, as it appears on the effective-flux axis: sgn(A_eff)*m*alpha/2
// with sgn(0) taken as +1.
double residual_offset_phi0(LockState lock, double alpha, double a_eff_um2);

// Affine layout model: how the inductive and area asymmetries respond to the
// trace-width asymmetry x = (w' - w'')/2 in microns.
struct DesignCoefficients {
  double dl_slope_ph_per_um = -120.0;
  double dl_intercept_ph = -8.5;
  double da_half_slope_um2_per_um = 92.7;
  double da_half_intercept_um2 = 8.9;
  double alpha_slope_pct_per_um = -4.4;
  double alpha_intercept_pct = -0.31;
  double aeff_slope_um2_per_um = 23.6;
  double aeff_intercept_um2 = 4.0;
};

struct DesignPoint {
  double x_um = 0.0;
  double delta_l_ph = 0.0;
  double delta_a_half_um2 = 0.0;
  double alpha_pct = 0.0;
  double a_eff_um2 = 0.0;
};

DesignPoint design_model(double x_um, const DesignCoefficients& coeffs = {});

enum class DesignTarget { alpha_zero, aeff_zero, da_half_zero };

// Width asymmetry that nulls the chosen quantity.  Throws
// Error{unsolvable_target} when the corresponding slope vanishes.
double design_solve(DesignTarget target, const DesignCoefficients& coeffs = {});

// The two interesting zero crossings never coincide: alpha = 0 and
// A_eff = 0 sit at different x, which is why both cannot be nulled at once.
struct DesignCrossings {
  double alpha_zero_x_um = 0.0;
  double aeff_zero_x_um = 0.0;
  double da_half_zero_x_um = 0.0;
  double alpha_vs_aeff_gap_um = 0.0;
};

DesignCrossings design_crossings(const DesignCoefficients& coeffs = {});

// One shared cooldown field applied to many devices at once.
struct LockOutcome {
  std::optional<LockState> lock;  // empty when the device flux was ambiguous
  std::string error;
};

struct MultiLockResult {
  std::vector<LockOutcome> devices;
  int n_zero_locked = 0;
  int n_pi_locked = 0;
  int n_ambiguous = 0;
};

MultiLockResult multi_qubit_lock(double b_cooldown_ut,
                                 std::span<const GradiometerGeometry> devices,
                                 double ambiguity_tol_phi0 = 1e-3);

}  // namespace fluxlock
