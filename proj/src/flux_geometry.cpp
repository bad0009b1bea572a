#include "fluxlock/flux_geometry.hpp"

#include <cmath>

#include "fluxlock/constants.hpp"
#include "fluxlock/errors.hpp"

namespace fluxlock {

GradiometerGeometry GradiometerGeometry::from_inductances(
    double area_left_um2, double area_right_um2, double ring_area_um2,
    double l_left_ph, double l_right_ph) {
  if (!std::isfinite(l_left_ph) || !std::isfinite(l_right_ph) ||
      l_left_ph <= 0.0 || l_right_ph <= 0.0) {
    throw Error(ErrorCode::invalid_parameters,
                "arm inductances must be positive");
  }
  GradiometerGeometry g;
  g.area_left_um2 = area_left_um2;
  g.area_right_um2 = area_right_um2;
  g.ring_area_um2 = ring_area_um2;
  g.alpha = (l_right_ph - l_left_ph) / (l_right_ph + l_left_ph);
  g.validate();
  return g;
}

void GradiometerGeometry::validate() const {
  bool finite = std::isfinite(area_left_um2) && std::isfinite(area_right_um2) &&
                std::isfinite(ring_area_um2) && std::isfinite(alpha);
  if (!finite || area_left_um2 <= 0.0 || area_right_um2 <= 0.0 ||
      ring_area_um2 <= 0.0) {
    throw Error(ErrorCode::invalid_parameters, "loop areas must be positive");
  }
  if (std::abs(alpha) >= 1.0) {
    throw Error(ErrorCode::invalid_parameters, "|alpha| must be < 1");
  }
}

bool LockState::pi_locked() const { return std::abs(m) % 2 == 1; }

const char* LockState::parity_name() const {
  return pi_locked() ? "pi" : "zero";
}

double effective_flux_phi0(const GradiometerGeometry& geom,
                           const FieldBias& field) {
  geom.validate();
  if (!std::isfinite(field.b_left_ut) || !std::isfinite(field.b_right_ut)) {
    throw Error(ErrorCode::invalid_value, "fields must be finite");
  }
  double flux_left = field.b_left_ut * geom.area_left_um2;
  double flux_right = field.b_right_ut * geom.area_right_um2;
  double grad = 0.5 * (flux_left - flux_right);
  double common = 0.5 * geom.alpha * (flux_left + flux_right);
  return (grad + common) / kFluxQuantumUtUm2;
}

double effective_area_um2(const GradiometerGeometry& geom) {
  geom.validate();
  return 0.5 * geom.area_delta_um2() + 0.5 * geom.alpha * geom.area_sum_um2();
}

LockState trapped_fluxons(double b_cooldown_ut, const GradiometerGeometry& geom,
                          double ambiguity_tol_phi0) {
  geom.validate();
  if (!std::isfinite(b_cooldown_ut)) {
    throw Error(ErrorCode::invalid_value, "cooldown field must be finite");
  }
  double ring_flux = b_cooldown_ut * geom.ring_area_um2 / kFluxQuantumUtUm2;
  double frac = ring_flux - std::floor(ring_flux);
  if (std::abs(frac - 0.5) < ambiguity_tol_phi0) {
    throw Error(ErrorCode::ambiguous_cooldown_flux,
                "ring flux within tolerance of a half-integer; trapped "
                "fluxon number is not reproducible");
  }
  return {static_cast<int>(std::llround(ring_flux))};
}

PhaseBias total_flux(double phi_eff_phi0, LockState lock, double alpha) {
  if (!std::isfinite(phi_eff_phi0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::invalid_value, "flux inputs must be finite");
  }
  return {phi_eff_phi0 + lock.m * (1.0 + alpha) / 2.0};
}

double residual_offset_phi0(LockState lock, double alpha, double a_eff_um2) {
  double sgn = a_eff_um2 < 0.0 ? -1.0 : 1.0;  // sgn(0) := +1
  return sgn * lock.m * alpha / 2.0;
}

DesignPoint design_model(double x_um, const DesignCoefficients& coeffs) {
  if (!std::isfinite(x_um)) {
    throw Error(ErrorCode::invalid_value, "width asymmetry must be finite");
  }
  DesignPoint p;
  p.x_um = x_um;
  p.delta_l_ph = coeffs.dl_slope_ph_per_um * x_um + coeffs.dl_intercept_ph;
  p.delta_a_half_um2 =
      coeffs.da_half_slope_um2_per_um * x_um + coeffs.da_half_intercept_um2;
  p.alpha_pct = coeffs.alpha_slope_pct_per_um * x_um + coeffs.alpha_intercept_pct;
  p.a_eff_um2 = coeffs.aeff_slope_um2_per_um * x_um + coeffs.aeff_intercept_um2;
  return p;
}

double design_solve(DesignTarget target, const DesignCoefficients& coeffs) {
  double slope = 0.0, intercept = 0.0;
  switch (target) {
    case DesignTarget::alpha_zero:
      slope = coeffs.alpha_slope_pct_per_um;
      intercept = coeffs.alpha_intercept_pct;
      break;
    case DesignTarget::aeff_zero:
      slope = coeffs.aeff_slope_um2_per_um;
      intercept = coeffs.aeff_intercept_um2;
      break;
    case DesignTarget::da_half_zero:
      slope = coeffs.da_half_slope_um2_per_um;
      intercept = coeffs.da_half_intercept_um2;
      break;
  }
  if (slope == 0.0) {
    throw Error(ErrorCode::unsolvable_target,
                "target quantity does not depend on the width asymmetry");
  }
  return -intercept / slope;
}

DesignCrossings design_crossings(const DesignCoefficients& coeffs) {
  DesignCrossings c;
  c.alpha_zero_x_um = design_solve(DesignTarget::alpha_zero, coeffs);
  c.aeff_zero_x_um = design_solve(DesignTarget::aeff_zero, coeffs);
  c.da_half_zero_x_um = design_solve(DesignTarget::da_half_zero, coeffs);
  c.alpha_vs_aeff_gap_um = c.alpha_zero_x_um - c.aeff_zero_x_um;
  return c;
}

MultiLockResult multi_qubit_lock(double b_cooldown_ut,
                                 std::span<const GradiometerGeometry> devices,
                                 double ambiguity_tol_phi0) {
  MultiLockResult result;
  result.devices.reserve(devices.size());
  for (const auto& geom : devices) {
    LockOutcome out;
    try {
      LockState lock = trapped_fluxons(b_cooldown_ut, geom, ambiguity_tol_phi0);
      out.lock = lock;
      if (lock.pi_locked()) {
        ++result.n_pi_locked;
      } else {
        ++result.n_zero_locked;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ambiguous_cooldown_flux) throw;
      out.error = e.what();
      ++result.n_ambiguous;
    }
    result.devices.push_back(std::move(out));
  }
  return result;
}

}  // namespace fluxlock
