#pragma once

#include <vector>

namespace fluxlock {

struct DecaySample {
  double time_us = 0.0;
  double population = 0.0;
};

struct DecayTrace {
  std::vector<DecaySample> samples;

  void validate() const;  // throws Error{malformed_input}
};

// Energy relaxation: a*exp(-t/T1) + c.
struct T1Fit {
  double t1_us = 0.0;
  double t1_sigma_us = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double reduced_chi2 = 0.0;
  bool model_mismatch = false;
};

T1Fit fit_t1(const DecayTrace& trace);

// Echo decay: a*exp(-gamma0*t) at the sweet spot, and
// a*exp(-gamma0*t - (gamma_phi*t)^2) when first-order dephasing is present.
struct DecayRates {
  double gamma0_per_us = 0.0;
  double gamma_phi_per_us = 0.0;
  double gamma0_sigma = 0.0;
  double gamma_phi_sigma = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double reduced_chi2 = 0.0;
  bool model_mismatch = false;  // reduced chi2 > 2 against the noise estimate
};

DecayRates fit_echo(const DecayTrace& trace, bool at_sweet_spot);

// 1/e time of exp(-gamma0*t - (gamma_phi*t)^2):
// (sqrt(gamma0^2 + 4*gamma_phi^2) - gamma0) / (2*gamma_phi^2), with the
// gamma_phi -> 0 limit handled exactly.  Throws Error{undefined_t2e} when
// both rates vanish.
double t2e_combined_us(double gamma0_per_us, double gamma_phi_per_us);

// Percentage loss relative to the sweet-spot value: 100*(1 - at/sweet).
double degradation_pct(double t2e_at_us, double t2e_sweet_us);

}  // namespace fluxlock
