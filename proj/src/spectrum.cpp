#include "fluxlock/spectrum.hpp"

#include <cmath>
#include <exception>

#include "fluxlock/constants.hpp"
#include "fluxlock/errors.hpp"

namespace fluxlock {

std::vector<SpectralResult> eigenlevels_batch(
    const EnergyParams& params, std::span<const double> phi_tot_phi0,
    const EigenOptions& opts, ExecutionPolicy policy) {
  params.validate();
  if (phi_tot_phi0.empty()) {
    throw Error(ErrorCode::invalid_value, "empty flux grid");
  }
  for (double phi : phi_tot_phi0) {
    if (!std::isfinite(phi)) {
      throw Error(ErrorCode::invalid_parameters, "non-finite flux value");
    }
  }
  const int n = static_cast<int>(phi_tot_phi0.size());
  std::vector<SpectralResult> out(n);
  if (policy == ExecutionPolicy::serial) {
    for (int i = 0; i < n; ++i) {
      out[i] = eigenlevels(params, {phi_tot_phi0[i]}, opts);
    }
  } else {
    // Exceptions must not unwind through the parallel region; capture the
    // first one and rethrow after the loop joins.
    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        out[i] = eigenlevels(params, {phi_tot_phi0[i]}, opts);
      } catch (...) {
#pragma omp critical(fluxlock_batch_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return out;
}

std::vector<LinePoint> line(const EnergyParams& params,
                            const GradiometerGeometry& geom, LockState lock,
                            Transition transition,
                            std::span<const double> field_grid_ut,
                            const LineOptions& opts) {
  geom.validate();
  if (transition.lower < 0 || transition.upper <= transition.lower) {
    throw Error(ErrorCode::invalid_value, "bad transition indices");
  }
  std::vector<double> phi(field_grid_ut.size());
  for (size_t i = 0; i < field_grid_ut.size(); ++i) {
    double phi_eff =
        effective_flux_phi0(geom, FieldBias::uniform(field_grid_ut[i]));
    phi[i] = total_flux(phi_eff, lock, geom.alpha).phi_tot_phi0;
  }
  EigenOptions eopts;
  eopts.tolerance = opts.tolerance;
  eopts.n_levels = transition.upper + 1;
  std::vector<SpectralResult> solved =
      eigenlevels_batch(params, phi, eopts, opts.policy);

  std::vector<LinePoint> points(field_grid_ut.size());
  for (size_t i = 0; i < field_grid_ut.size(); ++i) {
    points[i].b_ut = field_grid_ut[i];
    points[i].freq_ghz =
        solved[i].transition_ghz(transition.lower, transition.upper);
    points[i].converged = solved[i].converged;
  }
  return points;
}

std::vector<FamilyCurve> line_families(const EnergyParams& params,
                                       const GradiometerGeometry& geom,
                                       LockState lock,
                                       std::span<const double> field_grid_ut,
                                       std::optional<double> f_resonator_ghz,
                                       const FamilyOptions& opts) {
  geom.validate();
  if (opts.max_upper_level < 1) {
    throw Error(ErrorCode::invalid_value, "max_upper_level must be >= 1");
  }
  for (int order : opts.multiphoton_orders) {
    if (order < 2) {
      throw Error(ErrorCode::invalid_value, "multiphoton orders must be >= 2");
    }
  }
  if (f_resonator_ghz && !(*f_resonator_ghz > 0.0)) {
    throw Error(ErrorCode::invalid_value, "resonator frequency must be > 0");
  }

  // One eigenlevel batch covers every family: all are arithmetic on f_0j.
  std::vector<double> phi(field_grid_ut.size());
  for (size_t i = 0; i < field_grid_ut.size(); ++i) {
    double phi_eff =
        effective_flux_phi0(geom, FieldBias::uniform(field_grid_ut[i]));
    phi[i] = total_flux(phi_eff, lock, geom.alpha).phi_tot_phi0;
  }
  EigenOptions eopts;
  eopts.tolerance = opts.tolerance;
  eopts.n_levels = opts.max_upper_level + 1;
  std::vector<SpectralResult> solved =
      eigenlevels_batch(params, phi, eopts, opts.policy);

  auto label = [](int j) { return "0-" + std::to_string(j); };
  std::vector<FamilyCurve> curves;
  for (int j = 1; j <= opts.max_upper_level; ++j) {
    FamilyCurve main{"main", label(j), {}};
    main.points.resize(field_grid_ut.size());
    for (size_t i = 0; i < field_grid_ut.size(); ++i) {
      main.points[i] = {field_grid_ut[i], solved[i].transition_ghz(0, j),
                        solved[i].converged};
    }
    curves.push_back(std::move(main));
  }

  for (int j = 1; j <= opts.max_upper_level; ++j) {
    for (int order : opts.multiphoton_orders) {
      FamilyCurve mp{"multiphoton",
                     label(j) + "/" + std::to_string(order),
                     curves[j - 1].points};
      for (auto& p : mp.points) p.freq_ghz /= order;
      curves.push_back(std::move(mp));
    }
  }

  if (f_resonator_ghz) {
    double f_res = *f_resonator_ghz;
    bool want_diff = opts.sideband != SidebandMode::sum;
    bool want_sum = opts.sideband != SidebandMode::difference;
    for (int j = 1; j <= opts.max_upper_level; ++j) {
      if (want_diff) {
        // Only the part of the sideband that lands at positive frequency.
        FamilyCurve side{"resonator", "res-" + label(j), {}};
        for (const auto& p : curves[j - 1].points) {
          if (p.freq_ghz - f_res > 0.0) {
            side.points.push_back({p.b_ut, p.freq_ghz - f_res, p.converged});
          }
        }
        curves.push_back(std::move(side));
      }
      if (want_sum) {
        FamilyCurve side{"resonator", "res+" + label(j),
                         curves[j - 1].points};
        for (auto& p : side.points) p.freq_ghz += f_res;
        curves.push_back(std::move(side));
      }
    }
    if (opts.include_readout) {
      FamilyCurve readout{"readout", "res", {}};
      readout.points.resize(field_grid_ut.size());
      for (size_t i = 0; i < field_grid_ut.size(); ++i) {
        readout.points[i] = {field_grid_ut[i], f_res, true};
      }
      curves.push_back(std::move(readout));
    }
  }
  return curves;
}

DispersionResult flux_dispersion(const EnergyParams& params, PhaseBias bias,
                                 double step_phi0) {
  params.validate();
  if (!(step_phi0 > 0.0) || !std::isfinite(step_phi0)) {
    throw Error(ErrorCode::invalid_value, "dispersion step must be positive");
  }
  EigenOptions opts;
  opts.tolerance = 1e-11;
  opts.n_levels = 2;
  auto f01 = [&](double phi) {
    SpectralResult r = eigenlevels(params, {phi}, opts);
    return r.levels_ghz[1];
  };
  double p = bias.phi_tot_phi0;
  auto central = [&](double h) {
    return (f01(p + h) - f01(p - h)) / (2.0 * h);
  };
  double coarse = central(step_phi0);
  double fine = central(0.5 * step_phi0);
  DispersionResult out;
  out.value_ghz_per_phi0 = (4.0 * fine - coarse) / 3.0;
  out.richardson_delta = std::abs(fine - coarse);
  return out;
}

SweetSpotResult sweet_spot_field(const GradiometerGeometry& geom,
                                 LockState lock) {
  geom.validate();
  double a_eff = effective_area_um2(geom);
  double t0 = lock.m * (1.0 + geom.alpha) / 2.0;
  double target;
  if (lock.pi_locked()) {
    target = std::floor(t0) + 0.5;  // nearest half-integer
  } else {
    target = std::round(t0);
  }
  SweetSpotResult out;
  out.phi_tot_target_phi0 = target;
  out.phi_eff_target_phi0 = target - t0;
  if (std::abs(a_eff) < 1e-12) {
    // Perfectly gradiometric device: uniform fields do not move the qubit.
    out.field_insensitive = true;
    out.b_ut = 0.0;
    return out;
  }
  out.b_ut = out.phi_eff_target_phi0 * kFluxQuantumUtUm2 / a_eff;
  return out;
}

}  // namespace fluxlock
