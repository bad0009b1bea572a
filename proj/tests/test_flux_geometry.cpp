#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fluxlock/constants.hpp"
#include "fluxlock/errors.hpp"
#include "fluxlock/flux_geometry.hpp"
#include "support.hpp"

using namespace fluxlock;
using namespace fluxlock::testing;

namespace {

GradiometerGeometry make_geom(double a_left, double a_right, double ring, double alpha) {
  GradiometerGeometry g;
  g.area_left_um2 = a_left;
  g.area_right_um2 = a_right;
  g.ring_area_um2 = ring;
  g.alpha = alpha;
  return g;
}

}  // namespace

TEST_SUITE("unit_flux_geometry") {

TEST_CASE("symmetric gradiometer rejects a uniform field entirely") {
  const auto g = make_geom(1000.0, 1000.0, 3000.0, 0.0);
  CHECK(effective_flux_phi0(g, FieldBias::uniform(50.0)) == 0.0);
  CHECK(effective_area_um2(g) == 0.0);
}

TEST_CASE("pure gradient couples through half the area difference") {
  const auto g = make_geom(1000.0, 1000.0, 3000.0, 0.0);
  const FieldBias grad{1.0, 0.0};
  CHECK(effective_flux_phi0(g, grad) ==
        doctest::Approx(500.0 / kFluxQuantumUtUm2).epsilon(1e-15));
}

TEST_CASE("four square microns in one microtesla") {
  const auto g = make_geom(1004.0, 996.0, 3000.0, 0.0);
  CHECK(effective_area_um2(g) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(effective_flux_phi0(g, FieldBias::uniform(1.0)) ==
        doctest::Approx(0.0019343913941000542).epsilon(1e-13));
}

TEST_CASE("uniform-field flux equals effective area times field") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> area(500.0, 2000.0);
  std::uniform_real_distribution<double> al(-0.05, 0.05);
  std::uniform_real_distribution<double> field(-300.0, 300.0);
  for (int i = 0; i < 50; ++i) {
    const auto g = make_geom(area(rng), area(rng), 3000.0, al(rng));
    const double b = field(rng);
    const double via_flux = effective_flux_phi0(g, FieldBias::uniform(b));
    const double via_area = effective_area_um2(g) * b / kFluxQuantumUtUm2;
    CHECK(via_flux == doctest::Approx(via_area).epsilon(1e-12));
  }
}

TEST_CASE("effective flux is linear in the field and odd under loop swap") {
  const auto g = make_geom(1582.73, 1555.27, 3145.8, -0.0062);
  const FieldBias b1{12.0, 9.0};
  const FieldBias b2{24.0, 18.0};
  CHECK(effective_flux_phi0(g, b2) ==
        doctest::Approx(2.0 * effective_flux_phi0(g, b1)).epsilon(1e-14));

  auto swapped = g;
  std::swap(swapped.area_left_um2, swapped.area_right_um2);
  swapped.alpha = -g.alpha;
  CHECK(effective_flux_phi0(swapped, FieldBias::uniform(37.0)) ==
        doctest::Approx(-effective_flux_phi0(g, FieldBias::uniform(37.0))).epsilon(1e-12));
}

TEST_CASE("trapped fluxon count for the reference ring") {
  const auto g = make_geom(1582.73, 1555.27, 107.0 * 29.4, 0.0);
  CHECK(g.ring_area_um2 == doctest::Approx(3145.8).epsilon(1e-12));
  CHECK(trapped_fluxons(0.66, g).m == 1);
  CHECK(trapped_fluxons(0.0, g).m == 0);
  CHECK(trapped_fluxons(1.32, g).m == 2);
  CHECK(trapped_fluxons(-0.66, g).m == -1);
}

TEST_CASE("trapped fluxon count is monotone in the cooldown field") {
  const auto g = make_geom(1000.0, 1000.0, 3145.8, 0.0);
  int last = -100;
  for (double b = -2.0; b <= 2.0; b += 0.05) {
    // Steer clear of the ambiguity band around half-integer flux.
    const double flux = b * g.ring_area_um2 / kFluxQuantumUtUm2;
    if (std::abs(flux - std::floor(flux) - 0.5) < 5e-3) continue;
    const int m = trapped_fluxons(b, g).m;
    CHECK(m >= last);
    last = m;
  }
}

TEST_CASE("cooldown flux near a half-integer is ambiguous") {
  const auto g = make_geom(1000.0, 1000.0, 3145.8, 0.0);
  // Field that puts exactly half a flux quantum through the ring.
  const double b_half = 0.5 * kFluxQuantumUtUm2 / g.ring_area_um2;
  auto code = error_code_of([&] { trapped_fluxons(b_half, g); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::ambiguous_cooldown_flux);

  // Just inside the default tolerance band: still ambiguous.
  const double b_in = (0.5 + 5e-4) * kFluxQuantumUtUm2 / g.ring_area_um2;
  CHECK(error_code_of([&] { trapped_fluxons(b_in, g); }) ==
        ErrorCode::ambiguous_cooldown_flux);

  // Just outside: resolves to the nearest integer.
  const double b_out = (0.5 + 2e-3) * kFluxQuantumUtUm2 / g.ring_area_um2;
  CHECK(trapped_fluxons(b_out, g).m == 1);
  const double b_below = (0.5 - 2e-3) * kFluxQuantumUtUm2 / g.ring_area_um2;
  CHECK(trapped_fluxons(b_below, g).m == 0);

  // A wider caller-chosen tolerance widens the band.
  CHECK(error_code_of([&] { trapped_fluxons(b_out, g, 5e-3); }) ==
        ErrorCode::ambiguous_cooldown_flux);
}

TEST_CASE("lock parity naming") {
  CHECK_FALSE(LockState{0}.pi_locked());
  CHECK(LockState{1}.pi_locked());
  CHECK_FALSE(LockState{2}.pi_locked());
  CHECK(LockState{-1}.pi_locked());
  CHECK_FALSE(LockState{-2}.pi_locked());
  CHECK(std::string(LockState{1}.parity_name()) == "pi");
  CHECK(std::string(LockState{0}.parity_name()) == "zero");
}

TEST_CASE("total flux adds half a quantum per trapped fluxon, tilted by alpha") {
  CHECK(total_flux(0.01, LockState{0}, -0.0062).phi_tot_phi0 == 0.01);
  CHECK(total_flux(0.0, LockState{1}, -0.0062).phi_tot_phi0 ==
        doctest::Approx(0.4969).epsilon(1e-12));
  CHECK(total_flux(0.01, LockState{1}, -0.0062).phi_tot_phi0 ==
        doctest::Approx(0.5069).epsilon(1e-12));
  CHECK(total_flux(0.0, LockState{2}, 0.0).phi_tot_phi0 == 1.0);
  CHECK(total_flux(-0.2, LockState{-1}, 0.01).phi_tot_phi0 ==
        doctest::Approx(-0.2 - 0.505).epsilon(1e-12));
}

TEST_CASE("residual offset of the pi-locked bias point") {
  CHECK(residual_offset_phi0(LockState{1}, -0.0062, 4.0) ==
        doctest::Approx(-0.0031).epsilon(1e-15));
  CHECK(residual_offset_phi0(LockState{1}, -0.0062, -4.0) ==
        doctest::Approx(0.0031).epsilon(1e-15));
  // Zero effective area defaults to the positive-sign convention.
  CHECK(residual_offset_phi0(LockState{1}, -0.0062, 0.0) ==
        doctest::Approx(-0.0031).epsilon(1e-15));
  CHECK(residual_offset_phi0(LockState{0}, -0.0062, 4.0) == 0.0);
  CHECK(residual_offset_phi0(LockState{2}, 0.004, 4.0) ==
        doctest::Approx(0.004).epsilon(1e-15));
}

TEST_CASE("layout model at the nominal design point") {
  const auto p0 = design_model(0.0);
  CHECK(p0.delta_l_ph == doctest::Approx(-8.5).epsilon(1e-15));
  CHECK(p0.delta_a_half_um2 == doctest::Approx(8.9).epsilon(1e-15));
  CHECK(p0.alpha_pct == doctest::Approx(-0.31).epsilon(1e-15));
  CHECK(p0.a_eff_um2 == doctest::Approx(4.0).epsilon(1e-15));

  const auto pp = design_model(0.2);
  CHECK(pp.delta_l_ph == doctest::Approx(-120.0 * 0.2 - 8.5).epsilon(1e-15));
  CHECK(pp.delta_a_half_um2 == doctest::Approx(92.7 * 0.2 + 8.9).epsilon(1e-15));
  CHECK(pp.alpha_pct == doctest::Approx(-4.4 * 0.2 - 0.31).epsilon(1e-15));
  CHECK(pp.a_eff_um2 == doctest::Approx(23.6 * 0.2 + 4.0).epsilon(1e-15));
}

TEST_CASE("frozen zero crossings of the layout model") {
  CHECK(design_solve(DesignTarget::alpha_zero) ==
        doctest::Approx(-0.07045454545454545).epsilon(1e-13));
  CHECK(design_solve(DesignTarget::aeff_zero) ==
        doctest::Approx(-0.1694915254237288).epsilon(1e-13));
  CHECK(design_solve(DesignTarget::da_half_zero) ==
        doctest::Approx(-0.09600862998921252).epsilon(1e-13));

  const auto cr = design_crossings();
  CHECK(cr.alpha_zero_x_um == doctest::Approx(-0.07045454545454545).epsilon(1e-13));
  CHECK(cr.aeff_zero_x_um == doctest::Approx(-0.1694915254237288).epsilon(1e-13));
  CHECK(cr.alpha_vs_aeff_gap_um ==
        doctest::Approx(0.09903697996918337).epsilon(1e-12));
  // Nulling alpha and nulling the pickup area are genuinely different knobs.
  CHECK(std::abs(cr.alpha_vs_aeff_gap_um) > 0.05);
  // Solutions actually null their targets.
  CHECK(design_model(cr.alpha_zero_x_um).alpha_pct == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(design_model(cr.aeff_zero_x_um).a_eff_um2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate layout slope has no crossing") {
  DesignCoefficients c;
  c.alpha_slope_pct_per_um = 0.0;
  auto code = error_code_of([&] { design_solve(DesignTarget::alpha_zero, c); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::unsolvable_target);
}

TEST_CASE("one cooldown locks a whole chip") {
  std::vector<GradiometerGeometry> devices;
  devices.push_back(make_geom(1000.0, 1000.0, 3145.8, 0.0));  // ~1.004 fluxons
  devices.push_back(make_geom(1000.0, 1000.0, 1566.0, 0.0));  // ~0.4998: ambiguous
  devices.push_back(make_geom(1000.0, 1000.0, 6291.6, 0.0));  // ~2.008 fluxons
  devices.push_back(make_geom(1000.0, 1000.0, 300.0, 0.0));   // ~0.096 fluxons
  const auto res = multi_qubit_lock(0.66, devices);
  REQUIRE(res.devices.size() == 4);
  CHECK(res.n_pi_locked == 1);
  CHECK(res.n_zero_locked == 2);
  CHECK(res.n_ambiguous == 1);
  REQUIRE(res.devices[0].lock.has_value());
  CHECK(res.devices[0].lock->m == 1);
  CHECK_FALSE(res.devices[1].lock.has_value());
  CHECK_FALSE(res.devices[1].error.empty());
  REQUIRE(res.devices[2].lock.has_value());
  CHECK(res.devices[2].lock->m == 2);
  REQUIRE(res.devices[3].lock.has_value());
  CHECK(res.devices[3].lock->m == 0);
}

TEST_CASE("inductance imbalance from per-arm inductances") {
  const auto g = GradiometerGeometry::from_inductances(1000.0, 1010.0, 3145.8,
                                                       100.0, 102.0);
  CHECK(g.alpha == doctest::Approx(2.0 / 202.0).epsilon(1e-15));
  CHECK(error_code_of([] {
          GradiometerGeometry::from_inductances(1000.0, 1000.0, 3000.0, 0.0, 100.0);
        }) == ErrorCode::invalid_parameters);
}

TEST_CASE("geometry validation") {
  CHECK_FALSE(error_code_of([] { make_geom(1000.0, 990.0, 3000.0, -0.01).validate(); }));
  CHECK(error_code_of([] { make_geom(-1.0, 990.0, 3000.0, 0.0).validate(); }) ==
        ErrorCode::invalid_parameters);
  CHECK(error_code_of([] { make_geom(1000.0, 990.0, 0.0, 0.0).validate(); }) ==
        ErrorCode::invalid_parameters);
  CHECK(error_code_of([] { make_geom(1000.0, 990.0, 3000.0, 1.0).validate(); }) ==
        ErrorCode::invalid_parameters);
  const double nan = std::nan("");
  CHECK(error_code_of([&] { make_geom(1000.0, nan, 3000.0, 0.0).validate(); }) ==
        ErrorCode::invalid_parameters);
}

}  // TEST_SUITE
