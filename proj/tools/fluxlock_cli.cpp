// fluxlock: simulate, design, lock, fit and synthesize gradiometric
// fluxonium data from the command line.  All file formats are CSV/JSON with
// fixed units (uT, GHz, us) and outputs are byte-stable across reruns.

#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "fluxlock/coherence.hpp"
#include "fluxlock/constants.hpp"
#include "fluxlock/defaults.hpp"
#include "fluxlock/errors.hpp"
#include "fluxlock/fitting.hpp"
#include "fluxlock/flux_geometry.hpp"
#include "fluxlock/io.hpp"
#include "fluxlock/spectrum.hpp"

using nlohmann::json;
using namespace fluxlock;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::no_convergence:
      return 3;
    case ErrorCode::fit_failed:
    case ErrorCode::no_peak:
    case ErrorCode::no_decay:
    case ErrorCode::undefined_t2e:
      return 4;
    default:
      return 2;  // malformed input / invalid values / ambiguous lock ...
  }
}

// "start:stop:count" -> uniform grid
std::vector<double> parse_range(const std::string& spec) {
  auto fail = [&]() -> void {
    throw Error(ErrorCode::malformed_input,
                "bad range '" + spec + "', expected start:stop:count");
  };
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : spec) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3) fail();
  auto to_double = [&](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail();
    return v;
  };
  double start = to_double(parts[0]);
  double stop = to_double(parts[1]);
  long count = 0;
  auto [p, ec] =
      std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
  if (ec != std::errc() || p != parts[2].data() + parts[2].size() || count < 1) {
    fail();
  }
  std::vector<double> grid(count);
  for (long i = 0; i < count; ++i) {
    grid[i] = count == 1
                  ? start
                  : start + (stop - start) * static_cast<double>(i) /
                        static_cast<double>(count - 1);
  }
  return grid;
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&]() {
    int v = 0;
    auto [p, ec] = std::from_chars(cur.data(), cur.data() + cur.size(), v);
    if (ec != std::errc() || p != cur.data() + cur.size() || cur.empty()) {
      throw Error(ErrorCode::malformed_input, "bad integer list '" + spec + "'");
    }
    out.push_back(v);
    cur.clear();
  };
  for (char ch : spec) {
    if (ch == ',') {
      flush();
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

std::vector<std::string> parse_string_list(const std::string& spec) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : spec) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

struct SimulateArgs {
  std::string params_path, geometry_path, b_range;
  std::string out_path = "curves.csv";
  std::string summary_path = "summary.json";
  int m = 0;
  double tol = 1e-9;
  double f_res_ghz = 0.0;  // 0 = unset
};

int cmd_simulate(const SimulateArgs& a) {
  EnergyParams params = params_from_json(load_json_file(a.params_path));
  GradiometerGeometry geom = geometry_from_json(load_json_file(a.geometry_path));
  std::vector<double> grid = parse_range(a.b_range);
  LockState lock{a.m};

  const auto& dspec = defaults().at("spectrum");
  FamilyOptions opts;
  opts.tolerance = a.tol;
  opts.max_upper_level = dspec.at("max_upper_level").get<int>();
  opts.multiphoton_orders =
      dspec.at("multiphoton_orders").get<std::vector<int>>();
  std::optional<double> f_res;
  if (a.f_res_ghz > 0.0) f_res = a.f_res_ghz;

  auto curves = line_families(params, geom, lock, grid, f_res, opts);
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      if (!p.converged) {
        throw Error(ErrorCode::no_convergence,
                    "eigensolver did not converge at B = " +
                        format_double(p.b_ut) + " uT (" + c.transition + ")");
      }
    }
  }
  write_curves_csv_file(a.out_path, curves);

  double a_eff = effective_area_um2(geom);
  SweetSpotResult sweet = sweet_spot_field(geom, lock);
  // main 0-1 curve extrema for quick inspection
  const auto& main01 = curves.front().points;
  size_t imin = 0, imax = 0;
  for (size_t i = 1; i < main01.size(); ++i) {
    if (main01[i].freq_ghz < main01[imin].freq_ghz) imin = i;
    if (main01[i].freq_ghz > main01[imax].freq_ghz) imax = i;
  }
  json summary = {
      {"m", a.m},
      {"parity", lock.parity_name()},
      {"a_eff_um2", a_eff},
      {"residual_offset_phi0", residual_offset_phi0(lock, geom.alpha, a_eff)},
      {"sweet_spot",
       {{"b_ut", sweet.b_ut},
        {"phi_eff_target_phi0", sweet.phi_eff_target_phi0},
        {"phi_tot_target_phi0", sweet.phi_tot_target_phi0},
        {"field_insensitive", sweet.field_insensitive}}},
      {"n_curves", curves.size()},
      {"f01_min_ghz", main01[imin].freq_ghz},
      {"f01_min_b_ut", main01[imin].b_ut},
      {"f01_max_ghz", main01[imax].freq_ghz},
      {"f01_max_b_ut", main01[imax].b_ut},
  };
  if (f_res) summary["f_resonator_ghz"] = *f_res;
  write_json_file(a.summary_path, summary);
  return 0;
}

struct FitSpectrumArgs {
  std::string data_path;
  std::string params_path;  // optional explicit seed
  std::string out_path = "fit.json";
  double tol = 1e-10;
  double f_res_ghz = 0.0;
};

int cmd_fit_spectrum(const FitSpectrumArgs& a) {
  SpectroscopyDataset data = read_dataset_csv_file(a.data_path);
  FitConfig config;
  config.eigen_tolerance = a.tol;
  if (a.f_res_ghz > 0.0) config.f_resonator_ghz = a.f_res_ghz;

  FitParams seed;
  if (!a.params_path.empty()) {
    json j = load_json_file(a.params_path);
    EnergyParams en = params_from_json(j);
    seed.e_j_ghz = en.e_j_ghz;
    seed.e_c_ghz = en.e_c_ghz;
    seed.e_l_ghz = en.e_l_ghz;
    const auto& heur = defaults().at("seed_heuristic");
    seed.a_eff_um2 = j.contains("a_eff_um2")
                         ? j.at("a_eff_um2").get<double>()
                         : heur.at("fallback_a_eff_um2").get<double>();
    seed.alpha = j.contains("alpha") ? j.at("alpha").get<double>()
                                     : heur.at("fallback_alpha").get<double>();
  } else {
    SeedResult sr = initial_guess(data);
    if (sr.partial) {
      std::cerr << "note [partial-seed]: " << sr.note << "\n";
    }
    seed = sr.params;
  }

  FitResult result = fit_spectrum(data, seed, config);
  write_json_file(a.out_path, fit_result_to_json(result));
  if (!result.converged) {
    throw Error(ErrorCode::fit_failed,
                "no convergence within " + std::to_string(config.max_iterations) +
                    " iterations; chi2 trace written to " + a.out_path);
  }
  return 0;
}

struct DesignArgs {
  std::string coeffs_path;
  std::string target;
  std::string out_path = "design.json";
  double x_um = 0.0;
  bool have_x = false;
};

int cmd_design(const DesignArgs& a) {
  DesignCoefficients coeffs;
  if (!a.coeffs_path.empty()) {
    coeffs = design_coefficients_from_json(load_json_file(a.coeffs_path));
  } else {
    coeffs = design_coefficients_from_json(defaults().at("design_coefficients"));
  }

  json out = {{"coefficients", design_coefficients_to_json(coeffs)}};
  if (!a.target.empty()) {
    DesignTarget target;
    if (a.target == "alpha-zero") {
      target = DesignTarget::alpha_zero;
    } else if (a.target == "aeff-zero") {
      target = DesignTarget::aeff_zero;
    } else if (a.target == "da-half-zero") {
      target = DesignTarget::da_half_zero;
    } else {
      throw Error(ErrorCode::malformed_input,
                  "unknown --target '" + a.target + "'");
    }
    double x = design_solve(target, coeffs);
    out["target"] = a.target;
    out["x_um"] = x;
    out["model_at_x"] = [&] {
      DesignPoint p = design_model(x, coeffs);
      return json{{"x_um", p.x_um},
                  {"delta_l_ph", p.delta_l_ph},
                  {"delta_a_half_um2", p.delta_a_half_um2},
                  {"alpha_pct", p.alpha_pct},
                  {"a_eff_um2", p.a_eff_um2}};
    }();
  } else {
    DesignCrossings c = design_crossings(coeffs);
    out["crossings"] = {{"alpha_zero_x_um", c.alpha_zero_x_um},
                        {"aeff_zero_x_um", c.aeff_zero_x_um},
                        {"da_half_zero_x_um", c.da_half_zero_x_um},
                        {"alpha_vs_aeff_gap_um", c.alpha_vs_aeff_gap_um}};
  }
  if (a.have_x) {
    DesignPoint p = design_model(a.x_um, coeffs);
    out["model"] = {{"x_um", p.x_um},
                    {"delta_l_ph", p.delta_l_ph},
                    {"delta_a_half_um2", p.delta_a_half_um2},
                    {"alpha_pct", p.alpha_pct},
                    {"a_eff_um2", p.a_eff_um2}};
  }
  write_json_file(a.out_path, out);
  return 0;
}

struct LockArgs {
  std::string geometry_path;
  std::string out_path = "lock.json";
  double b_cd_ut = 0.0;
};

int cmd_lock(const LockArgs& a) {
  json j = load_json_file(a.geometry_path);
  double tol = defaults().at("locking").at("ambiguity_tolerance_phi0").get<double>();
  auto device_json = [&](const GradiometerGeometry& geom) {
    LockState lock = trapped_fluxons(a.b_cd_ut, geom, tol);
    double ring_flux = a.b_cd_ut * geom.ring_area_um2 / kFluxQuantumUtUm2;
    return json{{"m", lock.m},
                {"parity", lock.parity_name()},
                {"ring_flux_phi0", ring_flux}};
  };

  json out;
  if (j.is_array()) {
    std::vector<GradiometerGeometry> geoms;
    for (const auto& item : j) geoms.push_back(geometry_from_json(item));
    MultiLockResult res = multi_qubit_lock(a.b_cd_ut, geoms, tol);
    json devices = json::array();
    for (size_t i = 0; i < res.devices.size(); ++i) {
      if (res.devices[i].lock) {
        devices.push_back(device_json(geoms[i]));
      } else {
        devices.push_back(json{{"error", "ambiguous-cooldown-flux"},
                               {"message", res.devices[i].error}});
      }
    }
    out = {{"b_cd_ut", a.b_cd_ut},
           {"devices", devices},
           {"summary",
            {{"zero_locked", res.n_zero_locked},
             {"pi_locked", res.n_pi_locked},
             {"ambiguous", res.n_ambiguous}}}};
  } else {
    GradiometerGeometry geom = geometry_from_json(j);
    out = device_json(geom);
    out["b_cd_ut"] = a.b_cd_ut;
  }
  write_json_file(a.out_path, out);
  return 0;
}

struct FitDecayArgs {
  std::string kind;
  std::string data_path;
  std::string out_path = "decay.json";
  bool sweet_spot = false;
};

int cmd_fit_decay(const FitDecayArgs& a) {
  DecayTrace trace = read_trace_csv_file(a.data_path);
  json out;
  if (a.kind == "t1") {
    T1Fit fit = fit_t1(trace);
    out = {{"t1_us", fit.t1_us},
           {"amplitude", fit.amplitude},
           {"offset", fit.offset},
           {"reduced_chi2", fit.reduced_chi2},
           {"model_mismatch", fit.model_mismatch},
           {"sigmas", {{"t1_us", fit.t1_sigma_us}}}};
  } else if (a.kind == "echo") {
    DecayRates rates = fit_echo(trace, a.sweet_spot);
    out = {{"gamma0_per_us", rates.gamma0_per_us},
           {"gamma_phi_per_us", rates.gamma_phi_per_us},
           {"t2e_us", t2e_combined_us(rates.gamma0_per_us,
                                      rates.gamma_phi_per_us)},
           {"at_sweet_spot", a.sweet_spot},
           {"amplitude", rates.amplitude},
           {"offset", rates.offset},
           {"reduced_chi2", rates.reduced_chi2},
           {"model_mismatch", rates.model_mismatch},
           {"sigmas",
            {{"gamma0_per_us", rates.gamma0_sigma},
             {"gamma_phi_per_us", rates.gamma_phi_sigma}}}};
  } else {
    throw Error(ErrorCode::malformed_input,
                "unknown --kind '" + a.kind + "', expected t1 or echo");
  }
  write_json_file(a.out_path, out);
  return 0;
}

struct SynthArgs {
  std::string params_path, geometry_path, b_range;
  std::string m_list = "0,1";
  std::string transitions = "0-1";
  std::string out_path = "data.csv";
  double noise_ghz = 0.0;
  double f_res_ghz = 0.0;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
  EnergyParams params = params_from_json(load_json_file(a.params_path));
  GradiometerGeometry geom = geometry_from_json(load_json_file(a.geometry_path));
  std::vector<double> grid = parse_range(a.b_range);
  std::vector<LockState> locks;
  for (int m : parse_int_list(a.m_list)) locks.push_back({m});

  SynthOptions opts;
  opts.noise_sigma_ghz = a.noise_ghz;
  opts.recorded_sigma_ghz =
      defaults().at("fit").at("default_sigma_ghz").get<double>();
  opts.transitions = parse_string_list(a.transitions);
  if (a.f_res_ghz > 0.0) opts.f_resonator_ghz = a.f_res_ghz;

  SpectroscopyDataset data =
      synth_dataset(params, geom, locks, grid, a.seed, opts);
  write_dataset_csv_file(a.out_path, data);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradiometric fluxonium simulation, design and fitting"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate",
                                   "spectral line families vs applied field");
  c_sim->add_option("--params", sim.params_path, "circuit energies JSON")
      ->required();
  c_sim->add_option("--geometry", sim.geometry_path, "loop geometry JSON")
      ->required();
  c_sim->add_option("--m", sim.m, "trapped fluxon number");
  c_sim->add_option("--b", sim.b_range, "field grid start:stop:count (uT)")
      ->required();
  c_sim->add_option("--tol", sim.tol, "eigensolver relative tolerance");
  c_sim->add_option("--f-res-ghz", sim.f_res_ghz, "readout resonator (GHz)");
  c_sim->add_option("--out", sim.out_path, "curves CSV path");
  c_sim->add_option("--summary", sim.summary_path, "summary JSON path");

  FitSpectrumArgs fita;
  auto* c_fit = app.add_subcommand("fit-spectrum",
                                   "joint parameter fit of spectroscopy data");
  c_fit->add_option("--data", fita.data_path, "dataset CSV")->required();
  c_fit->add_option("--params", fita.params_path,
                    "optional seed JSON (else heuristic seed)");
  c_fit->add_option("--tol", fita.tol, "eigensolver tolerance during fitting");
  c_fit->add_option("--f-res-ghz", fita.f_res_ghz, "readout resonator (GHz)");
  c_fit->add_option("--out", fita.out_path, "fit JSON path");

  DesignArgs des;
  auto* c_des = app.add_subcommand("design", "width-asymmetry design model");
  c_des->add_option("--coeffs", des.coeffs_path,
                    "design coefficients JSON (else built-in defaults)");
  c_des->add_option("--target", des.target,
                    "alpha-zero | aeff-zero | da-half-zero");
  auto* xopt = c_des->add_option("--x-um", des.x_um,
                                 "evaluate the model at this asymmetry");
  c_des->add_option("--out", des.out_path, "design JSON path");

  LockArgs lock;
  auto* c_lock = app.add_subcommand("lock", "trapped-fluxon bookkeeping");
  c_lock->add_option("--b-cd-ut", lock.b_cd_ut, "cooldown field (uT)")
      ->required();
  c_lock->add_option("--geometry", lock.geometry_path,
                     "geometry JSON (object or array)")
      ->required();
  c_lock->add_option("--out", lock.out_path, "lock JSON path");

  FitDecayArgs dec;
  auto* c_dec = app.add_subcommand("fit-decay", "T1 / echo decay fits");
  c_dec->add_option("--kind", dec.kind, "t1 | echo")->required();
  c_dec->add_flag("--sweet-spot", dec.sweet_spot,
                  "echo: pure-exponential model");
  c_dec->add_option("--data", dec.data_path, "trace CSV")->required();
  c_dec->add_option("--out", dec.out_path, "decay JSON path");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "synthetic spectroscopy dataset");
  c_syn->add_option("--params", syn.params_path, "circuit energies JSON")
      ->required();
  c_syn->add_option("--geometry", syn.geometry_path, "loop geometry JSON")
      ->required();
  c_syn->add_option("--m", syn.m_list, "lock states, e.g. 0,1");
  c_syn->add_option("--b", syn.b_range, "field grid start:stop:count (uT)")
      ->required();
  c_syn->add_option("--noise-ghz", syn.noise_ghz, "Gaussian noise sigma");
  c_syn->add_option("--seed", syn.seed, "RNG seed");
  c_syn->add_option("--transitions", syn.transitions,
                    "comma list, e.g. 0-1,0-2");
  c_syn->add_option("--f-res-ghz", syn.f_res_ghz, "readout resonator (GHz)");
  c_syn->add_option("--out", syn.out_path, "dataset CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  des.have_x = xopt->count() > 0;

  try {
    if (*c_sim) return cmd_simulate(sim);
    if (*c_fit) return cmd_fit_spectrum(fita);
    if (*c_des) return cmd_design(des);
    if (*c_lock) return cmd_lock(lock);
    if (*c_dec) return cmd_fit_decay(dec);
    if (*c_syn) return cmd_synth(syn);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
