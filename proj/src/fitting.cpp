#include "fluxlock/fitting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fluxlock/constants.hpp"
#include "fluxlock/defaults.hpp"
#include "fluxlock/errors.hpp"
#include "fluxlock/least_squares.hpp"
#include "fluxlock/random.hpp"

namespace fluxlock {

const std::array<const char*, FitParams::kCount>& FitParams::names() {
  static const std::array<const char*, kCount> n = {
      "e_j_ghz", "e_c_ghz", "e_l_ghz", "a_eff_um2", "alpha"};
  return n;
}

std::array<double, FitParams::kCount> FitParams::to_array() const {
  return {e_j_ghz, e_c_ghz, e_l_ghz, a_eff_um2, alpha};
}

FitParams FitParams::from_array(const std::array<double, kCount>& a) {
  return {a[0], a[1], a[2], a[3], a[4]};
}

namespace {

// Transition labels: "0-j" (direct), "0-j/n" (n-photon), "res-0-j" /
// "res+0-j" (resonator-mediated difference/sum sidebands).
struct ParsedTransition {
  int upper = 1;
  int photon_order = 1;
  int sideband = 0;  // 0 direct, -1 difference, +1 sum
};

int parse_int(std::string_view s, const std::string& label) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::malformed_input,
                "bad transition label '" + label + "'");
  }
  return value;
}

ParsedTransition parse_transition(const std::string& label) {
  ParsedTransition t;
  std::string_view s = label;
  if (s.starts_with("res-")) {
    t.sideband = -1;
    s.remove_prefix(4);
  } else if (s.starts_with("res+")) {
    t.sideband = +1;
    s.remove_prefix(4);
  }
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    t.photon_order = parse_int(s.substr(slash + 1), label);
    s = s.substr(0, slash);
    if (t.photon_order < 2) {
      throw Error(ErrorCode::malformed_input,
                  "bad transition label '" + label + "'");
    }
  }
  if (!s.starts_with("0-")) {
    throw Error(ErrorCode::malformed_input,
                "bad transition label '" + label + "'");
  }
  t.upper = parse_int(s.substr(2), label);
  if (t.upper < 1 || t.upper > 12) {
    throw Error(ErrorCode::malformed_input,
                "bad transition label '" + label + "'");
  }
  return t;
}

// Forward model shared by fit_spectrum and synth_dataset.  Records sharing a
// (field, m) pair reuse one eigensolve; the basis size is probed once against
// the adaptive solver and then held fixed so Jacobian differences are smooth.
class SpectrumModel {
 public:
  SpectrumModel(const SpectroscopyDataset& data, double eigen_tol,
                std::optional<double> f_res, SidebandMode sideband)
      : records_(data.records), eigen_tol_(eigen_tol), f_res_(f_res) {
    parsed_.reserve(records_.size());
    for (const auto& rec : records_) {
      parsed_.push_back(parse_transition(rec.transition));
      if (parsed_.back().sideband != 0 && !f_res_) {
        throw Error(ErrorCode::invalid_value,
                    "resonator-mediated records need a resonator frequency");
      }
      max_upper_ = std::max(max_upper_, parsed_.back().upper);
    }
    (void)sideband;  // records carry their own sideband sign in the label
    std::map<std::pair<double, int>, int> group_index;
    group_of_.reserve(records_.size());
    for (const auto& rec : records_) {
      auto key = std::make_pair(rec.b_ut, rec.m);
      auto [it, inserted] =
          group_index.emplace(key, static_cast<int>(groups_.size()));
      if (inserted) groups_.push_back(key);
      group_of_.push_back(it->second);
    }
  }

  int n_records() const { return static_cast<int>(records_.size()); }
  int dim() const { return dim_; }

  double phi_tot(const FitParams& p, int group) const {
    const auto& [b, m] = groups_[group];
    return p.a_eff_um2 * b / kFluxQuantumUtUm2 + m * (1.0 + p.alpha) / 2.0;
  }

  // Smallest basis size whose levels match the adaptively converged solver
  // at the given flux, anchored to the converged result.
  int probe_dim_at(const EnergyParams& en, double phi) const {
    EigenOptions opts;
    opts.tolerance = eigen_tol_;
    opts.n_levels = max_upper_ + 1;
    SpectralResult ref = eigenlevels(en, {phi}, opts);
    if (!ref.converged) {
      throw Error(ErrorCode::no_convergence,
                  "eigensolver did not converge while probing basis size");
    }
    double f01 = ref.levels_ghz[1];
    double ftop = ref.levels_ghz[max_upper_];
    for (int d = (ref.dim_used / 2 + 7) / 8 * 8; d < ref.dim_used; d += 8) {
      auto lv = eigenlevels_fixed(en, {phi}, d, max_upper_ + 1);
      bool ok01 = std::abs(lv[1] - f01) <= 0.5 * eigen_tol_ * std::abs(f01);
      bool oktop = std::abs(lv[max_upper_] - ftop) <=
                   0.5 * eigen_tol_ * std::max(std::abs(ftop), 1e-300);
      if (ok01 && oktop) return d;
    }
    return ref.dim_used;
  }

  void probe_dim(const FitParams& p) {
    // The hardest points are the flux extremes and the spots closest to
    // integer / half-integer total flux (smallest gaps).
    std::vector<int> probes;
    int lo = 0, hi = 0, near_half = 0, near_int = 0;
    double best_half = 1e300, best_int = 1e300;
    for (int g = 0; g < static_cast<int>(groups_.size()); ++g) {
      double phi = phi_tot(p, g);
      if (phi < phi_tot(p, lo)) lo = g;
      if (phi > phi_tot(p, hi)) hi = g;
      double frac = phi - std::floor(phi);
      double d_half = std::abs(frac - 0.5);
      double d_int = std::min(frac, 1.0 - frac);
      if (d_half < best_half) best_half = d_half, near_half = g;
      if (d_int < best_int) best_int = d_int, near_int = g;
    }
    probes = {lo, hi, near_half, near_int};
    int d = 0;
    for (int g : probes) {
      d = std::max(d, probe_dim_at(p.energies(), phi_tot(p, g)));
    }
    dim_ = d;
  }

  void bump_dim() { dim_ = (dim_ * 3 / 2 + 7) / 8 * 8; }

  double frequency_of(const std::vector<double>& levels, int rec) const {
    const ParsedTransition& t = parsed_[rec];
    double f = levels[t.upper] / t.photon_order;
    if (t.sideband != 0) f += t.sideband * *f_res_;
    return f;
  }

  void frequencies(const FitParams& p, std::vector<double>& f) const {
    f.resize(records_.size());
    std::vector<std::vector<double>> levels(groups_.size());
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < static_cast<int>(groups_.size()); ++g) {
      levels[g] =
          eigenlevels_fixed(p.energies(), {phi_tot(p, g)}, dim_, max_upper_ + 1);
    }
    for (size_t i = 0; i < records_.size(); ++i) {
      f[i] = frequency_of(levels[group_of_[i]], static_cast<int>(i));
    }
  }

  void residuals(const FitParams& p, std::vector<double>& r) const {
    std::vector<double> f;
    frequencies(p, f);
    r.resize(records_.size());
    for (size_t i = 0; i < records_.size(); ++i) {
      r[i] = (f[i] - records_[i].freq_ghz) / records_[i].sigma_ghz;
    }
  }

  // Worst disagreement between the fixed-dim evaluator and the adaptive
  // solver over the probe points, relative to f01.  Used to re-validate the
  // basis size at the fit optimum.
  double validation_error(const FitParams& p) const {
    double worst = 0.0;
    std::vector<int> probes = probe_groups(p);
    for (int g : probes) {
      double phi = phi_tot(p, g);
      auto fixed = eigenlevels_fixed(p.energies(), {phi}, dim_, max_upper_ + 1);
      EigenOptions opts;
      opts.tolerance = eigen_tol_;
      opts.n_levels = max_upper_ + 1;
      SpectralResult ref = eigenlevels(p.energies(), {phi}, opts);
      for (int k = 1; k <= max_upper_; ++k) {
        double rel = std::abs(fixed[k] - ref.levels_ghz[k]) /
                     std::max(std::abs(ref.levels_ghz[1]), 1e-300);
        worst = std::max(worst, rel);
      }
    }
    return worst;
  }

 private:
  std::vector<int> probe_groups(const FitParams& p) const {
    int lo = 0, hi = 0, near_half = 0;
    double best_half = 1e300;
    for (int g = 0; g < static_cast<int>(groups_.size()); ++g) {
      double phi = phi_tot(p, g);
      if (phi < phi_tot(p, lo)) lo = g;
      if (phi > phi_tot(p, hi)) hi = g;
      double frac = phi - std::floor(phi);
      if (std::abs(frac - 0.5) < best_half) {
        best_half = std::abs(frac - 0.5);
        near_half = g;
      }
    }
    return {lo, hi, near_half};
  }

  std::vector<SpectroRecord> records_;
  std::vector<ParsedTransition> parsed_;
  std::vector<std::pair<double, int>> groups_;  // unique (b_ut, m)
  std::vector<int> group_of_;
  double eigen_tol_;
  std::optional<double> f_res_;
  int max_upper_ = 1;
  int dim_ = 0;
};

}  // namespace

void SpectroscopyDataset::validate() const {
  if (records.empty()) {
    throw Error(ErrorCode::malformed_input, "empty dataset");
  }
  std::map<int, int> per_state;
  for (const auto& rec : records) {
    if (!std::isfinite(rec.b_ut) || !std::isfinite(rec.freq_ghz) ||
        !std::isfinite(rec.sigma_ghz)) {
      throw Error(ErrorCode::malformed_input, "non-finite dataset field");
    }
    if (rec.sigma_ghz <= 0.0) {
      throw Error(ErrorCode::malformed_input, "sigma_ghz must be > 0");
    }
    parse_transition(rec.transition);  // throws on bad label
    ++per_state[rec.m];
  }
  for (const auto& [m, count] : per_state) {
    if (count < 3) {
      throw Error(ErrorCode::malformed_input,
                  "lock state m=" + std::to_string(m) +
                      " has fewer than 3 records");
    }
  }
}

bool SpectroscopyDataset::has_parity(bool odd) const {
  for (const auto& rec : records) {
    if ((std::abs(rec.m) % 2 == 1) == odd) return true;
  }
  return false;
}

FitResult fit_spectrum(const SpectroscopyDataset& data, const FitParams& seed,
                       const FitConfig& config) {
  data.validate();
  seed.energies().validate();
  if (!std::isfinite(seed.a_eff_um2) || !std::isfinite(seed.alpha) ||
      std::abs(seed.alpha) >= 1.0) {
    throw Error(ErrorCode::invalid_parameters,
                "seed needs finite a_eff and |alpha| < 1");
  }

  SpectrumModel model(data, config.eigen_tolerance, config.f_resonator_ghz,
                      config.sideband);
  model.probe_dim(seed);

  const double inf = std::numeric_limits<double>::infinity();
  LeastSquaresOptions lsq;
  lsq.max_iterations = config.max_iterations;
  lsq.jacobian_rel_step = config.jacobian_rel_step;
  lsq.lower = {0.0, 1e-6, 1e-6, -inf, -0.999};
  lsq.upper = {inf, inf, inf, inf, 0.999};
  lsq.typical_scale = {5.0, 4.0, 2.0, 5.0, 0.02};

  ResidualFn fn = [&model](const std::vector<double>& x,
                           std::vector<double>& r) {
    FitParams p{x[0], x[1], x[2], x[3], x[4]};
    model.residuals(p, r);
  };

  auto seed_arr = seed.to_array();
  std::vector<double> x0(seed_arr.begin(), seed_arr.end());
  LeastSquaresResult ls = levenberg_marquardt(fn, model.n_records(), x0, lsq);

  // The basis was sized at the seed; confirm it still resolves the optimum,
  // enlarging and refitting if the parameters moved far enough to matter.
  for (int round = 0; round < 2; ++round) {
    FitParams opt{ls.x[0], ls.x[1], ls.x[2], ls.x[3], ls.x[4]};
    if (model.validation_error(opt) <= config.eigen_tolerance * 4.0) break;
    model.bump_dim();
    ls = levenberg_marquardt(fn, model.n_records(), ls.x, lsq);
  }

  FitResult out;
  out.estimates = FitParams{ls.x[0], ls.x[1], ls.x[2], ls.x[3], ls.x[4]};
  for (int i = 0; i < FitParams::kCount; ++i) {
    for (int j = 0; j < FitParams::kCount; ++j) {
      out.covariance(i, j) = ls.covariance(i, j);
    }
  }
  out.sigmas = FitParams{std::sqrt(out.covariance(0, 0)),
                         std::sqrt(out.covariance(1, 1)),
                         std::sqrt(out.covariance(2, 2)),
                         std::sqrt(out.covariance(3, 3)),
                         std::sqrt(out.covariance(4, 4))};
  out.chi2 = ls.chi2;
  out.n_points = model.n_records();
  out.iterations = ls.iterations;
  out.converged = ls.converged;
  out.at_bound = ls.at_bound;
  out.residuals = std::move(ls.residuals);
  out.chi2_trace = std::move(ls.chi2_trace);
  out.eigen_dim = model.dim();
  return out;
}

namespace {

struct QuadraticFit {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // y = c0 + c1*(x-x0) + c2*(x-x0)^2
  double x0 = 0.0;
  bool ok = false;
};

QuadraticFit fit_quadratic(const std::vector<std::pair<double, double>>& pts) {
  QuadraticFit q;
  if (pts.size() < 3) return q;
  // center on the x of the smallest y for conditioning
  double x0 = pts[0].first;
  double ymin = pts[0].second;
  for (const auto& [x, y] : pts) {
    if (y < ymin) {
      ymin = y;
      x0 = x;
    }
  }
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    double dx = pts[i].first - x0;
    a(i, 0) = 1.0;
    a(i, 1) = dx;
    a(i, 2) = dx * dx;
    b(i) = pts[i].second;
  }
  Eigen::Vector3d c = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  q.c0 = c(0);
  q.c1 = c(1);
  q.c2 = c(2);
  q.x0 = x0;
  q.ok = std::isfinite(c(0)) && std::isfinite(c(1)) && std::isfinite(c(2));
  return q;
}

}  // namespace

SeedResult initial_guess(const SpectroscopyDataset& data) {
  if (data.records.empty()) {
    throw Error(ErrorCode::cannot_seed, "empty dataset");
  }
  // Seed from the direct 0-1 lines only.
  std::vector<const SpectroRecord*> even, odd;
  for (const auto& rec : data.records) {
    ParsedTransition t = parse_transition(rec.transition);
    if (t.upper != 1 || t.photon_order != 1 || t.sideband != 0) continue;
    if (!std::isfinite(rec.b_ut) || !std::isfinite(rec.freq_ghz)) continue;
    (std::abs(rec.m) % 2 == 0 ? even : odd).push_back(&rec);
  }
  if (even.empty() && odd.empty()) {
    throw Error(ErrorCode::cannot_seed, "no direct 0-1 records to seed from");
  }

  const auto& d = defaults();
  const auto& heur = d.at("seed_heuristic");
  const double ec0 = heur.at("typical_e_c_ghz").get<double>();

  SeedResult out;
  out.params.e_c_ghz = ec0;
  out.params.a_eff_um2 = heur.at("fallback_a_eff_um2").get<double>();
  out.params.alpha = heur.at("fallback_alpha").get<double>();

  // 0-locked maximum reads the plasma scale: f01(0) ~ sqrt(8*E_C*(E_J+E_L))
  // minus an anharmonic shift of about E_C.
  double s0 = std::numeric_limits<double>::quiet_NaN();  // E_J + E_L estimate
  if (!even.empty()) {
    double f0 = -1e300;
    for (auto* r : even) f0 = std::max(f0, r->freq_ghz);
    s0 = (f0 + ec0) * (f0 + ec0) / (8.0 * ec0);
  }

  auto f_half_model = [&](double ej, double el) {
    return eigenlevels_fixed({ej, ec0, el}, {0.5}, 80, 2)[1];
  };

  if (!odd.empty() && !even.empty()) {
    // Scan E_L against the half-flux splitting, the most E_L-sensitive spot.
    double f_half = 1e300;
    for (auto* r : odd) f_half = std::min(f_half, r->freq_ghz);
    double scan_min = heur.at("e_l_scan_min_ghz").get<double>();
    double scan_max =
        std::min(heur.at("e_l_scan_max_ghz").get<double>(), 0.8 * s0);
    double step = heur.at("e_l_scan_step_ghz").get<double>();
    double best_el = scan_min, best_err = 1e300;
    for (double el = scan_min; el <= scan_max + 1e-12; el += step) {
      double err = std::abs(f_half_model(s0 - el, el) - f_half);
      if (err < best_err) {
        best_err = err;
        best_el = el;
      }
    }
    out.params.e_l_ghz = best_el;
    out.params.e_j_ghz = s0 - best_el;
  } else if (!even.empty()) {
    out.params.e_l_ghz = std::min(1.8, 0.45 * s0);
    out.params.e_j_ghz = s0 - out.params.e_l_ghz;
    out.partial = true;
    out.note = "no pi-locked records; inductive split taken from typicals";
  } else {
    out.params.e_j_ghz = 8.8;
    out.params.e_l_ghz = 1.8;
    out.partial = true;
    out.note = "no 0-locked records; typical energies used";
  }

  // Field scale: curvature of the pi-locked dip vs the model curvature at
  // half flux fixes A_eff; the dip position then reads alpha.
  if (!odd.empty()) {
    int m_ref = odd.front()->m;
    std::vector<std::pair<double, double>> pts;
    for (auto* r : odd) {
      if (r->m == m_ref) pts.push_back({r->b_ut, r->freq_ghz});
    }
    std::sort(pts.begin(), pts.end(),
              [](auto& a, auto& b) { return a.second < b.second; });
    size_t keep = std::max<size_t>(5, pts.size() * 2 / 5);
    if (pts.size() > keep) pts.resize(keep);
    QuadraticFit q = fit_quadratic(pts);
    // model curvature d2 f01 / d phi_tot^2 at half flux, 3-point stencil
    double h = 1e-3;
    double c_half =
        (eigenlevels_fixed(out.params.energies(), {0.5 - h}, 80, 2)[1] -
         2.0 * f_half_model(out.params.e_j_ghz, out.params.e_l_ghz) +
         eigenlevels_fixed(out.params.energies(), {0.5 + h}, 80, 2)[1]) /
        (h * h);
    if (q.ok && q.c2 > 0.0 && c_half > 0.0) {
      double curv_b = 2.0 * q.c2;  // d2f/dB2 in GHz/uT^2
      out.params.a_eff_um2 = kFluxQuantumUtUm2 * std::sqrt(curv_b / c_half);
      double b_vertex = q.x0 - q.c1 / (2.0 * q.c2);
      double phi_eff_min = out.params.a_eff_um2 * b_vertex / kFluxQuantumUtUm2;
      // m(1+alpha)/2 + phi_eff_min lands on the nearest half-integer
      double k = std::floor(phi_eff_min + m_ref / 2.0) + 0.5;
      double alpha = 2.0 * (k - phi_eff_min) / m_ref - 1.0;
      if (std::isfinite(alpha) && std::abs(alpha) < 0.3) {
        out.params.alpha = alpha;
      }
    } else {
      out.partial = true;
      if (!out.note.empty()) out.note += "; ";
      out.note += "dip curvature not usable; default field scale kept";
    }
  } else {
    out.partial = true;
  }
  return out;
}

LorentzianFit fit_lorentzian(std::span<const double> freq_ghz,
                             std::span<const double> response) {
  const size_t n = freq_ghz.size();
  if (n != response.size() || n < 6) {
    throw Error(ErrorCode::malformed_input,
                "need >= 6 (freq, response) pairs");
  }
  double fmin = freq_ghz[0], fmax = freq_ghz[0];
  for (double f : freq_ghz) {
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::malformed_input, "non-finite frequency");
    }
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
  }
  for (double y : response) {
    if (!std::isfinite(y)) {
      throw Error(ErrorCode::malformed_input, "non-finite response");
    }
  }
  const double range = fmax - fmin;
  if (!(range > 0.0)) {
    throw Error(ErrorCode::malformed_input, "degenerate frequency axis");
  }

  std::vector<double> sorted(response.begin(), response.end());
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  double c0 = sorted[n / 2];
  size_t peak = 0;
  for (size_t i = 1; i < n; ++i) {
    if (std::abs(response[i] - c0) > std::abs(response[peak] - c0)) peak = i;
  }
  double a0 = response[peak] - c0;
  if (a0 == 0.0) {
    throw Error(ErrorCode::no_peak, "flat trace");
  }
  double spacing = range / static_cast<double>(n - 1);
  int above = 0;
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(response[i] - c0) > 0.5 * std::abs(a0)) ++above;
  }
  double w0 = std::clamp(above * spacing, spacing, range);

  LeastSquaresOptions opts;
  opts.lower = {fmin, 0.05 * spacing, -std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  opts.upper = {fmax, 10.0 * range, std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
  opts.typical_scale = {range, range, std::abs(a0),
                        std::max(std::abs(c0), std::abs(a0))};
  ResidualFn fn = [&](const std::vector<double>& x, std::vector<double>& r) {
    double x0 = x[0], hw = 0.5 * x[1], a = x[2], c = x[3];
    double hw2 = hw * hw;
    for (size_t i = 0; i < n; ++i) {
      double dx = freq_ghz[i] - x0;
      r[i] = c + a * hw2 / (dx * dx + hw2) - response[i];
    }
  };
  LeastSquaresResult ls = levenberg_marquardt(
      fn, static_cast<int>(n), {freq_ghz[peak], w0, a0, c0}, opts);

  double rms = std::sqrt(ls.chi2 / static_cast<double>(n));
  if (std::abs(ls.x[2]) < 3.0 * rms) {
    throw Error(ErrorCode::no_peak, "amplitude below 3x residual RMS");
  }
  LorentzianFit out;
  out.center_ghz = ls.x[0];
  out.center_sigma_ghz = std::sqrt(ls.covariance(0, 0));
  out.fwhm_ghz = ls.x[1];
  out.amplitude = ls.x[2];
  out.offset = ls.x[3];
  return out;
}

SpectroscopyDataset synth_dataset(const EnergyParams& params,
                                  const GradiometerGeometry& geom,
                                  std::span<const LockState> locks,
                                  std::span<const double> field_grid_ut,
                                  std::uint64_t seed,
                                  const SynthOptions& opts) {
  params.validate();
  geom.validate();
  if (locks.empty() || field_grid_ut.empty()) {
    throw Error(ErrorCode::invalid_value, "need lock states and a field grid");
  }
  if (opts.noise_sigma_ghz < 0.0 || !std::isfinite(opts.noise_sigma_ghz)) {
    throw Error(ErrorCode::invalid_value, "noise sigma must be >= 0");
  }
  if (opts.transitions.empty()) {
    throw Error(ErrorCode::invalid_value, "need at least one transition");
  }

  double a_eff = effective_area_um2(geom);
  double sigma_col =
      opts.noise_sigma_ghz > 0.0 ? opts.noise_sigma_ghz : opts.recorded_sigma_ghz;

  SpectroscopyDataset data;
  for (size_t li = 0; li < locks.size(); ++li) {
    for (const std::string& label : opts.transitions) {
      parse_transition(label);  // validate before building
      for (double b : field_grid_ut) {
        SpectroRecord rec;
        rec.b_ut = b;
        rec.sigma_ghz = sigma_col;
        rec.m = locks[li].m;
        rec.transition = label;
        rec.cooldown = "cd" + std::to_string(li);
        data.records.push_back(std::move(rec));
      }
    }
  }

  SpectrumModel model(data, opts.eigen_tolerance, opts.f_resonator_ghz,
                      opts.sideband);
  FitParams truth{params.e_j_ghz, params.e_c_ghz, params.e_l_ghz, a_eff,
                  geom.alpha};
  model.probe_dim(truth);
  std::vector<double> f;
  model.frequencies(truth, f);

  GaussianRng rng(seed);
  for (size_t i = 0; i < data.records.size(); ++i) {
    double noise =
        opts.noise_sigma_ghz > 0.0 ? opts.noise_sigma_ghz * rng.gaussian() : 0.0;
    data.records[i].freq_ghz = f[i] + noise;
  }
  return data;
}

}  // namespace fluxlock
