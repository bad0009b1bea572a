#include "fluxlock/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fluxlock/errors.hpp"
#include "fluxlock/least_squares.hpp"

namespace fluxlock {

void DecayTrace::validate() const {
  if (samples.size() < 8) {
    throw Error(ErrorCode::malformed_input, "need at least 8 samples");
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (!std::isfinite(s.time_us) || !std::isfinite(s.population)) {
      throw Error(ErrorCode::malformed_input, "non-finite sample");
    }
    if (s.time_us <= prev) {
      throw Error(ErrorCode::malformed_input,
                  "times must be strictly increasing");
    }
    if (s.population < -0.1 || s.population > 1.1) {
      throw Error(ErrorCode::malformed_input,
                  "population outside [-0.1, 1.1]");
    }
    prev = s.time_us;
  }
}

namespace {

struct TraceView {
  std::vector<double> t, y;
  double span = 0.0;
  double range = 0.0;
};

TraceView view_of(const DecayTrace& trace) {
  trace.validate();
  TraceView v;
  for (const auto& s : trace.samples) {
    v.t.push_back(s.time_us);
    v.y.push_back(s.population);
  }
  v.span = v.t.back() - v.t.front();
  double lo = *std::min_element(v.y.begin(), v.y.end());
  double hi = *std::max_element(v.y.begin(), v.y.end());
  v.range = hi - lo;
  return v;
}

// Noise scale from successive differences, robust to the smooth decay trend.
double noise_estimate(const TraceView& v) {
  std::vector<double> d;
  for (size_t i = 1; i < v.y.size(); ++i) {
    d.push_back(std::abs(v.y[i] - v.y[i - 1]));
  }
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return 1.4826 * d[d.size() / 2] / std::numbers::sqrt2;
}

struct MismatchStats {
  double reduced_chi2 = 0.0;
  bool mismatch = false;
};

MismatchStats mismatch_stats(const TraceView& v, const LeastSquaresResult& ls,
                             int n_params, double amplitude) {
  MismatchStats s;
  double sigma = std::max(noise_estimate(v), 1e-12);
  int dof = std::max(static_cast<int>(v.y.size()) - n_params, 1);
  s.reduced_chi2 = ls.chi2 / (sigma * sigma * dof);
  double rms = std::sqrt(ls.chi2 / static_cast<double>(v.y.size()));
  // the RMS floor keeps machine-precision perfect fits from tripping the
  // flag when the noise estimate is also ~0
  s.mismatch = s.reduced_chi2 > 2.0 && rms > 1e-7 * std::abs(amplitude);
  return s;
}

// Log-linear regression on the early decay gives rate seeds:
// log(y - c0) ~ log(a) - g1*t - g2*t^2.
struct RateSeed {
  double a0 = 0.0, c0 = 0.0, g1 = 0.0, g2 = 0.0;
};

RateSeed rate_seed(const TraceView& v, bool with_gaussian) {
  RateSeed s;
  size_t n = v.y.size();
  s.c0 = (v.y[n - 1] + v.y[n - 2] + v.y[n - 3]) / 3.0;
  s.a0 = (v.y[0] + v.y[1] + v.y[2]) / 3.0 - s.c0;
  if (std::abs(s.a0) < 1e-300) return s;
  std::vector<double> ts, ls;
  for (size_t i = 0; i < n; ++i) {
    double u = (v.y[i] - s.c0) / s.a0;
    if (u > 0.05) {
      ts.push_back(v.t[i]);
      ls.push_back(std::log(u));
    }
  }
  if (ts.size() < 3) {
    s.g1 = 1.0 / std::max(v.span / 3.0, 1e-12);
    return s;
  }
  int terms = with_gaussian ? 3 : 2;
  Eigen::MatrixXd a(ts.size(), terms);
  Eigen::VectorXd b(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = -ts[i];
    if (terms == 3) a(i, 2) = -ts[i] * ts[i];
    b(i) = ls[i];
  }
  Eigen::VectorXd c = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  s.g1 = std::max(c(1), 0.0);
  if (terms == 3) s.g2 = std::max(c(2), 0.0);
  if (s.g1 <= 0.0 && s.g2 <= 0.0) s.g1 = 1.0 / std::max(v.span, 1e-12);
  return s;
}

}  // namespace

T1Fit fit_t1(const DecayTrace& trace) {
  TraceView v = view_of(trace);
  if (v.range <= 0.0) {
    throw Error(ErrorCode::no_decay, "constant trace");
  }
  RateSeed seed = rate_seed(v, false);
  double t1_0 = seed.g1 > 0.0 ? 1.0 / seed.g1 : v.span / 3.0;

  const double inf = std::numeric_limits<double>::infinity();
  LeastSquaresOptions opts;
  opts.lower = {-inf, 1e-9, -inf};
  opts.upper = {inf, inf, inf};
  opts.typical_scale = {std::max(std::abs(seed.a0), 0.1),
                        std::max(t1_0, 0.1 * v.span), 0.1};
  const size_t n = v.y.size();
  ResidualFn fn = [&](const std::vector<double>& x, std::vector<double>& r) {
    for (size_t i = 0; i < n; ++i) {
      r[i] = x[0] * std::exp(-v.t[i] / x[1]) + x[2] - v.y[i];
    }
  };
  LeastSquaresResult ls = levenberg_marquardt(
      fn, static_cast<int>(n), {seed.a0, t1_0, seed.c0}, opts);

  if (ls.x[1] > 100.0 * v.span) {
    throw Error(ErrorCode::no_decay, "fitted T1 exceeds 100x the trace span");
  }
  T1Fit out;
  out.t1_us = ls.x[1];
  out.t1_sigma_us = std::sqrt(ls.covariance(1, 1));
  out.amplitude = ls.x[0];
  out.offset = ls.x[2];
  MismatchStats ms = mismatch_stats(v, ls, 3, ls.x[0]);
  out.reduced_chi2 = ms.reduced_chi2;
  out.model_mismatch = ms.mismatch;
  return out;
}

DecayRates fit_echo(const DecayTrace& trace, bool at_sweet_spot) {
  TraceView v = view_of(trace);
  if (v.range <= 0.0) {
    throw Error(ErrorCode::no_decay, "constant trace");
  }
  RateSeed seed = rate_seed(v, !at_sweet_spot);
  const double inf = std::numeric_limits<double>::infinity();
  const size_t n = v.y.size();
  LeastSquaresResult ls;
  DecayRates out;

  if (at_sweet_spot) {
    // pure exponential, gamma_phi pinned to zero
    LeastSquaresOptions opts;
    opts.lower = {-inf, 0.0, -inf};
    opts.upper = {inf, inf, inf};
    opts.typical_scale = {std::max(std::abs(seed.a0), 0.1),
                          std::max(seed.g1, 1.0 / v.span), 0.1};
    ResidualFn fn = [&](const std::vector<double>& x, std::vector<double>& r) {
      for (size_t i = 0; i < n; ++i) {
        r[i] = x[0] * std::exp(-x[1] * v.t[i]) + x[2] - v.y[i];
      }
    };
    ls = levenberg_marquardt(fn, static_cast<int>(n),
                             {seed.a0, std::max(seed.g1, 0.1 / v.span),
                              seed.c0},
                             opts);
    out.gamma0_per_us = ls.x[1];
    out.gamma0_sigma = std::sqrt(ls.covariance(1, 1));
    out.amplitude = ls.x[0];
    out.offset = ls.x[2];
    MismatchStats ms = mismatch_stats(v, ls, 3, ls.x[0]);
    out.reduced_chi2 = ms.reduced_chi2;
    out.model_mismatch = ms.mismatch;
  } else {
    LeastSquaresOptions opts;
    opts.lower = {-inf, 0.0, 0.0, -inf};
    opts.upper = {inf, inf, inf, inf};
    opts.typical_scale = {std::max(std::abs(seed.a0), 0.1),
                          std::max(seed.g1, 0.1 / v.span),
                          std::max(std::sqrt(seed.g2), 0.1 / v.span), 0.1};
    ResidualFn fn = [&](const std::vector<double>& x, std::vector<double>& r) {
      for (size_t i = 0; i < n; ++i) {
        double gp = x[2] * v.t[i];
        r[i] = x[0] * std::exp(-x[1] * v.t[i] - gp * gp) + x[3] - v.y[i];
      }
    };
    ls = levenberg_marquardt(
        fn, static_cast<int>(n),
        {seed.a0, seed.g1, std::sqrt(std::max(seed.g2, 1e-8)), seed.c0}, opts);
    out.gamma0_per_us = ls.x[1];
    out.gamma_phi_per_us = ls.x[2];
    out.gamma0_sigma = std::sqrt(ls.covariance(1, 1));
    out.gamma_phi_sigma = std::sqrt(ls.covariance(2, 2));
    out.amplitude = ls.x[0];
    out.offset = ls.x[3];
    MismatchStats ms = mismatch_stats(v, ls, 4, ls.x[0]);
    out.reduced_chi2 = ms.reduced_chi2;
    out.model_mismatch = ms.mismatch;
  }

  // same non-decay rule as fit_t1, using the combined 1/e time
  double t_decay;
  if (out.gamma0_per_us <= 0.0 && out.gamma_phi_per_us <= 0.0) {
    throw Error(ErrorCode::no_decay, "no decay found");
  }
  t_decay = t2e_combined_us(out.gamma0_per_us, out.gamma_phi_per_us);
  if (t_decay > 100.0 * v.span) {
    throw Error(ErrorCode::no_decay,
                "fitted decay time exceeds 100x the trace span");
  }
  return out;
}

double t2e_combined_us(double gamma0_per_us, double gamma_phi_per_us) {
  if (!std::isfinite(gamma0_per_us) || !std::isfinite(gamma_phi_per_us) ||
      gamma0_per_us < 0.0 || gamma_phi_per_us < 0.0) {
    throw Error(ErrorCode::invalid_value, "rates must be finite and >= 0");
  }
  if (gamma0_per_us == 0.0 && gamma_phi_per_us == 0.0) {
    throw Error(ErrorCode::undefined_t2e, "both rates are zero");
  }
  // Conjugate form of (sqrt(g0^2+4gp^2) - g0)/(2gp^2): no cancellation for
  // any rate ratio, and both single-rate limits (1/g0, 1/gp) come out exact.
  double g0 = gamma0_per_us, gp = gamma_phi_per_us;
  return 2.0 / (g0 + std::sqrt(g0 * g0 + 4.0 * gp * gp));
}

double degradation_pct(double t2e_at_us, double t2e_sweet_us) {
  if (!(t2e_sweet_us > 0.0) || !std::isfinite(t2e_sweet_us) ||
      !std::isfinite(t2e_at_us) || t2e_at_us < 0.0) {
    throw Error(ErrorCode::invalid_value,
                "decay times must be finite, sweet-spot T2E > 0");
  }
  // (sweet - at) first: the common case of small-integer microsecond values
  // (e.g. 17 of 20) then divides exactly instead of losing an ulp to 1 - x.
  return 100.0 * (t2e_sweet_us - t2e_at_us) / t2e_sweet_us;
}

}  // namespace fluxlock
