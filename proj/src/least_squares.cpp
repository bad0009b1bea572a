#include "fluxlock/least_squares.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "fluxlock/errors.hpp"

namespace fluxlock {

namespace {

double chi2_of(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFn& fn, int n_residuals,
                                       std::vector<double> x0,
                                       const LeastSquaresOptions& opts) {
  const int k = static_cast<int>(x0.size());
  const int n = n_residuals;
  if (k < 1 || n < 1) {
    throw Error(ErrorCode::invalid_value, "empty parameter or residual vector");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lower(k, -inf), upper(k, inf), typical(k, 1.0);
  if (!opts.lower.empty()) lower = opts.lower;
  if (!opts.upper.empty()) upper = opts.upper;
  if (!opts.typical_scale.empty()) typical = opts.typical_scale;
  if (static_cast<int>(lower.size()) != k ||
      static_cast<int>(upper.size()) != k ||
      static_cast<int>(typical.size()) != k) {
    throw Error(ErrorCode::invalid_value, "bound/scale size mismatch");
  }

  auto clamp = [&](std::vector<double>& x) {
    for (int j = 0; j < k; ++j) x[j] = std::min(std::max(x[j], lower[j]), upper[j]);
  };

  std::vector<double> x = std::move(x0);
  clamp(x);
  std::vector<double> r(n), r_try(n), x_try(k), x_probe(k);
  fn(x, r);
  double chi2 = chi2_of(r);
  if (!std::isfinite(chi2)) {
    throw Error(ErrorCode::fit_failed, "non-finite residuals at start point");
  }

  LeastSquaresResult result;
  result.chi2_trace.push_back(chi2);

  Eigen::MatrixXd jac(n, k);
  auto fill_jacobian = [&](const std::vector<double>& xc,
                           const std::vector<double>& rc) {
    for (int j = 0; j < k; ++j) {
      double step =
          opts.jacobian_rel_step * std::max(std::abs(xc[j]), typical[j]);
      if (step <= 0.0) step = opts.jacobian_rel_step;
      x_probe = xc;
      if (xc[j] + step > upper[j]) step = -step;  // stay inside the box
      x_probe[j] = xc[j] + step;
      fn(x_probe, r_try);
      double inv = 1.0 / (x_probe[j] - xc[j]);
      for (int i = 0; i < n; ++i) jac(i, j) = (r_try[i] - rc[i]) * inv;
    }
  };

  double lambda = opts.lambda0;
  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= opts.max_iterations && !converged; ++iter) {
    fill_jacobian(x, r);
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
    Eigen::VectorXd g = jac.transpose() * rv;
    Eigen::MatrixXd a = jac.transpose() * jac;

    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::MatrixXd damped = a;
      for (int j = 0; j < k; ++j) {
        damped(j, j) += lambda * std::max(a(j, j), 1e-12);
      }
      Eigen::VectorXd delta = damped.ldlt().solve(-g);
      for (int j = 0; j < k; ++j) x_try[j] = x[j] + delta(j);
      clamp(x_try);
      fn(x_try, r_try);
      double chi2_try = chi2_of(r_try);
      if (std::isfinite(chi2_try) && chi2_try <= chi2) {
        double improvement = (chi2 - chi2_try) / std::max(chi2, 1e-300);
        double step2 = 0.0, size2 = 0.0;
        for (int j = 0; j < k; ++j) {
          double d = x_try[j] - x[j];
          double s = std::max(std::abs(x[j]), typical[j]);
          step2 += d * d;
          size2 += s * s;
        }
        x = x_try;
        r = r_try;
        chi2 = chi2_try;
        result.chi2_trace.push_back(chi2);
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (improvement < opts.ftol || std::sqrt(step2 / size2) < opts.xtol) {
          converged = true;
        }
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) {
      // No downhill direction left at any damping: numerically at a minimum.
      converged = true;
    }
  }

  // Covariance from the Jacobian at the solution, rank-deficient directions
  // floored so unidentifiable parameters report huge (not zero) variance.
  fill_jacobian(x, r);
  Eigen::MatrixXd a = jac.transpose() * jac;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  double eig_max = es.eigenvalues().maxCoeff();
  double cutoff = std::max(eig_max, 1e-300) * 1e-14;
  Eigen::VectorXd inv_eig(k);
  for (int j = 0; j < k; ++j) {
    inv_eig(j) = 1.0 / std::max(es.eigenvalues()(j), cutoff);
  }
  int dof = std::max(n - k, 1);
  Eigen::MatrixXd cov = es.eigenvectors() * inv_eig.asDiagonal() *
                        es.eigenvectors().transpose() * (chi2 / dof);
  result.covariance = 0.5 * (cov + cov.transpose());

  result.x = x;
  result.residuals = r;
  result.chi2 = chi2;
  result.iterations = iter - 1;
  result.converged = converged;
  for (int j = 0; j < k; ++j) {
    double span = std::max(std::abs(x[j]), typical[j]);
    if ((std::isfinite(lower[j]) && x[j] - lower[j] < 1e-12 * span) ||
        (std::isfinite(upper[j]) && upper[j] - x[j] < 1e-12 * span)) {
      result.at_bound = true;
    }
  }
  return result;
}

}  // namespace fluxlock
