#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace fluxlock {

// Small Levenberg-Marquardt engine with box constraints and forward-difference
// Jacobians.  The residual callback fills r (length n_residuals) for a given
// parameter vector x; weighting is the caller's job.
struct LeastSquaresOptions {
  int max_iterations = 200;
  double ftol = 1e-12;        // relative chi2 improvement
  double xtol = 1e-12;        // relative step size
  double jacobian_rel_step = 1e-6;
  double lambda0 = 1e-3;
  std::vector<double> lower;  // empty = unbounded
  std::vector<double> upper;
  std::vector<double> typical_scale;  // per-parameter magnitude floor for steps
};

struct LeastSquaresResult {
  std::vector<double> x;
  Eigen::MatrixXd covariance;       // (J^T J)^-1 * chi2/(n-k), symmetric PSD
  std::vector<double> residuals;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
  bool at_bound = false;
  std::vector<double> chi2_trace;   // accepted chi2 per iteration, seed first
};

using ResidualFn =
    std::function<void(const std::vector<double>& x, std::vector<double>& r)>;

LeastSquaresResult levenberg_marquardt(const ResidualFn& fn, int n_residuals,
                                       std::vector<double> x0,
                                       const LeastSquaresOptions& opts = {});

}  // namespace fluxlock
