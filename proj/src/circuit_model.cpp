#include "fluxlock/circuit_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "fluxlock/constants.hpp"
#include "fluxlock/errors.hpp"

namespace fluxlock {

void EnergyParams::validate() const {
  if (!std::isfinite(e_j_ghz) || !std::isfinite(e_c_ghz) ||
      !std::isfinite(e_l_ghz)) {
    throw Error(ErrorCode::invalid_parameters,
                "circuit energies must be finite");
  }
  // e_j may be zero (harmonic limit); the charging and inductive scales set
  // the basis and must be strictly positive.
  if (e_j_ghz < 0.0 || e_c_ghz <= 0.0 || e_l_ghz <= 0.0) {
    throw Error(ErrorCode::invalid_parameters,
                "require e_j >= 0, e_c > 0, e_l > 0");
  }
}

double EnergyParams::plasma_frequency_ghz() const {
  return std::sqrt(8.0 * e_c_ghz * e_l_ghz);
}

double EnergyParams::phi_zpf() const {
  return std::pow(8.0 * e_c_ghz / e_l_ghz, 0.25);
}

double PhaseBias::delta_rad() const {
  return 2.0 * std::numbers::pi * phi_tot_phi0;
}

double SpectralResult::transition_ghz(int lower, int upper) const {
  if (lower < 0 || upper <= lower ||
      upper >= static_cast<int>(levels_ghz.size())) {
    throw Error(ErrorCode::invalid_value, "transition indices out of range");
  }
  return levels_ghz[upper] - levels_ghz[lower];
}

namespace {

void check_bias(const PhaseBias& bias) {
  if (!std::isfinite(bias.phi_tot_phi0)) {
    throw Error(ErrorCode::invalid_parameters, "flux bias must be finite");
  }
}

// Eigendecomposition of the dimensionless ladder operator X = a + a^dag,
// truncated to `dim`.  X is parameter-free, so this is computed once per
// basis size and cached: in the X eigenbasis the phase operator is diagonal
// and a Hamiltonian build is O(dim^2) with no matrix cosine.
struct LadderBasis {
  Eigen::VectorXd lambda;    // eigenvalues of X, ascending
  Eigen::MatrixXd vectors;   // columns = eigenvectors (number basis)
  Eigen::MatrixXd number_t;  // V^T diag(k + 1/2) V
};

const LadderBasis& ladder_basis(int dim) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const LadderBasis>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(dim);
  if (it == cache.end()) {
    // X is already tridiagonal (zero diagonal, sqrt(k+1) off-diagonal)
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd subdiag(dim - 1);
    for (int k = 0; k + 1 < dim; ++k) {
      subdiag(k) = std::sqrt(static_cast<double>(k + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
    auto basis = std::make_unique<LadderBasis>();
    basis->lambda = es.eigenvalues();
    basis->vectors = es.eigenvectors();
    Eigen::VectorXd n_half(dim);
    for (int k = 0; k < dim; ++k) n_half(k) = k + 0.5;
    Eigen::MatrixXd t =
        basis->vectors.transpose() * n_half.asDiagonal() * basis->vectors;
    basis->number_t = 0.5 * (t + t.transpose());
    it = cache.emplace(dim, std::move(basis)).first;
  }
  return *it->second;
}

// Hamiltonian expressed in the X eigenbasis (same spectrum as the number
// basis; unitary change of basis).
Eigen::MatrixXd hamiltonian_in_ladder_basis(const EnergyParams& params,
                                            PhaseBias bias, int dim) {
  const LadderBasis& basis = ladder_basis(dim);
  const double fp = params.plasma_frequency_ghz();
  const double c = params.phi_zpf() / std::numbers::sqrt2;
  const double delta = bias.delta_rad();
  Eigen::MatrixXd h = fp * basis.number_t;
  const double quad = 0.5 * params.e_l_ghz * delta * delta;
  for (int i = 0; i < dim; ++i) {
    double phi = c * basis.lambda(i);
    h(i, i) += params.e_l_ghz * delta * phi + quad -
               params.e_j_ghz * std::cos(phi);
  }
  return h;
}

std::vector<double> lowest_levels(const EnergyParams& params, PhaseBias bias,
                                  int dim, int n_levels, bool absolute) {
  Eigen::MatrixXd h = hamiltonian_in_ladder_basis(params, bias, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h,
                                                    Eigen::EigenvaluesOnly);
  int n = std::min(n_levels, dim);
  std::vector<double> levels(n);
  double ground = es.eigenvalues()(0);
  for (int k = 0; k < n; ++k) {
    levels[k] = es.eigenvalues()(k) - (absolute ? 0.0 : ground);
  }
  return levels;
}

}  // namespace

Eigen::MatrixXd build_hamiltonian(const EnergyParams& params, PhaseBias bias,
                                  int dim) {
  params.validate();
  check_bias(bias);
  if (dim < 4) {
    throw Error(ErrorCode::invalid_dimension, "basis size must be >= 4");
  }
  const LadderBasis& basis = ladder_basis(dim);
  const double fp = params.plasma_frequency_ghz();
  const double c = params.phi_zpf() / std::numbers::sqrt2;
  const double delta = bias.delta_rad();

  // cos(phi) from the spectral decomposition of the truncated phase operator
  Eigen::VectorXd cos_d(dim);
  for (int i = 0; i < dim; ++i) cos_d(i) = std::cos(c * basis.lambda(i));
  Eigen::MatrixXd cos_phi =
      basis.vectors * cos_d.asDiagonal() * basis.vectors.transpose();

  Eigen::MatrixXd h = -params.e_j_ghz * cos_phi;
  const double quad = 0.5 * params.e_l_ghz * delta * delta;
  for (int k = 0; k < dim; ++k) h(k, k) += fp * (k + 0.5) + quad;
  const double lin = params.e_l_ghz * delta * c;
  for (int k = 0; k + 1 < dim; ++k) {
    double x = lin * std::sqrt(static_cast<double>(k + 1));
    h(k, k + 1) += x;
    h(k + 1, k) += x;
  }
  return 0.5 * (h + h.transpose().eval());
}

std::vector<double> eigenlevels_fixed(const EnergyParams& params,
                                      PhaseBias bias, int dim, int n_levels,
                                      bool absolute_levels) {
  params.validate();
  check_bias(bias);
  if (dim < 4 || n_levels < 1) {
    throw Error(ErrorCode::invalid_dimension,
                "basis size must be >= 4 and n_levels >= 1");
  }
  return lowest_levels(params, bias, dim, n_levels, absolute_levels);
}

SpectralResult eigenlevels(const EnergyParams& params, PhaseBias bias,
                           const EigenOptions& opts) {
  params.validate();
  check_bias(bias);
  if (opts.start_dim < 4 || opts.max_dim < opts.start_dim) {
    throw Error(ErrorCode::invalid_dimension, "bad start_dim/max_dim");
  }
  if (opts.n_levels < 1 || !(opts.tolerance > 0.0)) {
    throw Error(ErrorCode::invalid_value, "bad n_levels/tolerance");
  }

  const int want = std::max(opts.n_levels, 2);
  SpectralResult out;
  double prev_f01 = std::numeric_limits<double>::quiet_NaN();
  int dim = opts.start_dim;
  while (true) {
    std::vector<double> levels = lowest_levels(params, bias, dim, want, true);
    double f01 = levels[1] - levels[0];
    out.levels_ghz = std::move(levels);
    out.dim_used = dim;
    if (!std::isnan(prev_f01)) {
      out.residual =
          std::abs(f01 - prev_f01) / std::max(std::abs(f01), 1e-300);
      if (out.residual < opts.tolerance) {
        out.converged = true;
        break;
      }
    }
    prev_f01 = f01;
    if (dim >= opts.max_dim) break;  // converged stays false
    dim = std::min(2 * dim, opts.max_dim);
  }

  if (!opts.absolute_levels) {
    double ground = out.levels_ghz[0];
    for (double& v : out.levels_ghz) v -= ground;
  }
  if (static_cast<int>(out.levels_ghz.size()) > opts.n_levels &&
      opts.n_levels >= 2) {
    out.levels_ghz.resize(opts.n_levels);
  }
  return out;
}

namespace {

double require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw Error(ErrorCode::invalid_value,
                std::string(what) + " must be positive and finite");
  }
  return v;
}

}  // namespace

double capacitance_ff_to_ec_ghz(double c_ff) {
  require_positive(c_ff, "capacitance");
  double c_farad = c_ff * 1e-15;
  return kElectronChargeC * kElectronChargeC / (2.0 * kPlanckJs * c_farad) /
         1e9;
}

double ec_ghz_to_capacitance_ff(double ec_ghz) {
  require_positive(ec_ghz, "charging energy");
  return kElectronChargeC * kElectronChargeC /
         (2.0 * kPlanckJs * ec_ghz * 1e9) / 1e-15;
}

double inductance_nh_to_el_ghz(double l_nh) {
  require_positive(l_nh, "inductance");
  double phi0_over_2pi = kFluxQuantumWb / (2.0 * std::numbers::pi);
  return phi0_over_2pi * phi0_over_2pi / (kPlanckJs * l_nh * 1e-9) / 1e9;
}

double el_ghz_to_inductance_nh(double el_ghz) {
  require_positive(el_ghz, "inductive energy");
  double phi0_over_2pi = kFluxQuantumWb / (2.0 * std::numbers::pi);
  return phi0_over_2pi * phi0_over_2pi / (kPlanckJs * el_ghz * 1e9) / 1e-9;
}

double inductance_nh_to_squares(double l_nh, double sheet_inductance_nh) {
  require_positive(l_nh, "inductance");
  require_positive(sheet_inductance_nh, "sheet inductance");
  return l_nh / sheet_inductance_nh;
}

double squares_to_inductance_nh(double squares, double sheet_inductance_nh) {
  require_positive(squares, "square count");
  require_positive(sheet_inductance_nh, "sheet inductance");
  return squares * sheet_inductance_nh;
}

}  // namespace fluxlock
