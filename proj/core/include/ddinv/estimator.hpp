#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ddinv/hankel.hpp"
#include "ddinv/linalg.hpp"

namespace ddinv::estimator {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using hankel::HankelBundle;
using linalg::ToleranceSet;
using lti::Signal;

/// Frozen gains of the autoregressive input estimator
///   u_hat_k = M_u u_hat_{k-N:k-1} + M_y y_{k-N:k+L}
/// together with the factors needed to recover the full combination vector g
/// for diagnostics.
struct EstimatorGains {
  MatrixXd input_gain;    ///< M_u, m x mN
  MatrixXd output_gain;   ///< M_y, m x p(N+L+1)
  MatrixXd y_pinv;        ///< Y^+, (T+1) x p(N+L+1)
  MatrixXd y_null;        ///< V_null, orthonormal basis of ker Y
  MatrixXd reduced;       ///< U_{p,0} = U_p V_null
  MatrixXd reduced_pinv;  ///< U_{p,0}^+
  std::shared_ptr<const HankelBundle> data;
  ToleranceSet tolerances;
  Index y_rank = 0;
  /// Largest deviation between the nullspace-form gains and the gains built
  /// from the projector I - Y^+ Y directly.
  double projector_form_gap = 0.0;

  Index past() const { return data->past; }
  Index delay() const { return data->delay; }
  Index m() const { return data->m; }
  Index p() const { return data->p; }
  Index window_size() const { return data->p * (data->past + data->delay + 1); }
};

/// Builds the gains from offline data. Throws DegenerateDataError when Y has a
/// trivial kernel and InvalidInputError on non-finite data.
EstimatorGains build_gains(HankelBundle bundle, const ToleranceSet& tolerances = {});

struct ConstrainedSolution {
  VectorXd g;
  double residual = 0.0;             ///< |U_p g - u_hat_past|
  double constraint_residual = 0.0;  ///< |Y g - y_window|
};

/// Closed-form minimizer of |U_p g - u_hat_past|^2 s.t. Y g = y_window,
///   g = Y^+ y + P (U_p P)^+ (u_hat_past - U_p Y^+ y),  P = I - Y^+ Y,
/// computed from scratch. Infeasible windows are reported through
/// constraint_residual rather than thrown.
ConstrainedSolution solve_constrained_ls(const HankelBundle& bundle,
                                         const VectorXd& u_hat_past,
                                         const VectorXd& y_window,
                                         const ToleranceSet& tolerances = {});

/// Same minimizer via the precomputed nullspace factors in `gains`.
ConstrainedSolution solve_constrained_ls(const EstimatorGains& gains,
                                         const VectorXd& u_hat_past,
                                         const VectorXd& y_window);

/// Ring buffer holding the last N input estimates u_hat_{k-N:k-1}.
class EstimatorState {
 public:
  /// `initial` is the stacked mN-vector of guesses, oldest first.
  EstimatorState(Index m, Index past, const VectorXd& initial);
  /// Zero-initialised history.
  EstimatorState(Index m, Index past);

  /// Stacked history, oldest first.
  VectorXd stacked() const;
  /// Appends an estimate, evicting the oldest.
  void push(const VectorXd& estimate);

  Index step_index() const { return step_; }
  Index m() const { return buffer_.rows(); }
  Index past() const { return buffer_.cols(); }

 private:
  MatrixXd buffer_;  // column (head_ + i) % N is the i-th oldest estimate
  Index head_ = 0;
  Index step_ = 0;
};

/// One estimator update. `y_window` is y_{k-N:k+L}; the returned u_hat_k is
/// pushed into `state`.
VectorXd step(const EstimatorGains& gains, EstimatorState& state,
              const VectorXd& y_window);

struct EstimationTrace {
  Signal estimates;                     ///< m x K, column j estimates u_{N+j}
  std::optional<VectorXd> error_norms;  ///< |u_hat_k - u_k| when truth is known
  VectorXd residual_norms;              ///< |U_p g - u_hat_past| per step
  VectorXd constraint_residuals;        ///< |Y g - y_window| per step
  Index start_step = 0;                 ///< time index of the first estimate (N)

  Index steps() const { return estimates.cols(); }
};

/// Runs the estimator over `outputs` (p x len, len >= N+L+1) from an initial
/// guess of u_{0:N-1}. `truth`, when given, is m x len aligned with outputs.
EstimationTrace run(const EstimatorGains& gains, const VectorXd& initial_guess,
                    const Signal& outputs,
                    const std::optional<Signal>& truth = std::nullopt);

/// Block companion matrix of the error recursion eps_{k+1} = R eps_k:
/// identity super-diagonal blocks and M_u as the last block row.
MatrixXd error_matrix(const EstimatorGains& gains);

struct ConvergenceCertificate {
  MatrixXd error_matrix;
  double spectral_radius = 0.0;
  bool schur_stable = false;
  std::vector<std::complex<double>> eigenvalues;
};

/// Data-only test for stable invariant zeros: rho(R) < 1.
ConvergenceCertificate convergence_certificate(const EstimatorGains& gains);

}  // namespace ddinv::estimator
