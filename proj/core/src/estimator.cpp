#include "ddinv/estimator.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SVD>

#include "ddinv/errors.hpp"

namespace ddinv::estimator {
namespace {

void require_size(const VectorXd& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw InvalidInputError(std::string(what) + " has length " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(expected));
  }
}

void require_finite(const HankelBundle& b) {
  if (!b.u_past.allFinite() || !b.u_current.allFinite() || !b.y_all.allFinite()) {
    throw InvalidInputError("build_gains: offline data has non-finite entries");
  }
}

}  // namespace

EstimatorGains build_gains(HankelBundle bundle, const ToleranceSet& tolerances) {
  tolerances.validate();
  require_finite(bundle);
  const MatrixXd& y = bundle.y_all;
  const MatrixXd& u_past = bundle.u_past;
  const MatrixXd& u_current = bundle.u_current;
  if (y.cols() != u_past.cols() || y.rows() == 0) {
    throw InvalidInputError("build_gains: inconsistent Hankel bundle");
  }

  EstimatorGains gains;
  gains.tolerances = tolerances;

  // Y = U S V^T split into range columns V_r and kernel columns V_null.
  Eigen::BDCSVD<MatrixXd> svd(y, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Index rank = static_cast<Index>((sv.array() > tolerances.y_trunc).count());
  gains.y_rank = rank;
  gains.y_pinv = svd.matrixV().leftCols(rank) *
                 sv.head(rank).cwiseInverse().asDiagonal() *
                 svd.matrixU().leftCols(rank).transpose();
  gains.y_null = svd.matrixV().rightCols(y.cols() - rank);
  if (gains.y_null.cols() == 0) {
    throw DegenerateDataError(
        "build_gains: output Hankel matrix has a trivial kernel; record more data");
  }

  gains.reduced = u_past * gains.y_null;
  gains.reduced_pinv = linalg::truncated_pinv(gains.reduced, tolerances.ls_trunc);
  gains.input_gain = u_current * gains.y_null * gains.reduced_pinv;
  const MatrixXd past_fit = u_past * gains.y_pinv;
  gains.output_gain = u_current * gains.y_pinv - gains.input_gain * past_fit;

  // Cross-check against the projector form of the same gains.
  const MatrixXd proj = MatrixXd::Identity(y.cols(), y.cols()) - gains.y_pinv * y;
  const MatrixXd proj_pinv =
      linalg::truncated_pinv(u_past * proj, tolerances.ls_trunc);
  const MatrixXd input_gain_proj = u_current * proj * proj_pinv;
  const MatrixXd output_gain_proj =
      u_current * (gains.y_pinv - proj * proj_pinv * past_fit);
  gains.projector_form_gap =
      std::max((gains.input_gain - input_gain_proj).cwiseAbs().maxCoeff(),
               (gains.output_gain - output_gain_proj).cwiseAbs().maxCoeff());

  gains.data = std::make_shared<const HankelBundle>(std::move(bundle));
  return gains;
}

ConstrainedSolution solve_constrained_ls(const HankelBundle& bundle,
                                         const VectorXd& u_hat_past,
                                         const VectorXd& y_window,
                                         const ToleranceSet& tolerances) {
  require_size(u_hat_past, bundle.u_past.rows(), "u_hat_past");
  require_size(y_window, bundle.y_all.rows(), "y_window");
  const MatrixXd& y = bundle.y_all;
  const MatrixXd y_pinv = linalg::truncated_pinv(y, tolerances.y_trunc);
  const MatrixXd proj = MatrixXd::Identity(y.cols(), y.cols()) - y_pinv * y;
  const MatrixXd proj_pinv =
      linalg::truncated_pinv(bundle.u_past * proj, tolerances.ls_trunc);

  const VectorXd particular = y_pinv * y_window;
  ConstrainedSolution out;
  out.g = particular + proj * (proj_pinv * (u_hat_past - bundle.u_past * particular));
  out.residual = (bundle.u_past * out.g - u_hat_past).norm();
  out.constraint_residual = (y * out.g - y_window).norm();
  return out;
}

ConstrainedSolution solve_constrained_ls(const EstimatorGains& gains,
                                         const VectorXd& u_hat_past,
                                         const VectorXd& y_window) {
  const HankelBundle& data = *gains.data;
  require_size(u_hat_past, data.u_past.rows(), "u_hat_past");
  require_size(y_window, data.y_all.rows(), "y_window");
  const VectorXd particular = gains.y_pinv * y_window;
  const VectorXd coeffs =
      gains.reduced_pinv * (u_hat_past - data.u_past * particular);

  ConstrainedSolution out;
  out.g = particular + gains.y_null * coeffs;
  out.residual = (data.u_past * out.g - u_hat_past).norm();
  out.constraint_residual = (data.y_all * out.g - y_window).norm();
  return out;
}

EstimatorState::EstimatorState(Index m, Index past, const VectorXd& initial)
    : buffer_(m, past) {
  if (m < 1 || past < 1) {
    throw InvalidInputError("EstimatorState: m and N must be >= 1");
  }
  require_size(initial, m * past, "initial guess");
  buffer_ = initial.reshaped(m, past);
}

EstimatorState::EstimatorState(Index m, Index past)
    : EstimatorState(m, past, VectorXd::Zero(m * past)) {}

VectorXd EstimatorState::stacked() const {
  const Index m = buffer_.rows();
  const Index n = buffer_.cols();
  VectorXd out(m * n);
  for (Index i = 0; i < n; ++i) {
    out.segment(i * m, m) = buffer_.col((head_ + i) % n);
  }
  return out;
}

void EstimatorState::push(const VectorXd& estimate) {
  require_size(estimate, buffer_.rows(), "estimate");
  buffer_.col(head_) = estimate;
  head_ = (head_ + 1) % buffer_.cols();
  ++step_;
}

VectorXd step(const EstimatorGains& gains, EstimatorState& state,
              const VectorXd& y_window) {
  require_size(y_window, gains.window_size(), "y_window");
  if (state.m() != gains.m() || state.past() != gains.past()) {
    throw InvalidInputError("step: estimator state does not match gains");
  }
  VectorXd estimate = gains.input_gain * state.stacked() + gains.output_gain * y_window;
  state.push(estimate);
  return estimate;
}

EstimationTrace run(const EstimatorGains& gains, const VectorXd& initial_guess,
                    const Signal& outputs, const std::optional<Signal>& truth) {
  const Index past = gains.past();
  const Index delay = gains.delay();
  const Index span = past + delay + 1;
  if (outputs.rows() != gains.p()) {
    throw InvalidInputError("run: outputs have " + std::to_string(outputs.rows()) +
                            " channels, expected " + std::to_string(gains.p()));
  }
  if (outputs.cols() < span) {
    throw InvalidInputError("run: need at least N+L+1 = " + std::to_string(span) +
                            " output samples, got " + std::to_string(outputs.cols()));
  }
  if (truth && (truth->rows() != gains.m() || truth->cols() != outputs.cols())) {
    throw InvalidInputError("run: truth must be m x len(outputs)");
  }

  EstimatorState state(gains.m(), past, initial_guess);
  const Index count = outputs.cols() - span + 1;
  EstimationTrace trace;
  trace.start_step = past;
  trace.estimates.resize(gains.m(), count);
  trace.residual_norms.resize(count);
  trace.constraint_residuals.resize(count);
  if (truth) trace.error_norms = VectorXd(count);

  for (Index j = 0; j < count; ++j) {
    const VectorXd y_window = outputs.middleCols(j, span).reshaped();
    const ConstrainedSolution diag = solve_constrained_ls(gains, state.stacked(), y_window);
    trace.residual_norms(j) = diag.residual;
    trace.constraint_residuals(j) = diag.constraint_residual;
    trace.estimates.col(j) = step(gains, state, y_window);
    if (truth) {
      (*trace.error_norms)(j) = (trace.estimates.col(j) - truth->col(past + j)).norm();
    }
  }
  return trace;
}

MatrixXd error_matrix(const EstimatorGains& gains) {
  const Index m = gains.m();
  const Index dim = m * gains.past();
  MatrixXd r = MatrixXd::Zero(dim, dim);
  if (dim > m) r.topRightCorner(dim - m, dim - m).setIdentity();
  r.bottomRows(m) = gains.input_gain;
  return r;
}

ConvergenceCertificate convergence_certificate(const EstimatorGains& gains) {
  ConvergenceCertificate cert;
  cert.error_matrix = error_matrix(gains);
  cert.eigenvalues = linalg::eigenvalues(cert.error_matrix);
  for (const auto& z : cert.eigenvalues) {
    cert.spectral_radius = std::max(cert.spectral_radius, std::abs(z));
  }
  cert.schur_stable = cert.spectral_radius < 1.0;
  return cert;
}

}  // namespace ddinv::estimator
