#include "ddinv/lti.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "ddinv/errors.hpp"

namespace ddinv::lti {
namespace {

using Eigen::MatrixXcd;

std::string shape(const MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Column-stacks samples k .. k+count-1 of a signal.
VectorXd window(const Signal& s, Index k, Index count) {
  return s.middleCols(k, count).reshaped();
}

MatrixXd selector(Index m, Index delay) {
  MatrixXd e = MatrixXd::Zero(m, (delay + 1) * m);
  e.leftCols(m).setIdentity();
  return e;
}

void require_delay(Index delay) {
  if (delay < 0) throw InvalidInputError("delay L must be >= 0");
}

MatrixXcd rosenbrock(const StateSpaceModel& model, std::complex<double> z) {
  const Index n = model.n();
  MatrixXcd r(n + model.p(), n + model.m());
  r.topLeftCorner(n, n) = model.A().cast<std::complex<double>>();
  r.topLeftCorner(n, n).diagonal().array() -= z;
  r.topRightCorner(n, model.m()) = model.B().cast<std::complex<double>>();
  r.bottomLeftCorner(model.p(), n) = model.C().cast<std::complex<double>>();
  r.bottomRightCorner(model.p(), model.m()) = model.D().cast<std::complex<double>>();
  return r;
}

Eigen::VectorXd rosenbrock_singular_values(const StateSpaceModel& model,
                                           std::complex<double> z) {
  Eigen::JacobiSVD<MatrixXcd> svd(rosenbrock(model, z));
  return svd.singularValues();
}

}  // namespace

StateSpaceModel::StateSpaceModel(MatrixXd a, MatrixXd b, MatrixXd c, MatrixXd d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const Index n = a_.rows();
  if (n == 0 || a_.cols() != n) {
    throw InvalidInputError("A must be square and non-empty, got " + shape(a_));
  }
  if (b_.rows() != n || b_.cols() == 0) {
    throw InvalidInputError("B must be n x m with m > 0, got " + shape(b_));
  }
  if (c_.cols() != n || c_.rows() == 0) {
    throw InvalidInputError("C must be p x n with p > 0, got " + shape(c_));
  }
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) {
    throw InvalidInputError("D must be p x m, got " + shape(d_));
  }
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !d_.allFinite()) {
    throw InvalidInputError("state-space matrices have non-finite entries");
  }
}

Trajectory simulate(const StateSpaceModel& model, const VectorXd& x0,
                    const Signal& inputs) {
  if (x0.size() != model.n()) {
    throw InvalidInputError("simulate: x0 has length " + std::to_string(x0.size()) +
                            ", expected " + std::to_string(model.n()));
  }
  if (inputs.rows() != model.m()) {
    throw InvalidInputError("simulate: inputs have " + std::to_string(inputs.rows()) +
                            " channels, expected " + std::to_string(model.m()));
  }
  const Index len = inputs.cols();
  Trajectory traj{inputs, Signal(model.p(), len), Signal(model.n(), len)};
  VectorXd x = x0;
  for (Index k = 0; k < len; ++k) {
    traj.states->col(k) = x;
    traj.outputs.col(k) = model.C() * x + model.D() * inputs.col(k);
    x = model.A() * x + model.B() * inputs.col(k);
  }
  return traj;
}

MatrixXd observability_matrix(const StateSpaceModel& model, Index delay) {
  require_delay(delay);
  const Index p = model.p();
  MatrixXd obs((delay + 1) * p, model.n());
  obs.topRows(p) = model.C();
  for (Index i = 1; i <= delay; ++i) {
    obs.middleRows(i * p, p) = obs.middleRows((i - 1) * p, p) * model.A();
  }
  return obs;
}

MatrixXd invertibility_matrix(const StateSpaceModel& model, Index delay) {
  require_delay(delay);
  const Index p = model.p();
  const Index m = model.m();
  // markov[i] = C A^{i-1} B for i >= 1, markov[0] = D.
  std::vector<MatrixXd> markov(delay + 1);
  markov[0] = model.D();
  MatrixXd ca = model.C();
  for (Index i = 1; i <= delay; ++i) {
    markov[i] = ca * model.B();
    ca = ca * model.A();
  }
  MatrixXd inv = MatrixXd::Zero((delay + 1) * p, (delay + 1) * m);
  for (Index i = 0; i <= delay; ++i) {
    for (Index j = 0; j <= i; ++j) {
      inv.block(i * p, j * m, p, m) = markov[i - j];
    }
  }
  return inv;
}

bool stacked_output_identity_holds(const Trajectory& traj, const MatrixXd& obs,
                                   const MatrixXd& inv, Index delay) {
  require_delay(delay);
  if (!traj.states) {
    throw InvalidInputError("stacked output identity needs recorded states");
  }
  const Index len = traj.length();
  const Index p = traj.outputs.rows();
  const Index m = traj.inputs.rows();
  if (obs.rows() != (delay + 1) * p || inv.rows() != (delay + 1) * p ||
      inv.cols() != (delay + 1) * m || obs.cols() != traj.states->rows()) {
    throw InvalidInputError("stacked output identity: dimension mismatch");
  }
  if (len < delay + 1) {
    throw InvalidInputError("stacked output identity: trajectory shorter than L+1");
  }
  for (Index k = 0; k + delay < len; ++k) {
    const VectorXd y = window(traj.outputs, k, delay + 1);
    const VectorXd predicted =
        obs * traj.states->col(k) + inv * window(traj.inputs, k, delay + 1);
    if ((y - predicted).norm() > 1e-10 * std::max(1.0, y.norm())) return false;
  }
  return true;
}

bool stacked_output_identity_check(const StateSpaceModel& model,
                                   const VectorXd& x0, const Signal& inputs,
                                   Index delay) {
  return stacked_output_identity_holds(simulate(model, x0, inputs),
                                       observability_matrix(model, delay),
                                       invertibility_matrix(model, delay), delay);
}

double rosenbrock_rank_gap(const StateSpaceModel& model, std::complex<double> z) {
  const Eigen::VectorXd sv = rosenbrock_singular_values(model, z);
  return sv(sv.size() - 1) / sv(0);
}

bool rosenbrock_rank_drops(const StateSpaceModel& model, std::complex<double> z,
                           double rank_tol) {
  const Eigen::VectorXd sv = rosenbrock_singular_values(model, z);
  return sv(sv.size() - 1) <= rank_tol;
}

std::vector<std::complex<double>> invariant_zeros(const StateSpaceModel& model,
                                                  const ZeroOptions& opts) {
  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  if (p < m) {
    throw UnsupportedShapeError("invariant_zeros: requires p >= m, got p=" +
                                std::to_string(p) + ", m=" + std::to_string(m));
  }

  MatrixXd pencil(n + p, n + m);
  pencil << model.A(), model.B(), model.C(), model.D();
  MatrixXd mass = MatrixXd::Zero(n + p, n + m);
  mass.topLeftCorner(n, n).setIdentity();

  if (p > m) {
    // Row compression onto the range of the pencil's constant part. Every
    // finite zero of the tall pencil is a generalized eigenvalue of the
    // compressed one; spurious candidates are removed by the rank test below.
    Eigen::HouseholderQR<MatrixXd> qr(pencil);
    const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n + p, n + m);
    pencil = q.transpose() * pencil;
    mass = q.transpose() * mass;
  }

  Eigen::GeneralizedEigenSolver<MatrixXd> ges(pencil, mass,
                                              /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success) {
    throw InvalidInputError("invariant_zeros: QZ iteration did not converge");
  }

  std::vector<std::complex<double>> zeros;
  const auto& alphas = ges.alphas();
  const auto& betas = ges.betas();
  for (Index i = 0; i < alphas.size(); ++i) {
    const std::complex<double> z = alphas(i) / betas(i);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
    if (std::abs(z) > opts.cap) continue;
    if (p > m && !rosenbrock_rank_drops(model, z, opts.rank_tol)) continue;
    zeros.push_back(z);
  }
  std::sort(zeros.begin(), zeros.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return zeros;
}

std::optional<Index> inherent_delay(const StateSpaceModel& model,
                                    std::optional<Index> max_delay,
                                    double rank_tol) {
  const Index limit = max_delay.value_or(model.n());
  const Index m = model.m();
  for (Index delay = 0; delay <= limit; ++delay) {
    const MatrixXd inv = invertibility_matrix(model, delay);
    MatrixXd stacked(inv.rows() + m, inv.cols());
    stacked << inv, selector(m, delay);
    if (linalg::numerical_rank(stacked, rank_tol) ==
        linalg::numerical_rank(inv, rank_tol)) {
      return delay;
    }
  }
  return std::nullopt;
}

MatrixXd left_inverse_gain(const StateSpaceModel& model, Index delay,
                           double rank_tol) {
  const MatrixXd inv = invertibility_matrix(model, delay);
  const MatrixXd target = selector(model.m(), delay);
  const MatrixXd gain = target * linalg::truncated_pinv(inv, rank_tol);
  const double residual = (gain * inv - target).norm();
  if (residual > 1e-8) {
    throw NoLeftInverseError("no " + std::to_string(delay) +
                                 "-delay left inverse (residual " +
                                 std::to_string(residual) + ")",
                             residual);
  }
  return gain;
}

MatrixXd state_free_inverse_gain(const StateSpaceModel& model, Index delay,
                                 double rank_tol) {
  const MatrixXd obs = observability_matrix(model, delay);
  const MatrixXd inv = invertibility_matrix(model, delay);
  MatrixXd stacked(obs.rows(), obs.cols() + inv.cols());
  stacked << obs, inv;
  MatrixXd target = MatrixXd::Zero(model.m(), stacked.cols());
  target.rightCols(inv.cols()) = selector(model.m(), delay);
  const MatrixXd gain = target * linalg::truncated_pinv(stacked, rank_tol);
  const double residual = (gain * stacked - target).norm();
  if (residual > 1e-8) {
    throw NoLeftInverseError("no state-free " + std::to_string(delay) +
                                 "-delay inverse (residual " +
                                 std::to_string(residual) + ")",
                             residual);
  }
  return gain;
}

InverseSystem inverse_system(const StateSpaceModel& model, const MatrixXd& gain,
                             Index delay) {
  const MatrixXd inv = invertibility_matrix(model, delay);
  if (gain.rows() != model.m() || gain.cols() != inv.rows()) {
    throw InvalidInputError("inverse_system: P must be " + std::to_string(model.m()) +
                            "x" + std::to_string(inv.rows()) + ", got " + shape(gain));
  }
  const double residual = (gain * inv - selector(model.m(), delay)).norm();
  if (residual > 1e-8) {
    throw InvalidGainError("inverse_system: P * I_L != [I 0] (residual " +
                               std::to_string(residual) + ")",
                           residual);
  }
  const MatrixXd p_obs = gain * observability_matrix(model, delay);
  return InverseSystem{model.A() - model.B() * p_obs, model.B() * gain, -p_obs,
                       gain, delay};
}

Signal model_based_reconstruct(const InverseSystem& inv, const VectorXd& x0_hat,
                               const Signal& outputs) {
  const Index window_len = inv.delay + 1;
  if (x0_hat.size() != inv.a.rows()) {
    throw InvalidInputError("model_based_reconstruct: x0_hat has wrong length");
  }
  if (outputs.rows() * window_len != inv.b.cols()) {
    throw InvalidInputError("model_based_reconstruct: output dimension mismatch");
  }
  if (outputs.cols() < window_len) {
    throw InvalidInputError("model_based_reconstruct: need at least L+1 outputs");
  }
  const Index count = outputs.cols() - inv.delay;
  Signal estimates(inv.c.rows(), count);
  VectorXd x = x0_hat;
  for (Index k = 0; k < count; ++k) {
    const VectorXd y = window(outputs, k, window_len);
    estimates.col(k) = inv.c * x + inv.d * y;
    x = inv.a * x + inv.b * y;
  }
  return estimates;
}

bool strong_observability_check(const StateSpaceModel& model,
                                std::optional<Index> max_delay, double rank_tol) {
  const Index limit = max_delay.value_or(model.n());
  for (Index delay = 0; delay <= limit; ++delay) {
    const MatrixXd obs = observability_matrix(model, delay);
    const MatrixXd inv = invertibility_matrix(model, delay);
    MatrixXd stacked(obs.rows(), obs.cols() + inv.cols());
    stacked << obs, inv;
    if (linalg::numerical_rank(stacked, rank_tol) ==
        model.n() + linalg::numerical_rank(inv, rank_tol)) {
      return true;
    }
  }
  return false;
}

ZeroClassification classify_zeros(const StateSpaceModel& model, double margin,
                                  const ZeroOptions& opts) {
  ZeroClassification out;
  out.zeros = invariant_zeros(model, opts);
  for (const auto& z : out.zeros) out.max_modulus = std::max(out.max_modulus, std::abs(z));
  if (out.zeros.empty()) {
    out.category = ZeroCategory::NoZeros;
  } else if (out.max_modulus < 1.0 - margin) {
    out.category = ZeroCategory::AllStable;
  } else {
    out.category = ZeroCategory::MarginalOrUnstable;
  }
  return out;
}

bool is_controllable(const StateSpaceModel& model, double rank_tol) {
  const Index n = model.n();
  const Index m = model.m();
  MatrixXd ctrb(n, n * m);
  ctrb.leftCols(m) = model.B();
  for (Index i = 1; i < n; ++i) {
    ctrb.middleCols(i * m, m) = model.A() * ctrb.middleCols((i - 1) * m, m);
  }
  return linalg::numerical_rank(ctrb, rank_tol) == n;
}

bool is_observable(const StateSpaceModel& model, double rank_tol) {
  return linalg::numerical_rank(observability_matrix(model, model.n() - 1),
                                rank_tol) == model.n();
}

}  // namespace ddinv::lti
