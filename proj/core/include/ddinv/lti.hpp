#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ddinv/linalg.hpp"

namespace ddinv::lti {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A sampled vector signal: column k holds the sample at time k.
using Signal = MatrixXd;

/// Discrete-time LTI system x+ = A x + B u, y = C x + D u.
class StateSpaceModel {
 public:
  /// Throws InvalidInputError on inconsistent dimensions or non-finite data.
  StateSpaceModel(MatrixXd a, MatrixXd b, MatrixXd c, MatrixXd d);

  const MatrixXd& A() const { return a_; }
  const MatrixXd& B() const { return b_; }
  const MatrixXd& C() const { return c_; }
  const MatrixXd& D() const { return d_; }

  Index n() const { return a_.rows(); }
  Index m() const { return b_.cols(); }
  Index p() const { return c_.rows(); }

 private:
  MatrixXd a_, b_, c_, d_;
};

/// Inverse system driven by output windows y_{k:k+L}:
///   x+ = A~ x + B~ y_{k:k+L},  u_k = C~ x + D~ y_{k:k+L}.
struct InverseSystem {
  MatrixXd a;  ///< A - B P O_L
  MatrixXd b;  ///< B P
  MatrixXd c;  ///< -P O_L
  MatrixXd d;  ///< P
  Index delay = 0;
};

enum class ZeroCategory { NoZeros, AllStable, MarginalOrUnstable };

struct ZeroClassification {
  std::vector<std::complex<double>> zeros;
  ZeroCategory category = ZeroCategory::NoZeros;
  double max_modulus = 0.0;
};

struct Trajectory {
  Signal inputs;   ///< m x len
  Signal outputs;  ///< p x len
  std::optional<Signal> states;

  Index length() const { return inputs.cols(); }
};

Trajectory simulate(const StateSpaceModel& model, const VectorXd& x0,
                    const Signal& inputs);

/// O_L = [C; C A; ...; C A^L], shape (L+1)p x n.
MatrixXd observability_matrix(const StateSpaceModel& model, Index delay);

/// Block lower-triangular Toeplitz matrix of Markov parameters
/// D, CB, CAB, ..., shape (L+1)p x (L+1)m.
MatrixXd invertibility_matrix(const StateSpaceModel& model, Index delay);

/// Checks y_{k:k+L} = obs * x_k + inv * u_{k:k+L} for every window of a
/// trajectory with recorded states. Tolerance is 1e-10 relative to the window
/// magnitude (floored at 1).
bool stacked_output_identity_holds(const Trajectory& traj, const MatrixXd& obs,
                                   const MatrixXd& inv, Index delay);

/// Simulates from (x0, inputs) and checks the stacked output identity with
/// the model's own O_L and I_L.
bool stacked_output_identity_check(const StateSpaceModel& model,
                                   const VectorXd& x0, const Signal& inputs,
                                   Index delay);

struct ZeroOptions {
  double rank_tol = 1e-8;  ///< cutoff of the Rosenbrock rank test
  double cap = 1e8;        ///< |z| above this is treated as an infinite zero
};

/// Finite invariant zeros: the z where [A - zI, B; C, D] drops below rank
/// n + m. Requires p >= m.
std::vector<std::complex<double>> invariant_zeros(const StateSpaceModel& model,
                                                  const ZeroOptions& opts = {});

/// Smallest singular value of the Rosenbrock matrix at z, divided by its
/// largest; zero exactly at an invariant zero.
double rosenbrock_rank_gap(const StateSpaceModel& model, std::complex<double> z);

/// True when rank [A - zI, B; C, D] < n + m under the absolute cutoff.
bool rosenbrock_rank_drops(const StateSpaceModel& model, std::complex<double> z,
                           double rank_tol = 1e-8);

/// Smallest L in [0, max_delay] with an L-delay left inverse; nullopt when
/// none exists at that horizon. max_delay defaults to n.
std::optional<Index> inherent_delay(const StateSpaceModel& model,
                                    std::optional<Index> max_delay = std::nullopt,
                                    double rank_tol = 1e-8);

/// Minimum-norm P with P I_L = [I_m 0], i.e. [I_m 0] I_L^+.
/// Throws NoLeftInverseError when the residual exceeds 1e-8.
MatrixXd left_inverse_gain(const StateSpaceModel& model, Index delay,
                           double rank_tol = 1e-8);

/// Minimum-norm P with P I_L = [I_m 0] and P O_L = 0. Exists iff the model
/// has no invariant zeros (for a large enough L); with it the inverse system
/// needs no state estimate. Throws NoLeftInverseError when infeasible.
MatrixXd state_free_inverse_gain(const StateSpaceModel& model, Index delay,
                                 double rank_tol = 1e-8);

/// Builds (A~, B~, C~, D~). Throws InvalidGainError when P I_L deviates from
/// [I_m 0] by more than 1e-8.
InverseSystem inverse_system(const StateSpaceModel& model, const MatrixXd& gain,
                             Index delay);

/// Runs the inverse recursion from x0_hat over the sliding windows of
/// `outputs`; returns u_hat_k (m x (len - L)) for k = 0 .. len - L - 1.
Signal model_based_reconstruct(const InverseSystem& inv, const VectorXd& x0_hat,
                               const Signal& outputs);

/// True iff rank [O_L I_L] = n + rank I_L for some L <= max_delay (default n).
bool strong_observability_check(const StateSpaceModel& model,
                                std::optional<Index> max_delay = std::nullopt,
                                double rank_tol = 1e-8);

ZeroClassification classify_zeros(const StateSpaceModel& model,
                                  double margin = 1e-9,
                                  const ZeroOptions& opts = {});

bool is_controllable(const StateSpaceModel& model, double rank_tol = 1e-8);
bool is_observable(const StateSpaceModel& model, double rank_tol = 1e-8);
inline bool is_minimal(const StateSpaceModel& model, double rank_tol = 1e-8) {
  return is_controllable(model, rank_tol) && is_observable(model, rank_tol);
}

}  // namespace ddinv::lti
