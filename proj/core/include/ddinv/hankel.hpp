#pragma once

#include <Eigen/Dense>

#include "ddinv/lti.hpp"

namespace ddinv::hankel {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using lti::Signal;

/// Block Hankel matrix of depth `depth`: block (i, j) = signal[i + j].
/// Shape q*depth x (len - depth + 1).
MatrixXd block_hankel(const Signal& signal, Index depth);

/// Full row rank test of block_hankel(signal, order). Throws
/// InvalidInputError when the signal is shorter than `order` (as opposed to
/// returning false).
bool is_persistently_exciting(const Signal& signal, Index order, double tol = 1e-8);

/// Offline data partitioned from depth-(N+L+1) Hankel matrices of recorded
/// input/output data u_{0:T+N+L}, y_{0:T+N+L}. All blocks have T+1 columns.
struct HankelBundle {
  MatrixXd u_past;     ///< U_p: first mN rows of H(u)
  MatrixXd u_current;  ///< U_f: first m rows of u_future
  MatrixXd u_future;   ///< U_f^L: last m(L+1) rows of H(u)
  MatrixXd y_past;     ///< Y_p: first pN rows of H(y)
  MatrixXd y_future;   ///< Y_f^L: last p(L+1) rows of H(y)
  MatrixXd y_all;      ///< Y = [Y_p; Y_f^L]
  Index past = 0;      ///< N
  Index delay = 0;     ///< L
  Index m = 0;
  Index p = 0;

  Index columns() const { return u_past.cols(); }  ///< T + 1
};

HankelBundle partition_data(const Signal& u_data, const Signal& y_data, Index past,
                            Index delay);

/// One-shot data-driven inversion with known past inputs: solves
/// [U_p; Y_p; Y_f^L] g = [u_past; y_past; y_future] in the least-squares
/// sense and returns U_f g. Throws InconsistentTrajectoryError when the
/// residual exceeds 1e-6 * |rhs|.
VectorXd reconstruct_with_known_past(const HankelBundle& bundle,
                                     const VectorXd& u_past, const VectorXd& y_past,
                                     const VectorXd& y_future, double tol = 1e-8);

}  // namespace ddinv::hankel
