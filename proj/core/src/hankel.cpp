#include "ddinv/hankel.hpp"

#include <string>

#include "ddinv/errors.hpp"
#include "ddinv/linalg.hpp"

namespace ddinv::hankel {

MatrixXd block_hankel(const Signal& signal, Index depth) {
  if (depth < 1) throw InvalidInputError("block_hankel: depth must be >= 1");
  if (signal.cols() < depth) {
    throw InvalidInputError("block_hankel: signal of length " +
                            std::to_string(signal.cols()) + " is shorter than depth " +
                            std::to_string(depth));
  }
  const Index q = signal.rows();
  const Index cols = signal.cols() - depth + 1;
  MatrixXd h(q * depth, cols);
  for (Index i = 0; i < depth; ++i) {
    h.middleRows(i * q, q) = signal.middleCols(i, cols);
  }
  return h;
}

bool is_persistently_exciting(const Signal& signal, Index order, double tol) {
  const MatrixXd h = block_hankel(signal, order);
  return linalg::numerical_rank(h, tol) == h.rows();
}

HankelBundle partition_data(const Signal& u_data, const Signal& y_data, Index past,
                            Index delay) {
  if (past < 1) throw InvalidInputError("partition_data: N must be >= 1");
  if (delay < 0) throw InvalidInputError("partition_data: L must be >= 0");
  if (u_data.cols() != y_data.cols()) {
    throw InvalidInputError("partition_data: input and output lengths differ (" +
                            std::to_string(u_data.cols()) + " vs " +
                            std::to_string(y_data.cols()) + ")");
  }
  const Index depth = past + delay + 1;
  if (u_data.cols() < depth) {
    throw InvalidInputError("partition_data: need at least N+L+1 = " +
                            std::to_string(depth) + " samples");
  }
  const Index m = u_data.rows();
  const Index p = y_data.rows();
  const MatrixXd hu = block_hankel(u_data, depth);
  MatrixXd hy = block_hankel(y_data, depth);

  HankelBundle b;
  b.past = past;
  b.delay = delay;
  b.m = m;
  b.p = p;
  b.u_past = hu.topRows(m * past);
  b.u_future = hu.bottomRows(m * (delay + 1));
  b.u_current = b.u_future.topRows(m);
  b.y_past = hy.topRows(p * past);
  b.y_future = hy.bottomRows(p * (delay + 1));
  b.y_all = std::move(hy);
  return b;
}

VectorXd reconstruct_with_known_past(const HankelBundle& bundle,
                                     const VectorXd& u_past, const VectorXd& y_past,
                                     const VectorXd& y_future, double tol) {
  if (u_past.size() != bundle.u_past.rows() || y_past.size() != bundle.y_past.rows() ||
      y_future.size() != bundle.y_future.rows()) {
    throw InvalidInputError("reconstruct_with_known_past: window length mismatch");
  }
  const Index cols = bundle.columns();
  MatrixXd stacked(bundle.u_past.rows() + bundle.y_all.rows(), cols);
  stacked << bundle.u_past, bundle.y_all;
  VectorXd rhs(stacked.rows());
  rhs << u_past, y_past, y_future;

  const VectorXd g = linalg::truncated_pinv(stacked, tol) * rhs;
  const double residual = (stacked * g - rhs).norm();
  if (residual > 1e-6 * rhs.norm()) {
    throw InconsistentTrajectoryError(
        "reconstruct_with_known_past: window is not a trajectory of the data "
        "(residual " + std::to_string(residual) + ")",
        residual);
  }
  return bundle.u_current * g;
}

}  // namespace ddinv::hankel
