#include "ddinv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ddinv/errors.hpp"

namespace ddinv::linalg {
namespace {

void require_finite(const MatrixRef& m, const char* op) {
  if (!m.allFinite()) {
    throw InvalidInputError(std::string(op) + ": matrix has non-finite entries");
  }
}

void require_tol(double tol, const char* op) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw InvalidInputError(std::string(op) + ": tolerance must be finite and >= 0");
  }
}

void require_square(const MatrixRef& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw InvalidInputError(std::string(op) + ": matrix must be square, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
}

Index count_above(const VectorXd& sv, double tol) {
  return static_cast<Index>((sv.array() > tol).count());
}

}  // namespace

void ToleranceSet::validate() const {
  for (double t : {rank_tol, y_trunc, ls_trunc}) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw InvalidInputError("tolerances must be finite and >= 0");
    }
  }
}

MatrixXd truncated_pinv(const MatrixRef& m, double tol) {
  require_finite(m, "truncated_pinv");
  require_tol(tol, "truncated_pinv");
  if (m.size() == 0) return MatrixXd::Zero(m.cols(), m.rows());

  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  // Singular values are sorted descending, so the kept ones are a prefix.
  const Index r = count_above(sv, tol);
  return svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal() *
         svd.matrixU().leftCols(r).transpose();
}

MatrixXd nullspace_basis(const MatrixRef& m, double tol) {
  require_finite(m, "nullspace_basis");
  require_tol(tol, "nullspace_basis");
  if (m.rows() == 0 || m.cols() == 0) return MatrixXd::Identity(m.cols(), m.cols());

  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const Index r = count_above(svd.singularValues(), tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

Index numerical_rank(const MatrixRef& m, double tol) {
  require_finite(m, "numerical_rank");
  require_tol(tol, "numerical_rank");
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  return count_above(svd.singularValues(), tol);
}

MatrixXd kernel_projector(const MatrixRef& m, double tol) {
  const MatrixXd basis = nullspace_basis(m, tol);
  return basis * basis.transpose();
}

std::vector<std::complex<double>> eigenvalues(const MatrixRef& m) {
  require_square(m, "eigenvalues");
  require_finite(m, "eigenvalues");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw InvalidInputError("eigenvalues: real Schur decomposition did not converge");
  }
  const Eigen::VectorXcd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const MatrixRef& m) {
  double rho = 0.0;
  for (const auto& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

double norm2(const MatrixRef& m) {
  require_finite(m, "norm2");
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace ddinv::linalg
