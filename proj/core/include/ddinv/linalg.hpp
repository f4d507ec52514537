#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ddinv::linalg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const MatrixXd>;

/// Singular-value cutoffs. All comparisons are absolute: a singular value
/// sigma is discarded when sigma <= cutoff.
struct ToleranceSet {
  double rank_tol = 1e-8;  ///< generic numerical-rank cutoff
  double y_trunc = 1e-4;   ///< SVD of the stacked output Hankel matrix Y
  double ls_trunc = 1e-3;  ///< pseudoinverse of U_p * V_null

  /// Throws InvalidInputError when any field is negative or non-finite.
  void validate() const;
};

/// Moore-Penrose pseudoinverse with singular values <= tol zeroed.
MatrixXd truncated_pinv(const MatrixRef& m, double tol);

/// Orthonormal basis (as columns) of the numerical kernel of `m`: the right
/// singular vectors whose singular value is <= tol. Has
/// cols(m) - numerical_rank(m, tol) columns.
MatrixXd nullspace_basis(const MatrixRef& m, double tol);

/// Number of singular values strictly greater than tol.
Index numerical_rank(const MatrixRef& m, double tol);

/// Orthogonal projector I - m^+ m onto ker(m), assembled as B * B^T from
/// nullspace_basis.
MatrixXd kernel_projector(const MatrixRef& m, double tol);

/// All eigenvalues of a square real matrix, with multiplicity.
std::vector<std::complex<double>> eigenvalues(const MatrixRef& m);

/// max |lambda| over eigenvalues(m).
double spectral_radius(const MatrixRef& m);

/// Largest singular value; 0 for empty matrices.
double norm2(const MatrixRef& m);

}  // namespace ddinv::linalg
