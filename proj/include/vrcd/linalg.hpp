#pragma once

#include <Eigen/Dense>

namespace vrcd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

bool is_symmetric(const Matrix& a, double tol = 1e-9);
void require_symmetric(const Matrix& a, const char* what);

// 0.5 * (A + A^T); used before eigensolves to kill rounding asymmetry.
Matrix symmetrize(const Matrix& a);

double largest_eigenvalue(const Matrix& a);
double smallest_eigenvalue(const Matrix& a);

// Symmetric PSD square root via eigendecomposition. Eigenvalues below
// -1e-12 are rejected, values in [-1e-12, 0] are clamped to zero.
Matrix psd_sqrt(const Matrix& a);

// Moore-Penrose pseudoinverse of a symmetric PSD matrix; eigenvalues not
// exceeding `threshold` are treated as zero.
Matrix psd_pinv(const Matrix& a, double threshold = 1e-10);
Matrix psd_pinv_sqrt(const Matrix& a, double threshold = 1e-10);

// Orthonormal basis of the range of a symmetric projection matrix
// (eigenvectors with eigenvalue close to 1).
Matrix range_basis(const Matrix& projector, double tol = 1e-9);

}  // namespace vrcd
