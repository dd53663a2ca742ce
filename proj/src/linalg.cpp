#include "vrcd/linalg.hpp"

#include <stdexcept>
#include <string>

namespace vrcd {

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + a.cwiseAbs().maxCoeff());
}

void require_symmetric(const Matrix& a, const char* what) {
  if (!is_symmetric(a)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
  }
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double largest_eigenvalue(const Matrix& a) {
  require_symmetric(a, "largest_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double smallest_eigenvalue(const Matrix& a) {
  require_symmetric(a, "smallest_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix psd_sqrt(const Matrix& a) {
  require_symmetric(a, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  Vector ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-12) {
      throw std::invalid_argument("psd_sqrt: matrix has negative eigenvalue " + std::to_string(ev[i]));
    }
    if (ev[i] < 0) ev[i] = 0;
    ev[i] = std::sqrt(ev[i]);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Matrix psd_pinv(const Matrix& a, double threshold) {
  require_symmetric(a, "psd_pinv");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  Vector ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    ev[i] = ev[i] > threshold ? 1.0 / ev[i] : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Matrix psd_pinv_sqrt(const Matrix& a, double threshold) {
  require_symmetric(a, "psd_pinv_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  Vector ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    ev[i] = ev[i] > threshold ? 1.0 / std::sqrt(ev[i]) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Matrix range_basis(const Matrix& projector, double tol) {
  require_symmetric(projector, "range_basis");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(projector));
  const Vector& ev = es.eigenvalues();
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i] - 1.0) <= tol) ++rank;
  }
  Matrix basis(projector.rows(), rank);
  int k = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i] - 1.0) <= tol) basis.col(k++) = es.eigenvectors().col(i);
  }
  return basis;
}

}  // namespace vrcd
