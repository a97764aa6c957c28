#include "lfgs/kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace lfgs {

Matrix matrix_exp(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix_exp: input must be square");
  if (!a.allFinite())
    throw std::invalid_argument("matrix_exp: input has non-finite entries");
  return a.exp();
}

Matrix polar_orthogonal(const Matrix& z, double rank_tol_factor) {
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double sigma1 = sv(0);
  const double sigmap = sv(sv.size() - 1);
  if (sigmap <= rank_tol_factor * sigma1 || sigma1 == 0.0)
    throw RankDeficientError("polar_orthogonal: smallest singular value " +
                             std::to_string(sigmap) + " below tolerance");
  return svd.matrixU() * svd.matrixV().transpose();
}

double smallest_singular_value(const Matrix& z) {
  Eigen::JacobiSVD<Matrix> svd(z);
  return svd.singularValues()(z.cols() < z.rows() ? z.cols() - 1 : z.rows() - 1);
}

Matrix orth_complement(const Matrix& x) {
  const Index n = x.rows(), p = x.cols();
  Eigen::HouseholderQR<Matrix> qr(x);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix c = q.rightCols(n - p);
  // canonical signs: first entry above 1e-10 in magnitude made positive
  for (Index j = 0; j < c.cols(); ++j) {
    for (Index i = 0; i < c.rows(); ++i) {
      if (std::abs(c(i, j)) > 1e-10) {
        if (c(i, j) < 0) c.col(j) = -c.col(j);
        break;
      }
    }
  }
  return c;
}

Matrix vec_perm(Index a, Index b) {
  if (a < 1 || b < 1) throw std::invalid_argument("vec_perm: sizes must be >= 1");
  Matrix perm = Matrix::Zero(a * b, a * b);
  // M is b x a; vec(M) index of (i,j) is i + j*b, vec(M^T) index is j + i*a.
  for (Index i = 0; i < b; ++i)
    for (Index j = 0; j < a; ++j) perm(j + i * a, i + j * b) = 1.0;
  return perm;
}

SymEigResult sym_eig(const Matrix& s) {
  if (s.rows() != s.cols())
    throw std::invalid_argument("sym_eig: input must be square");
  const double asym = (s - s.transpose()).norm();
  if (asym > 1e-10 * std::max(1.0, s.norm()))
    throw std::invalid_argument("sym_eig: input not symmetric, defect " +
                                std::to_string(asym));
  Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw NotConvergedError("sym_eig: eigen-iteration did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

double spectral_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) > 32) {
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues()(0);
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double orthonormality_defect(const Matrix& x) {
  return (x.transpose() * x - Matrix::Identity(x.cols(), x.cols())).norm();
}

}  // namespace lfgs
