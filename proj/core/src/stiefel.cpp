#include "lfgs/stiefel.hpp"

#include <cmath>

#include "lfgs/rng.hpp"

namespace lfgs {

StiefelPoint make_point(const Matrix& mat) {
  if (!mat.allFinite())
    throw std::invalid_argument("make_point: non-finite entries");
  if (mat.cols() > mat.rows())
    throw std::invalid_argument("make_point: p exceeds n");
  const double defect = orthonormality_defect(mat);
  if (defect > kManifoldTol)
    throw NotOnManifoldError(
        "make_point: orthonormality defect " + std::to_string(defect), defect);
  return StiefelPoint{mat};
}

double TangentVector::canonical_norm() const {
  return std::sqrt(0.5 * omega.squaredNorm() + k.squaredNorm());
}

TangentVector tangent_from_blocks(const StiefelPoint& base, const Matrix& omega,
                                  const Matrix& k) {
  const Index n = base.n(), p = base.p();
  if (omega.rows() != p || omega.cols() != p || k.rows() != n - p ||
      k.cols() != p)
    throw std::invalid_argument("tangent_from_blocks: block size mismatch");
  const double skew_defect = (omega + omega.transpose()).norm();
  if (skew_defect > 1e-10)
    throw std::invalid_argument("tangent_from_blocks: omega not skew, defect " +
                                std::to_string(skew_defect));
  Matrix complement = orth_complement(base.mat);
  Matrix ambient = base.mat * omega + complement * k;
  return TangentVector{base, omega, k, complement, ambient};
}

TangentVector tangent_from_ambient(const StiefelPoint& base,
                                   const Matrix& ambient,
                                   const Matrix& complement) {
  Matrix omega_raw = base.mat.transpose() * ambient;
  Matrix omega = 0.5 * (omega_raw - omega_raw.transpose());
  Matrix k = complement.transpose() * ambient;
  Matrix amb = base.mat * omega + complement * k;
  return TangentVector{base, omega, k, complement, amb};
}

TangentVector tangent_from_ambient(const StiefelPoint& base,
                                   const Matrix& ambient) {
  return tangent_from_ambient(base, ambient, orth_complement(base.mat));
}

double canonical_inner(const TangentVector& xi, const TangentVector& eta) {
  if ((xi.base.mat - eta.base.mat).norm() != 0.0)
    throw std::invalid_argument("canonical_inner: base point mismatch");
  const Matrix& b = xi.base.mat;
  Matrix half = eta.ambient - 0.5 * b * (b.transpose() * eta.ambient);
  return (xi.ambient.transpose() * half).trace();
}

namespace {

// exp of the skew block system; returns the n x n factor exp(t S) with
// S = [[Omega, -K^T], [K, 0]].
Matrix geodesic_factor(const TangentVector& xi, double t) {
  const Index n = xi.base.n(), p = xi.base.p();
  Matrix s = Matrix::Zero(n, n);
  s.topLeftCorner(p, p) = xi.omega;
  s.topRightCorner(p, n - p) = -xi.k.transpose();
  s.bottomLeftCorner(n - p, p) = xi.k;
  return matrix_exp(t * s);
}

}  // namespace

StiefelPoint exp_map(const TangentVector& xi, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("exp_map: t not finite");
  const Index n = xi.base.n(), p = xi.base.p();
  Matrix q(n, n);
  q.leftCols(p) = xi.base.mat;
  q.rightCols(n - p) = xi.complement;
  Matrix y = q * geodesic_factor(xi, t).leftCols(p);
  return StiefelPoint{polar_orthogonal(y)};
}

TangentVector geodesic_velocity(const TangentVector& xi, double t) {
  const Index n = xi.base.n(), p = xi.base.p();
  Matrix s = Matrix::Zero(n, n);
  s.topLeftCorner(p, p) = xi.omega;
  s.topRightCorner(p, n - p) = -xi.k.transpose();
  s.bottomLeftCorner(n - p, p) = xi.k;
  Matrix q(n, n);
  q.leftCols(p) = xi.base.mat;
  q.rightCols(n - p) = xi.complement;
  Matrix et = matrix_exp(t * s);
  Matrix vel = q * (et * s).leftCols(p);
  StiefelPoint yt{polar_orthogonal(q * et.leftCols(p))};
  return tangent_from_ambient(yt, vel);
}

StiefelPoint random_point(Index n, Index p, std::uint64_t seed,
                          std::uint64_t stream) {
  auto eng = make_engine(seed, stream);
  return StiefelPoint{polar_orthogonal(gaussian_matrix(n, p, eng))};
}

TangentVector random_tangent(const StiefelPoint& base, double norm_target,
                             std::uint64_t seed, std::uint64_t stream) {
  if (norm_target < 0)
    throw std::invalid_argument("random_tangent: negative norm target");
  const Index n = base.n(), p = base.p();
  auto eng = make_engine(seed, stream);
  Matrix w = gaussian_matrix(p, p, eng);
  Matrix omega = 0.5 * (w - w.transpose());
  Matrix k = gaussian_matrix(n - p, p, eng);
  const double norm = std::sqrt(0.5 * omega.squaredNorm() + k.squaredNorm());
  if (norm_target == 0.0 || norm == 0.0) {
    return tangent_from_blocks(base, Matrix::Zero(p, p),
                               Matrix::Zero(n - p, p));
  }
  const double scale = norm_target / norm;
  return tangent_from_blocks(base, scale * omega, scale * k);
}

}  // namespace lfgs
