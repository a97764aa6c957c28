#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "lfgs/geodesic.hpp"

namespace lfgs {

/// Value of the extended squared distance. The +infinity branch (a
/// rank-deficient argument) is a tagged state, never a floating-point inf.
struct ExtendedDistanceValue {
  bool finite = true;
  double value = 0.0;
  Matrix proj_x;  // polar factors when finite
  Matrix proj_y;
};

/// d^2(P x, P y) + ||x - P x||_F^2 + ||y - P y||_F^2 when both smallest
/// singular values are positive, +infinity sentinel otherwise.
ExtendedDistanceValue ext_dist_sq(const Matrix& xt, const Matrix& yt,
                                  const ShootingOptions& opts = {});

/// Truncated expansion of the extended squared distance that avoids the
/// Riemannian distance:
///   ||PX - PY||_F^2 - 1/2 ||I - (PX)^T PY||_F^2 + both residual terms.
/// Agrees with ext_dist_sq up to O(gap^4). Throws RankDeficientError.
double ext_dist_sq_expansion(const Matrix& xt, const Matrix& yt);

/// Closed-form gradient of the truncated expansion with respect to the first
/// argument, evaluated at on-manifold x.
Matrix grad_ext_dist_sq_X(const StiefelPoint& x, const Matrix& yt);
/// Companion formula: gradient with respect to the second argument.
Matrix grad_ext_dist_sq_Y(const Matrix& xt, const StiefelPoint& y);

/// Closed-form np x np second derivative with respect to the first argument,
/// both points on-manifold.
Matrix hessian_D_exact(const StiefelPoint& x, const StiefelPoint& y);
/// Mixed second derivative block. Orientation: entry (a, b) is
/// d^2 f / d vec(Y)_a d vec(X)_b, i.e. the Jacobian of the Y-gradient taken
/// along X. As such it is directly the (i+1, i) subdiagonal block of the path
/// Hessian when called with (X_i, X_{i+1}).
Matrix hessian_L_exact(const StiefelPoint& x, const StiefelPoint& y);

/// (||D_exact - D_leading||_2, ||L_exact - L_leading||_2) where the leading
/// terms are the coincident-point forms.
std::pair<double, double> hessian_perturbation_norms(const StiefelPoint& x,
                                                     const StiefelPoint& y);

/// The orthogonal matrix diagonalizing diag{Pi_{p,p}, 0} with eigenvalue
/// ordering {-1 block, 0 block, +1 block}. Built explicitly from the
/// skew/symmetric elementary basis (deterministic column order), not from a
/// generic eigensolver.
Matrix build_hat_Q(Index n, Index p);

/// Q_i = [I_p (x) X, I_p (x) Xperp] * hat_Q; diagonalizes the coincident
/// Hessian blocks exactly.
Matrix build_Q_i(const StiefelPoint& x);
Matrix build_Q_i(const StiefelPoint& x, const Matrix& complement);

/// Block-tridiagonal Hessian of the extended objective at a path:
/// diag block i is D(X_i,X_{i-1}) + D(X_i,X_{i+1}); subdiagonal block
/// (i+1, i) is L(X_i, X_{i+1}).
struct HessianBlocks {
  int m = 0;  // number of path points; m-2 interior blocks
  Index n = 0, p = 0;
  std::vector<Matrix> diag_blocks;  // size m-2
  std::vector<Matrix> off_blocks;   // size m-3, off_blocks[i] = L(X_{i+1}, X_{i+2})

  Matrix dense() const;
};

HessianBlocks assemble_Gprime(const PiecewisePath& path);

struct SpectralReport {
  int m = 0;
  Index n = 0, p = 0;
  double delta = 0.0;  // max consecutive chordal 2-norm gap
  double lambda_min_A = 0.0;
  double lambda_min_Gprime = 0.0;
  double norm_E_bound = 0.0;  // 43 delta + 90 delta^2
  double norm_E_actual = 0.0;
  double rho_bgs = 0.0;
  double threshold_delta = 0.0;
  double vmin_E_vmin = 0.0;
};

/// Q^T G' Q = A + E with A in exact Kronecker form; reports the spectral
/// quantities. Complements along the path are aligned (propagated from the
/// first point) so that Q_{i+1} - Q_i stays O(gap).
std::tuple<Matrix, Matrix, SpectralReport> split_A_E(const PiecewisePath& path);

/// Dense A = 2 I_{m-2} (x) D + M (x) L.
Matrix assemble_A(int m, Index n, Index p);

/// Eigenvalue multiset {2 d_j + mu_k l_j} with mu_k = -2 cos(k pi/(m-1)).
std::vector<double> lambda_spectrum_A(int m, Index n, Index p);

/// 2 - 2 cos(pi/(m-1)), the smallest eigenvalue of A for p >= 2.
double lambda_min_A(int m);

/// Positive-definiteness threshold
/// (sqrt(2569 - 720 cos(pi/(m-1))) - 43) / 180.
double delta_threshold(int m);

/// Spectral radius of (D - L)^{-1} U from the block lower/upper splitting.
double bgs_spectral_radius(const HessianBlocks& g);

}  // namespace lfgs
