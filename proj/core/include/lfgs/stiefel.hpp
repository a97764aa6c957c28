#pragma once

#include <cstdint>

#include "lfgs/kernels.hpp"

namespace lfgs {

constexpr double kManifoldTol = 1e-10;

/// A point on St(n,p): an n x p matrix with orthonormal columns.
struct StiefelPoint {
  Matrix mat;

  Index n() const { return mat.rows(); }
  Index p() const { return mat.cols(); }
};

/// Validates orthonormality against kManifoldTol.
StiefelPoint make_point(const Matrix& mat);

/// A tangent vector xi = X Omega + Xperp K at base X. The complement used at
/// construction is stored; exp_map reuses it, since K is basis-dependent
/// while the geodesic is not.
struct TangentVector {
  StiefelPoint base;
  Matrix omega;       // p x p, skew
  Matrix k;           // (n-p) x p
  Matrix complement;  // n x (n-p), the Xperp that K refers to
  Matrix ambient;     // n x p

  /// sqrt(1/2 |Omega|_F^2 + |K|_F^2)
  double canonical_norm() const;
};

/// Assemble a tangent from its (Omega, K) blocks; Omega must be skew within
/// 1e-10.
TangentVector tangent_from_blocks(const StiefelPoint& base, const Matrix& omega,
                                  const Matrix& k);

/// Extract (Omega, K) blocks from an ambient n x p tangent representative
/// using the given complement (or the deterministic one when omitted).
TangentVector tangent_from_ambient(const StiefelPoint& base,
                                   const Matrix& ambient);
TangentVector tangent_from_ambient(const StiefelPoint& base,
                                   const Matrix& ambient,
                                   const Matrix& complement);

/// Canonical metric trace(xi^T (I - 1/2 X X^T) eta). Both tangents must share
/// the base point.
double canonical_inner(const TangentVector& xi, const TangentVector& eta);

/// Geodesic endpoint Y(t) for initial velocity xi. One polar projection is
/// applied to the result to stop orthonormality drift over long iterations.
StiefelPoint exp_map(const TangentVector& xi, double t);

/// Velocity of the geodesic at time t, expressed as a tangent at Y(t).
TangentVector geodesic_velocity(const TangentVector& xi, double t);

/// Deterministic Gaussian draw projected to the manifold.
StiefelPoint random_point(Index n, Index p, std::uint64_t seed,
                          std::uint64_t stream = 0);

/// Gaussian (Omega, K) draw rescaled so the canonical norm equals
/// norm_target within 1e-12.
TangentVector random_tangent(const StiefelPoint& base, double norm_target,
                             std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace lfgs
