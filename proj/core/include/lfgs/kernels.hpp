#pragma once

#include <Eigen/Dense>

#include "lfgs/errors.hpp"

namespace lfgs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct SymEigResult {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values(i)
};

/// e^A for a square matrix, by scaling and squaring with a Pade core.
/// For skew-symmetric A the result is orthogonal to ~1e-12.
Matrix matrix_exp(const Matrix& a);

/// Orthogonal factor of the polar decomposition, Z (Z^T Z)^{-1/2}.
/// Throws RankDeficientError when sigma_p(Z) <= rank_tol_factor * sigma_1(Z).
Matrix polar_orthogonal(const Matrix& z, double rank_tol_factor = 1e-8);

/// Smallest singular value of Z.
double smallest_singular_value(const Matrix& z);

/// Deterministic orthonormal basis of the orthogonal complement of range(X),
/// for orthonormal X. Column signs are canonicalized (first entry above
/// 1e-10 in magnitude is positive) so repeated calls agree bitwise.
Matrix orth_complement(const Matrix& x);

/// The ab x ab vec-permutation matrix P with P vec(M) = vec(M^T) for every
/// b x a matrix M. vec_perm(p, n) is the Pi_{p,n} appearing in the Hessian
/// formulas (it acts on vec of n x p matrices).
Matrix vec_perm(Index a, Index b);

/// Symmetric eigendecomposition with ascending eigenvalues. The input is
/// symmetrized internally; a relative asymmetry above 1e-10 is rejected.
SymEigResult sym_eig(const Matrix& s);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// || X^T X - I ||_F, the orthonormality defect.
double orthonormality_defect(const Matrix& x);

}  // namespace lfgs
