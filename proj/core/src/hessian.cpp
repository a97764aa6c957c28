#include "lfgs/hessian.hpp"

#include <algorithm>
#include <cmath>

namespace lfgs {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

ExtendedDistanceValue ext_dist_sq(const Matrix& xt, const Matrix& yt,
                                  const ShootingOptions& opts) {
  ExtendedDistanceValue out;
  try {
    out.proj_x = polar_orthogonal(xt);
    out.proj_y = polar_orthogonal(yt);
  } catch (const RankDeficientError&) {
    out.finite = false;
    return out;
  }
  const double d = riemannian_distance(StiefelPoint{out.proj_x},
                                       StiefelPoint{out.proj_y}, opts);
  out.value = d * d + (xt - out.proj_x).squaredNorm() +
              (yt - out.proj_y).squaredNorm();
  return out;
}

double ext_dist_sq_expansion(const Matrix& xt, const Matrix& yt) {
  const Matrix px = polar_orthogonal(xt);
  const Matrix py = polar_orthogonal(yt);
  const Index p = xt.cols();
  const Matrix ident = Matrix::Identity(p, p);
  return (px - py).squaredNorm() -
         0.5 * (ident - px.transpose() * py).squaredNorm() +
         (xt - px).squaredNorm() + (yt - py).squaredNorm();
}

Matrix grad_ext_dist_sq_X(const StiefelPoint& x, const Matrix& yt) {
  const Matrix py = polar_orthogonal(yt);
  const Matrix& X = x.mat;
  const Index n = x.n();
  const Matrix xxt = X * X.transpose();
  return -(Matrix::Identity(n, n) - 0.5 * xxt) * py +
         0.5 * X * py.transpose() * X -
         (Matrix::Identity(n, n) - xxt) * py * py.transpose() * X;
}

Matrix grad_ext_dist_sq_Y(const Matrix& xt, const StiefelPoint& y) {
  const Matrix px = polar_orthogonal(xt);
  const Matrix& Y = y.mat;
  const Index n = y.n();
  const Matrix yyt = Y * Y.transpose();
  return -(Matrix::Identity(n, n) - 0.5 * yyt) * px +
         0.5 * Y * px.transpose() * Y -
         (Matrix::Identity(n, n) - yyt) * px * px.transpose() * Y;
}

Matrix hessian_D_exact(const StiefelPoint& x, const StiefelPoint& y) {
  const Matrix& X = x.mat;
  const Matrix& Y = y.mat;
  const Index n = x.n(), p = x.p();
  const Matrix perm = vec_perm(p, n);
  const Matrix in = Matrix::Identity(n, n);
  const Matrix ip = Matrix::Identity(p, p);
  const Matrix xxt = X * X.transpose();
  const Matrix yyt = Y * Y.transpose();
  const Matrix ytx = Y.transpose() * X;

  Matrix h =
      sym(kron(ytx, in) + kron(Y.transpose(), X) * perm + kron(ip, Y * X.transpose()));
  h -= 0.75 * sym(kron(Y.transpose() * xxt, X) * perm +
                  kron(X.transpose(), X * ytx) * perm +
                  kron(ip, xxt * Y * X.transpose()) + kron(ytx, xxt));
  h += 2.0 * sym(kron(X.transpose() * yyt, X) * perm + kron(ip, xxt * yyt) -
                 kron(X.transpose() * yyt * xxt, X) * perm);
  h += kron(X.transpose(), X) * perm + kron(ip, xxt) - kron(ip, yyt) +
       kron(X.transpose() * yyt * X, in) - kron(ip, xxt * yyt * xxt) -
       kron(X.transpose() * yyt * X, xxt);
  return h;
}

Matrix hessian_L_exact(const StiefelPoint& x, const StiefelPoint& y) {
  const Matrix& X = x.mat;
  const Matrix& Y = y.mat;
  const Index n = x.n(), p = x.p();
  const Matrix perm = vec_perm(p, n);
  const Matrix in = Matrix::Identity(n, n);
  const Matrix ip = Matrix::Identity(p, p);
  const Matrix xxt = X * X.transpose();
  const Matrix yyt = Y * Y.transpose();
  const Matrix ytx = Y.transpose() * X;

  Matrix h = -Matrix::Identity(n * p, n * p);
  h += 0.5 * kron(ip, yyt);
  h -= 0.25 * kron(ip, yyt * xxt);
  h -= 0.25 * kron(X.transpose(), yyt * X) * perm;
  h += 0.5 * kron(ip, xxt);
  h += 0.5 * kron(X.transpose(), X) * perm;
  h += 0.5 * kron(Y.transpose(), Y) * perm;
  h -= 0.25 * kron(Y.transpose() * xxt, Y) * perm;
  h -= 0.25 * kron(ytx, Y * X.transpose());
  h += kron(Y.transpose(), yyt * X) * perm;
  h -= kron(Y.transpose() * xxt, yyt * X) * perm;
  h -= kron(ytx, yyt * xxt);
  h += kron(ytx, yyt);
  h -= kron(Y.transpose(), X) * perm;
  h += kron(Y.transpose() * xxt, X) * perm;
  h += kron(ytx, xxt);
  h -= kron(ytx, in);
  return h;
}

std::pair<double, double> hessian_perturbation_norms(const StiefelPoint& x,
                                                     const StiefelPoint& y) {
  const Index n = x.n(), p = x.p();
  const Matrix s = kron(x.mat.transpose(), x.mat) * vec_perm(p, n);
  const Matrix ixxt = kron(Matrix::Identity(p, p), x.mat * x.mat.transpose());
  const Matrix inp = Matrix::Identity(n * p, n * p);
  const Matrix d_leading = 2.0 * inp + 0.5 * s - 0.5 * ixxt;
  const Matrix l_leading = -2.0 * inp + 0.5 * s + 1.5 * ixxt;
  return {spectral_norm(hessian_D_exact(x, y) - d_leading),
          spectral_norm(hessian_L_exact(x, y) - l_leading)};
}

Matrix build_hat_Q(Index n, Index p) {
  const Index np = n * p;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix q = Matrix::Zero(np, np);
  Index col = 0;
  // -1 eigenspace of Pi_{p,p}: normalized vecs of skew elementary matrices
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) {
      q(i + j * p, col) = inv_sqrt2;
      q(j + i * p, col) = -inv_sqrt2;
      ++col;
    }
  // 0 eigenspace: the complement block coordinates
  for (Index k = 0; k < (n - p) * p; ++k) q(p * p + k, col++) = 1.0;
  // +1 eigenspace: symmetric pairs, then the diagonal
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) {
      q(i + j * p, col) = inv_sqrt2;
      q(j + i * p, col) = inv_sqrt2;
      ++col;
    }
  for (Index i = 0; i < p; ++i) q(i + i * p, col++) = 1.0;
  return q;
}

Matrix build_Q_i(const StiefelPoint& x, const Matrix& complement) {
  const Index n = x.n(), p = x.p();
  const Matrix ip = Matrix::Identity(p, p);
  Matrix qbar(n * p, n * p);
  qbar.leftCols(p * p) = kron(ip, x.mat);
  qbar.rightCols((n - p) * p) = kron(ip, complement);
  return qbar * build_hat_Q(n, p);
}

Matrix build_Q_i(const StiefelPoint& x) {
  return build_Q_i(x, orth_complement(x.mat));
}

HessianBlocks assemble_Gprime(const PiecewisePath& path) {
  const int m = path.m();
  if (m < 3) throw std::invalid_argument("assemble_Gprime: need m >= 3");
  HessianBlocks g;
  g.m = m;
  g.n = path.n();
  g.p = path.p();
  for (int i = 1; i + 1 < m; ++i) {
    g.diag_blocks.push_back(hessian_D_exact(path.points[i], path.points[i - 1]) +
                            hessian_D_exact(path.points[i], path.points[i + 1]));
  }
  for (int i = 1; i + 2 < m; ++i)
    g.off_blocks.push_back(hessian_L_exact(path.points[i], path.points[i + 1]));
  return g;
}

Matrix HessianBlocks::dense() const {
  const Index np = n * p;
  const Index blocks = m - 2;
  Matrix out = Matrix::Zero(blocks * np, blocks * np);
  for (Index i = 0; i < blocks; ++i)
    out.block(i * np, i * np, np, np) = diag_blocks[i];
  for (Index i = 0; i + 1 < blocks; ++i) {
    out.block((i + 1) * np, i * np, np, np) = off_blocks[i];
    out.block(i * np, (i + 1) * np, np, np) = off_blocks[i].transpose();
  }
  return out;
}

Matrix assemble_A(int m, Index n, Index p) {
  const Index np = n * p;
  const Index skew = p * (p - 1) / 2;
  Vector d_diag(np), l_diag(np);
  for (Index j = 0; j < np; ++j) d_diag(j) = j < skew ? 1.0 : 2.0;
  for (Index j = 0; j < np; ++j) {
    if (j < skew)
      l_diag(j) = -1.0;
    else if (j < skew + (n - p) * p)
      l_diag(j) = -2.0;
    else
      l_diag(j) = 0.0;
  }
  const int blocks = m - 2;
  Matrix toeplitz = Matrix::Zero(blocks, blocks);
  for (int i = 0; i + 1 < blocks; ++i) toeplitz(i, i + 1) = toeplitz(i + 1, i) = 1.0;
  return kron(2.0 * Matrix::Identity(blocks, blocks),
              Matrix(d_diag.asDiagonal())) +
         kron(toeplitz, Matrix(l_diag.asDiagonal()));
}

std::vector<double> lambda_spectrum_A(int m, Index n, Index p) {
  if (m < 3) throw std::invalid_argument("lambda_spectrum_A: need m >= 3");
  const Index np = n * p;
  const Index skew = p * (p - 1) / 2;
  std::vector<double> out;
  out.reserve(np * (m - 2));
  for (Index j = 0; j < np; ++j) {
    const double dj = j < skew ? 1.0 : 2.0;
    const double lj =
        j < skew ? -1.0 : (j < skew + (n - p) * p ? -2.0 : 0.0);
    for (int k = 1; k <= m - 2; ++k) {
      const double mu = -2.0 * std::cos(k * std::numbers::pi / (m - 1));
      out.push_back(2.0 * dj + mu * lj);
    }
  }
  return out;
}

double lambda_min_A(int m) {
  return 2.0 - 2.0 * std::cos(std::numbers::pi / (m - 1));
}

double delta_threshold(int m) {
  if (m < 3) throw std::invalid_argument("delta_threshold: need m >= 3");
  const double c = std::cos(std::numbers::pi / (m - 1));
  return (std::sqrt(2569.0 - 720.0 * c) - 43.0) / 180.0;
}

double bgs_spectral_radius(const HessianBlocks& g) {
  const Index np = g.n * g.p;
  const Index blocks = g.m - 2;
  const Index size = blocks * np;
  Matrix dense = g.dense();
  Matrix lower = Matrix::Zero(size, size);  // D - L: diagonal + strict lower blocks
  Matrix upper = Matrix::Zero(size, size);  // U: minus the strict upper blocks
  for (Index i = 0; i < blocks; ++i)
    for (Index j = 0; j < blocks; ++j) {
      if (j <= i)
        lower.block(i * np, j * np, np, np) = dense.block(i * np, j * np, np, np);
      else
        upper.block(i * np, j * np, np, np) = -dense.block(i * np, j * np, np, np);
    }
  Eigen::FullPivLU<Matrix> lu(lower);
  if (!lu.isInvertible())
    throw SingularDiagonalError("bgs_spectral_radius: block diagonal singular");
  Matrix iter = lu.solve(upper);
  Eigen::EigenSolver<Matrix> es(iter, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::tuple<Matrix, Matrix, SpectralReport> split_A_E(const PiecewisePath& path) {
  const int m = path.m();
  const Index n = path.n(), p = path.p();
  const Index np = n * p;
  const Index blocks = m - 2;

  HessianBlocks g = assemble_Gprime(path);
  Matrix gdense = g.dense();

  // Complements propagated along the path so that consecutive Q_i differ by
  // O(gap); an independently pivoted complement per point would not.
  std::vector<Matrix> q(blocks);
  Matrix comp = orth_complement(path.points[1].mat);
  q[0] = build_Q_i(path.points[1], comp);
  for (Index i = 1; i < blocks; ++i) {
    const Matrix& xi = path.points[i + 1].mat;
    comp = polar_orthogonal(comp - xi * (xi.transpose() * comp));
    q[i] = build_Q_i(path.points[i + 1], comp);
  }

  Matrix qq = Matrix::Zero(blocks * np, blocks * np);
  for (Index i = 0; i < blocks; ++i) qq.block(i * np, i * np, np, np) = q[i];

  Matrix transformed = qq.transpose() * gdense * qq;
  Matrix a = assemble_A(m, n, p);
  Matrix e = transformed - a;

  SpectralReport rep;
  rep.m = m;
  rep.n = n;
  rep.p = p;
  rep.delta = max_chordal_gap(path);
  const auto spec = lambda_spectrum_A(m, n, p);
  rep.lambda_min_A = *std::min_element(spec.begin(), spec.end());
  rep.lambda_min_Gprime = sym_eig(gdense).values(0);
  rep.norm_E_actual = spectral_norm(e);
  rep.norm_E_bound = 43.0 * rep.delta + 90.0 * rep.delta * rep.delta;
  rep.rho_bgs = bgs_spectral_radius(g);
  rep.threshold_delta = delta_threshold(m);
  SymEigResult ea = sym_eig(a);
  Vector vmin = ea.vectors.col(0);
  rep.vmin_E_vmin = vmin.dot(e * vmin);
  return {std::move(a), std::move(e), rep};
}

}  // namespace lfgs
