#include <doctest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "lfgs/hessian.hpp"
#include "lfgs/rng.hpp"

using namespace lfgs;

namespace {

Matrix identity_block(Index n, Index p) {
  Matrix x = Matrix::Zero(n, p);
  x.topRows(p) = Matrix::Identity(p, p);
  return x;
}

StiefelPoint neighbor(const StiefelPoint& x, double gap, std::uint64_t seed) {
  return exp_map(random_tangent(x, gap, seed), 1.0);
}

// A near-geodesic path with max chordal gap about delta.
PiecewisePath near_geodesic_path(Index n, Index p, int m, double delta,
                                 std::uint64_t seed) {
  StiefelPoint x = random_point(n, p, seed);
  TangentVector xi = random_tangent(x, delta * (m - 1), seed + 1);
  return path_perturbed_geodesic(xi, m, 0.05 * delta, seed + 2);
}

}  // namespace

TEST_CASE("ext_dist_sq values and the infinity branch") {
  StiefelPoint x = random_point(6, 2, 1);
  ExtendedDistanceValue same = ext_dist_sq(x.mat, x.mat);
  REQUIRE(same.finite);
  CHECK(same.value <= 1e-12);

  // 1.1 X projects back to X, leaving only the residual term
  ExtendedDistanceValue scaled = ext_dist_sq(1.1 * x.mat, x.mat);
  REQUIRE(scaled.finite);
  CHECK(scaled.value == doctest::Approx(0.01 * 2).epsilon(1e-10));

  Matrix rank1 = Matrix::Zero(6, 2);
  rank1.col(0) << 1, 0, 0, 0, 0, 0;
  rank1.col(1) = rank1.col(0);
  CHECK_FALSE(ext_dist_sq(rank1, x.mat).finite);
}

TEST_CASE("ext_dist_sq equals d^2 on the manifold") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    StiefelPoint x = random_point(7, 2, 10 + s);
    StiefelPoint y = neighbor(x, 0.8, 20 + s);
    const double d = riemannian_distance(x, y);
    ExtendedDistanceValue v = ext_dist_sq(x.mat, y.mat);
    REQUIRE(v.finite);
    CHECK(std::abs(v.value - d * d) <= 1e-10);
  }
}

TEST_CASE("expansion agrees with the exact value to fourth order") {
  StiefelPoint x0 = random_point(6, 2, 2);
  CHECK(std::abs(ext_dist_sq_expansion(x0.mat, x0.mat)) <= 1e-14);

  // circle pair, angle theta
  const double theta = 0.3;
  Matrix a(2, 1), b(2, 1);
  a << 1, 0;
  b << std::cos(theta), std::sin(theta);
  const double expansion = ext_dist_sq_expansion(a, b);
  CHECK(std::abs(expansion - theta * theta) <= std::pow(theta, 4));

  for (std::uint64_t s = 0; s < 5; ++s) {
    StiefelPoint x = random_point(6, 2, 30 + s);
    TangentVector xi = random_tangent(x, 0.19, 40 + s);
    StiefelPoint y = exp_map(xi, 1.0);
    const double gap = (x.mat - y.mat).norm();
    REQUIRE(gap <= 0.2);
    const double exact = ext_dist_sq(x.mat, y.mat).value;
    CHECK(std::abs(ext_dist_sq_expansion(x.mat, y.mat) - exact) <= 1.6e-3);
  }
}

TEST_CASE("closed-form gradient vanishes at coincident points") {
  StiefelPoint x = random_point(7, 3, 3);
  CHECK(grad_ext_dist_sq_X(x, x.mat).norm() <= 1e-13);
  CHECK(grad_ext_dist_sq_Y(x.mat, x).norm() <= 1e-13);
}

TEST_CASE("gradients match finite differences of the expansion") {
  StiefelPoint x = random_point(5, 2, 4);
  StiefelPoint y = neighbor(x, 0.15, 5);
  Matrix gx = grad_ext_dist_sq_X(x, y.mat);
  Matrix gy = grad_ext_dist_sq_Y(x.mat, y);
  const double h = 1e-6;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 2; ++j) {
      Matrix ep = x.mat, em = x.mat;
      ep(i, j) += h;
      em(i, j) -= h;
      const double fdx = (ext_dist_sq_expansion(ep, y.mat) -
                          ext_dist_sq_expansion(em, y.mat)) /
                         (2 * h);
      CHECK(std::abs(fdx - gx(i, j)) <= 1e-6);
      Matrix yp = y.mat, ym = y.mat;
      yp(i, j) += h;
      ym(i, j) -= h;
      const double fdy = (ext_dist_sq_expansion(x.mat, yp) -
                          ext_dist_sq_expansion(x.mat, ym)) /
                         (2 * h);
      CHECK(std::abs(fdy - gy(i, j)) <= 1e-6);
    }
}

TEST_CASE("Hessian blocks at coincident points match the reduced forms") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    StiefelPoint x = random_point(6, 2, 50 + s);
    const Index n = 6, p = 2;
    Matrix ixx = Eigen::kroneckerProduct(Matrix::Identity(p, p),
                                         (x.mat * x.mat.transpose()).eval())
                     .eval();
    Matrix si =
        Eigen::kroneckerProduct(x.mat.transpose(), x.mat).eval() * vec_perm(p, n);
    Matrix id = Matrix::Identity(n * p, n * p);
    CHECK((hessian_D_exact(x, x) - (2 * id + 0.5 * si - 0.5 * ixx)).norm() <=
          1e-13);
    CHECK((hessian_L_exact(x, x) - (-2 * id + 0.5 * si + 1.5 * ixx)).norm() <=
          1e-13);
  }
}

TEST_CASE("Hessian closed forms match finite differences of the expansion") {
  StiefelPoint x = random_point(4, 2, 6);
  StiefelPoint y = neighbor(x, 0.1, 7);
  const Index n = 4, p = 2;
  Matrix hd = hessian_D_exact(x, y);
  Matrix hl = hessian_L_exact(x, y);
  const double h = 1e-4;
  auto f = [](const Matrix& a, const Matrix& b) {
    return ext_dist_sq_expansion(a, b);
  };
  for (Index a1 = 0; a1 < n * p; ++a1)
    for (Index b1 = 0; b1 < n * p; ++b1) {
      Matrix xpp = x.mat, xpm = x.mat, xmp = x.mat, xmm = x.mat;
      xpp(a1 % n, a1 / n) += h;
      xpp(b1 % n, b1 / n) += h;
      xpm(a1 % n, a1 / n) += h;
      xpm(b1 % n, b1 / n) -= h;
      xmp(a1 % n, a1 / n) -= h;
      xmp(b1 % n, b1 / n) += h;
      xmm(a1 % n, a1 / n) -= h;
      xmm(b1 % n, b1 / n) -= h;
      const double fdd = (f(xpp, y.mat) - f(xpm, y.mat) - f(xmp, y.mat) +
                          f(xmm, y.mat)) /
                         (4 * h * h);
      CHECK(std::abs(fdd - hd(a1, b1)) <= 1e-4);

      // mixed block: d^2 f / dX_a dY_b equals the (b, a) entry of L
      Matrix xp = x.mat, xm = x.mat, yp = y.mat, ym = y.mat;
      xp(a1 % n, a1 / n) += h;
      xm(a1 % n, a1 / n) -= h;
      yp(b1 % n, b1 / n) += h;
      ym(b1 % n, b1 / n) -= h;
      const double fdm =
          (f(xp, yp) - f(xp, ym) - f(xm, yp) + f(xm, ym)) / (4 * h * h);
      CHECK(std::abs(fdm - hl(b1, a1)) <= 1e-4);
    }
}

TEST_CASE("perturbation norms obey the paper bounds") {
  StiefelPoint x = random_point(6, 2, 8);
  auto [d0, l0] = hessian_perturbation_norms(x, x);
  CHECK(d0 <= 1e-13);
  CHECK(l0 <= 1e-13);

  for (std::uint64_t s = 0; s < 10; ++s) {
    StiefelPoint xx = random_point(6, 2, 60 + s);
    StiefelPoint yy = neighbor(xx, 0.2, 70 + s);
    const double delta = spectral_norm(xx.mat - yy.mat);
    auto [dn, ln] = hessian_perturbation_norms(xx, yy);
    CHECK(dn <= 14 * delta + 10 * delta * delta);
    CHECK(ln <= 5.5 * delta + 10 * delta * delta + 4 * std::pow(delta, 3));
  }
}

TEST_CASE("build_hat_Q diagonalizes the padded vec-permutation") {
  // p = 1: no skew part, eigenvalues (0,...,0,1)
  Matrix q1 = build_hat_Q(4, 1);
  Matrix pihat1 = Matrix::Zero(4, 4);
  pihat1(0, 0) = 1.0;
  Matrix lam1 = (q1.transpose() * pihat1 * q1).eval();
  CHECK(std::abs(lam1(3, 3) - 1.0) <= 1e-14);
  CHECK(lam1.norm() == doctest::Approx(1.0).epsilon(1e-14));

  const Index n = 5, p = 3;
  Matrix q = build_hat_Q(n, p);
  CHECK((q.transpose() * q - Matrix::Identity(n * p, n * p)).norm() <= 1e-14);
  Matrix pihat = Matrix::Zero(n * p, n * p);
  pihat.topLeftCorner(p * p, p * p) = vec_perm(p, p);
  Matrix lam = Matrix::Zero(n * p, n * p);
  const Index skew = p * (p - 1) / 2, zeros = (n - p) * p;
  for (Index i = 0; i < skew; ++i) lam(i, i) = -1.0;
  for (Index i = skew + zeros; i < n * p; ++i) lam(i, i) = 1.0;
  CHECK((q.transpose() * pihat * q - lam).norm() <= 1e-14);

  // the -1 columns are normalized vecs of skew elementary matrices
  Matrix pipp = vec_perm(p, p);
  for (Index c = 0; c < skew; ++c) {
    Vector v = q.col(c).head(p * p);
    CHECK((pipp * v + v).norm() <= 1e-14);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-14);
  }
}

TEST_CASE("build_Q_i diagonalizes the coincident Hessian blocks") {
  StiefelPoint x = random_point(4, 2, 9);
  Matrix q = build_Q_i(x);
  SymEigResult d_eig = sym_eig(hessian_D_exact(x, x));
  SymEigResult l_eig = sym_eig(hessian_L_exact(x, x));
  // multisets for n=4, p=2: D has {1 x1, 2 x7}; L has {-2 x4, -1 x1, 0 x3}
  CHECK(d_eig.values(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (Index i = 1; i < 8; ++i)
    CHECK(d_eig.values(i) == doctest::Approx(2.0).epsilon(1e-12));
  for (Index i = 0; i < 4; ++i)
    CHECK(l_eig.values(i) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(l_eig.values(4) == doctest::Approx(-1.0).epsilon(1e-12));
  for (Index i = 5; i < 8; ++i)
    CHECK(std::abs(l_eig.values(i)) <= 1e-12);

  Matrix dd = q.transpose() * hessian_D_exact(x, x) * q;
  Matrix ll = q.transpose() * hessian_L_exact(x, x) * q;
  Matrix dref = Matrix::Zero(8, 8), lref = Matrix::Zero(8, 8);
  dref.diagonal() << 1, 2, 2, 2, 2, 2, 2, 2;
  lref.diagonal() << -1, -2, -2, -2, -2, 0, 0, 0;
  CHECK((dd - dref).norm() <= 1e-12);
  CHECK((ll - lref).norm() <= 1e-12);
}

TEST_CASE("mixed-base deviation of the L block is bounded") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    StiefelPoint x = random_point(6, 2, 80 + s);
    StiefelPoint y = neighbor(x, 0.05 + 0.03 * s, 90 + s);
    const double delta = spectral_norm(x.mat - y.mat);
    REQUIRE(delta <= 0.3);
    Matrix qx = build_Q_i(x);
    // align the second complement with the first so the bases stay close
    Matrix cx = orth_complement(x.mat);
    Matrix cy = polar_orthogonal(cx - y.mat * (y.mat.transpose() * cx));
    Matrix qy = build_Q_i(y, cy);
    Matrix lref = Matrix::Zero(12, 12);
    lref.diagonal() << -1, -2, -2, -2, -2, -2, -2, -2, -2, 0, 0, 0;
    const double dev =
        spectral_norm(qy.transpose() * hessian_L_exact(x, y) * qx - lref);
    CHECK(dev <= 7.5 * delta + 15.5 * delta * delta + 14 * std::pow(delta, 3) +
                     4 * std::pow(delta, 4));
  }
}

TEST_CASE("assemble_Gprime structure") {
  StiefelPoint x = random_point(5, 2, 10);
  TangentVector xi = random_tangent(x, 0.6, 11);

  PiecewisePath p3 = path_geodesic_sample(xi, 3);
  HessianBlocks g3 = assemble_Gprime(p3);
  CHECK(g3.diag_blocks.size() == 1);
  CHECK(g3.off_blocks.empty());
  CHECK(g3.dense().rows() == 10);

  PiecewisePath p5 = path_geodesic_sample(xi, 5);
  HessianBlocks g5 = assemble_Gprime(p5);
  CHECK(g5.diag_blocks.size() == 3);
  CHECK(g5.off_blocks.size() == 2);
  Matrix dense = g5.dense();
  CHECK((dense - dense.transpose()).norm() <= 1e-10);
  // bandwidth exactly one block
  CHECK(dense.block(20, 0, 10, 10).norm() == 0.0);
  CHECK(dense.block(0, 20, 10, 10).norm() == 0.0);
}

TEST_CASE("assemble_Gprime matches the finite-difference path Hessian") {
  // full FD Hessian of F~ = sum of expansion terms, St(4,2), m=4, gaps ~0.1
  const Index n = 4, p = 2;
  StiefelPoint x = random_point(n, p, 12);
  TangentVector xi = random_tangent(x, 0.3, 13);
  PiecewisePath path = path_geodesic_sample(xi, 4);
  Matrix dense = assemble_Gprime(path).dense();

  auto f_tilde = [&](const Matrix& x1, const Matrix& x2) {
    return ext_dist_sq_expansion(path.points[0].mat, x1) +
           ext_dist_sq_expansion(x1, x2) +
           ext_dist_sq_expansion(x2, path.points[3].mat);
  };
  const double h = 1e-4;
  const Index np = n * p;
  for (Index a = 0; a < 2 * np; ++a)
    for (Index b = 0; b < 2 * np; ++b) {
      auto bump = [&](Index which, double da, double db,
                      Index ia, Index ib) {
        Matrix x1 = path.points[1].mat, x2 = path.points[2].mat;
        Matrix& ma = (ia < np) ? x1 : x2;
        ma((ia % np) % n, (ia % np) / n) += da;
        Matrix& mb = (ib < np) ? x1 : x2;
        mb((ib % np) % n, (ib % np) / n) += db;
        (void)which;
        return f_tilde(x1, x2);
      };
      const double fd = (bump(0, h, h, a, b) - bump(0, h, -h, a, b) -
                         bump(0, -h, h, a, b) + bump(0, -h, -h, a, b)) /
                        (4 * h * h);
      CHECK(std::abs(fd - dense(a, b)) <= 1e-4);
    }
}

TEST_CASE("lambda_spectrum_A matches the dense eigensolver") {
  std::vector<double> formula = lambda_spectrum_A(6, 4, 2);
  std::sort(formula.begin(), formula.end());
  SymEigResult dense = sym_eig(assemble_A(6, 4, 2));
  REQUIRE(static_cast<Index>(formula.size()) == dense.values.size());
  for (Index i = 0; i < dense.values.size(); ++i)
    CHECK(std::abs(formula[i] - dense.values(i)) <= 1e-12);

  // m = 3: single block, mu_1 = 0, minimum 2
  std::vector<double> m3 = lambda_spectrum_A(3, 5, 2);
  CHECK(*std::min_element(m3.begin(), m3.end()) ==
        doctest::Approx(2.0).epsilon(1e-14));

  for (int m : {3, 4, 6, 10, 20, 50}) {
    std::vector<double> vals = lambda_spectrum_A(m, 5, 2);
    CHECK(*std::min_element(vals.begin(), vals.end()) > 0.0);
    CHECK(std::abs(*std::min_element(vals.begin(), vals.end()) -
                   lambda_min_A(m)) <= 1e-12);
  }
}

TEST_CASE("delta_threshold formula, monotonicity, and asymptote") {
  CHECK(delta_threshold(3) ==
        doctest::Approx((std::sqrt(2569.0) - 43.0) / 180.0).epsilon(1e-14));
  CHECK(delta_threshold(3) == doctest::Approx(0.042694).epsilon(1e-4));
  CHECK(delta_threshold(4) > delta_threshold(10));
  CHECK(delta_threshold(10) > delta_threshold(100));
  CHECK(delta_threshold(100) > 0.0);
  // leading order pi^2 / (43 (m-1)^2)
  for (int m : {200, 400}) {
    const double lead =
        std::numbers::pi * std::numbers::pi / (43.0 * (m - 1) * (m - 1));
    CHECK(delta_threshold(m) / lead == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("split_A_E obeys the perturbation bounds") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    PiecewisePath path = near_geodesic_path(6, 2, 5, 0.04, 100 + 10 * s);
    auto [a, e, rep] = split_A_E(path);
    REQUIRE(rep.delta <= 0.05);
    CHECK(rep.norm_E_actual <= rep.norm_E_bound + 1e-9);
    CHECK(std::abs(rep.lambda_min_Gprime - rep.lambda_min_A) <=
          rep.norm_E_actual + 1e-9);  // Weyl
    CHECK(rep.lambda_min_A == doctest::Approx(lambda_min_A(5)).epsilon(1e-12));

    // block Gershgorin: eigenvalues of E inside union of the radii intervals
    SymEigResult eig = sym_eig(e);
    const Index np = 12;
    const int interior = 3;
    std::vector<double> centers, radii;
    for (int i = 0; i < interior; ++i) {
      Matrix dblock = e.block(i * np, i * np, np, np);
      double r = 0.0;
      if (i > 0) r += spectral_norm(e.block(i * np, (i - 1) * np, np, np));
      if (i + 1 < interior)
        r += spectral_norm(e.block(i * np, (i + 1) * np, np, np));
      centers.push_back(0.0);
      radii.push_back(spectral_norm(dblock) + r);
    }
    const double rmax = *std::max_element(radii.begin(), radii.end());
    CHECK(std::abs(eig.values(0)) <= rmax + 1e-9);
    CHECK(std::abs(eig.values(eig.values.size() - 1)) <= rmax + 1e-9);
  }
}

TEST_CASE("identical-base limit drives E to zero") {
  StiefelPoint x = random_point(6, 2, 14);
  TangentVector xi = random_tangent(x, 4 * 1e-6, 15);
  PiecewisePath path = path_geodesic_sample(xi, 5);
  auto [a, e, rep] = split_A_E(path);
  CHECK(rep.norm_E_actual <= 1e-4);
}

TEST_CASE("bgs_spectral_radius basics") {
  StiefelPoint x = random_point(5, 2, 16);
  TangentVector xi = random_tangent(x, 0.2, 17);
  HessianBlocks single = assemble_Gprime(path_geodesic_sample(xi, 3));
  CHECK(bgs_spectral_radius(single) <= 1e-14);

  // SPD random block tridiagonal: Gauss-Seidel converges
  auto eng = make_engine(18, 0);
  HessianBlocks g;
  g.m = 6;
  g.n = 2;
  g.p = 2;
  const Index np = 4;
  std::vector<Matrix> offs;
  for (int i = 0; i < 3; ++i) offs.push_back(0.2 * gaussian_matrix(np, np, eng));
  for (int i = 0; i < 4; ++i) {
    Matrix r = gaussian_matrix(np, np, eng);
    Matrix block = r * r.transpose() + 5.0 * Matrix::Identity(np, np);
    g.diag_blocks.push_back(block);
  }
  g.off_blocks = offs;
  Matrix dense = g.dense();
  SymEigResult eig = sym_eig(dense);
  REQUIRE(eig.values(0) > 0.0);  // SPD by construction
  CHECK(bgs_spectral_radius(g) < 1.0);
}

TEST_CASE("midpoint minimizes the extended objective over ambient samples") {
  StiefelPoint a = random_point(6, 2, 19);
  StiefelPoint b = neighbor(a, 1.0, 20);
  StiefelPoint mid = geodesic_midpoint(a, b);
  const double fmid = ext_dist_sq(a.mat, mid.mat).value +
                      ext_dist_sq(mid.mat, b.mat).value;
  auto eng = make_engine(21, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix cand = mid.mat + 0.15 * gaussian_matrix(6, 2, eng);
    ExtendedDistanceValue left = ext_dist_sq(a.mat, cand);
    ExtendedDistanceValue right = ext_dist_sq(cand, b.mat);
    if (!left.finite || !right.finite) continue;
    CHECK(fmid <= left.value + right.value + 1e-9);
  }
}
