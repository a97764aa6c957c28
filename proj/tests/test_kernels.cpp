#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "lfgs/kernels.hpp"
#include "lfgs/rng.hpp"

using namespace lfgs;

namespace {

Matrix random_skew(Index k, std::uint64_t seed) {
  auto eng = make_engine(seed, 0);
  Matrix a = gaussian_matrix(k, k, eng);
  return 0.5 * (a - a.transpose().eval());
}

}  // namespace

TEST_CASE("matrix_exp of zero is the identity") {
  for (Index k : {1, 3, 6}) {
    Matrix e = matrix_exp(Matrix::Zero(k, k));
    CHECK((e - Matrix::Identity(k, k)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("matrix_exp reproduces the 2x2 rotation") {
  const double theta = 0.3;
  Matrix a(2, 2);
  a << 0, -theta, theta, 0;
  Matrix e = matrix_exp(a);
  CHECK(e(0, 0) == doctest::Approx(std::cos(theta)).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(-std::sin(theta)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(std::sin(theta)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::cos(theta)).epsilon(1e-14));
}

TEST_CASE("matrix_exp matches a 30-term Taylor sum for small skew matrices") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Matrix a = random_skew(5, s);
    if (a.norm() > 1.0) a *= 1.0 / a.norm();
    Matrix taylor = Matrix::Identity(5, 5);
    Matrix term = Matrix::Identity(5, 5);
    for (int k = 1; k <= 30; ++k) {
      term = (term * a / k).eval();
      taylor += term;
    }
    CHECK((matrix_exp(a) - taylor).norm() <= 1e-12);
  }
}

TEST_CASE("matrix_exp of a skew matrix is orthogonal") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Matrix a = random_skew(7, 100 + s);
    Matrix e = matrix_exp(a);
    CHECK((e.transpose() * e - Matrix::Identity(7, 7)).norm() <= 1e-12);
  }
}

TEST_CASE("matrix_exp rejects non-square input") {
  CHECK_THROWS(matrix_exp(Matrix::Zero(2, 3)));
}

TEST_CASE("polar_orthogonal fixes orthonormal matrices and ignores scaling") {
  auto eng = make_engine(1, 0);
  Matrix z = gaussian_matrix(6, 2, eng);
  Matrix x = polar_orthogonal(z);
  CHECK((polar_orthogonal(x) - x).norm() <= 1e-13);        // idempotent
  CHECK((polar_orthogonal(2.5 * x) - x).norm() <= 1e-13);  // scale invariant
  CHECK(orthonormality_defect(x) <= 1e-13);
}

TEST_CASE("polar_orthogonal is the closest orthonormal matrix") {
  auto eng = make_engine(2, 0);
  Matrix z = gaussian_matrix(6, 2, eng);
  REQUIRE(smallest_singular_value(z) > 0.1);
  Matrix u = polar_orthogonal(z);
  const double best = (z - u).norm();
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix v = polar_orthogonal(gaussian_matrix(6, 2, eng));
    CHECK(best <= (z - v).norm() + 1e-12);
  }
}

TEST_CASE("polar_orthogonal rejects rank-deficient input") {
  Matrix z(4, 2);
  z.setZero();
  z.col(0) << 1, 0, 0, 0;
  z.col(1) = z.col(0);  // rank 1
  CHECK_THROWS_AS(polar_orthogonal(z), RankDeficientError);
}

TEST_CASE("orth_complement completes coordinate axes") {
  const Index n = 5, p = 2;
  Matrix x = Matrix::Zero(n, p);
  x.topRows(p) = Matrix::Identity(p, p);
  Matrix c = orth_complement(x);
  Matrix expected = Matrix::Zero(n, n - p);
  expected.bottomRows(n - p) = Matrix::Identity(n - p, n - p);
  CHECK((c.cwiseAbs() - expected).norm() <= 1e-13);
  // canonicalized sign: first nonzero entry of each column positive
  for (Index j = 0; j < n - p; ++j) {
    Index i = 0;
    while (i < n && std::abs(c(i, j)) <= 1e-10) ++i;
    CHECK(c(i, j) > 0);
  }
}

TEST_CASE("orth_complement satisfies the defining properties") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto eng = make_engine(300 + s, 0);
    Matrix x = polar_orthogonal(gaussian_matrix(8, 3, eng));
    Matrix c = orth_complement(x);
    CHECK((x.transpose() * c).norm() <= 1e-13);
    Matrix q(8, 8);
    q << x, c;
    CHECK((q.transpose() * q - Matrix::Identity(8, 8)).norm() <= 1e-12);
    // deterministic: repeated calls agree bitwise
    Matrix c2 = orth_complement(x);
    CHECK((c - c2).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("vec_perm(1, n) is the identity") {
  CHECK((vec_perm(1, 7) - Matrix::Identity(7, 7)).norm() == 0.0);
}

TEST_CASE("vec_perm(p, p) is symmetric") {
  for (Index p : {2, 3, 5}) {
    Matrix pi = vec_perm(p, p);
    CHECK((pi - pi.transpose()).norm() == 0.0);
  }
}

TEST_CASE("vec_perm shuffles vec(X^T) into vec(X)") {
  // Pi_{4,3} applied to vec of a 3x4 matrix gives the vec of its transpose
  auto eng = make_engine(4, 0);
  Matrix pi43 = vec_perm(4, 3);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x = gaussian_matrix(4, 3, eng);
    Matrix xt = x.transpose();
    Vector lhs = pi43 * Eigen::Map<const Vector>(xt.data(), 12);
    Vector rhs = Eigen::Map<const Vector>(x.data(), 12);
    CHECK((lhs - rhs).norm() == 0.0);
  }
}

TEST_CASE("vec_perm composes to the identity exactly") {
  for (auto [a, b] : {std::pair<Index, Index>{3, 5}, {2, 7}, {4, 4}}) {
    Matrix prod = vec_perm(a, b) * vec_perm(b, a);
    CHECK((prod - Matrix::Identity(a * b, a * b)).norm() == 0.0);
  }
}

TEST_CASE("sym_eig handles the identity and sorts eigenvalues") {
  SymEigResult r = sym_eig(Matrix::Identity(3, 3));
  CHECK(r.values.isApproxToConstant(1.0, 1e-14));

  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  SymEigResult rs = sym_eig(d);
  CHECK(rs.values(0) == doctest::Approx(1.0));
  CHECK(rs.values(1) == doctest::Approx(2.0));
  CHECK(rs.values(2) == doctest::Approx(3.0));
}

TEST_CASE("sym_eig satisfies the Rayleigh-quotient oracle") {
  auto eng = make_engine(5, 0);
  Matrix a = gaussian_matrix(8, 8, eng);
  Matrix s = 0.5 * (a + a.transpose().eval());
  SymEigResult r = sym_eig(s);
  CHECK((r.vectors.transpose() * r.vectors - Matrix::Identity(8, 8)).norm() <=
        1e-12);
  CHECK((s - r.vectors * r.values.asDiagonal() * r.vectors.transpose()).norm() <=
        1e-10 * s.norm());
  for (Index i = 0; i < 8; ++i) {
    const Vector v = r.vectors.col(i);
    CHECK(std::abs(r.values(i) - v.dot(s * v)) <= 1e-10);
  }
}

TEST_CASE("spectral_norm equals the largest singular value") {
  auto eng = make_engine(6, 0);
  Matrix a = gaussian_matrix(5, 7, eng);
  SymEigResult r = sym_eig((a * a.transpose()).eval());
  CHECK(spectral_norm(a) ==
        doctest::Approx(std::sqrt(r.values(4))).epsilon(1e-12));
}

TEST_CASE("(X^T kron X) Pi is symmetric and squares to I kron XX^T") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto eng = make_engine(700 + s, 0);
    Matrix x = polar_orthogonal(gaussian_matrix(6, 2, eng));
    Matrix si = Eigen::kroneckerProduct(x.transpose(), x).eval() * vec_perm(2, 6);
    CHECK((si - si.transpose()).norm() <= 1e-13);
    Matrix ref =
        Eigen::kroneckerProduct(Matrix::Identity(2, 2), (x * x.transpose()).eval())
            .eval();
    CHECK((si * si - ref).norm() <= 1e-13);
  }
}
