#include "lfgs/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lfgs/rng.hpp"

namespace lfgs {

namespace {

// Tangent assembly with a fixed, precomputed complement (hot path of the
// shooting iteration; skips validation).
TangentVector make_tangent(const StiefelPoint& base, const Matrix& complement,
                           const Matrix& omega, const Matrix& k) {
  return TangentVector{base, omega, k, complement,
                       base.mat * omega + complement * k};
}

struct ShootingParam {
  Index n, p;
  Index q;  // number of unknowns

  explicit ShootingParam(Index n_, Index p_)
      : n(n_), p(p_), q(p_ * (p_ - 1) / 2 + (n_ - p_) * p_) {}

  void unpack(const Vector& theta, Matrix& omega, Matrix& k) const {
    omega.setZero(p, p);
    Index idx = 0;
    for (Index j = 1; j < p; ++j)
      for (Index i = 0; i < j; ++i) {
        omega(i, j) = theta(idx);
        omega(j, i) = -theta(idx);
        ++idx;
      }
    k.resize(n - p, p);
    for (Index c = 0; c < p; ++c)
      for (Index r = 0; r < n - p; ++r) k(r, c) = theta(idx++);
  }

  Vector pack(const Matrix& omega, const Matrix& k) const {
    Vector theta(q);
    Index idx = 0;
    for (Index j = 1; j < p; ++j)
      for (Index i = 0; i < j; ++i) theta(idx++) = omega(i, j);
    for (Index c = 0; c < p; ++c)
      for (Index r = 0; r < n - p; ++r) theta(idx++) = k(r, c);
    return theta;
  }
};

// Midpoint subproblems span two segments, so distances up to delta_g are
// legitimate and the default chordal gap_guard (a proxy for d <= delta_g / 2)
// would reject them. The guard that matters for a midpoint is the Riemannian
// one: the recovered tangent length is checked against delta_g after
// shooting, with shooting itself acting as the distance oracle.
ShootingOptions midpoint_options(const ShootingOptions& opts) {
  ShootingOptions relaxed = opts;
  relaxed.gap_guard = std::numeric_limits<double>::infinity();
  return relaxed;
}

}  // namespace

ShootingResult log_map_shooting(const StiefelPoint& x, const StiefelPoint& y,
                                const ShootingOptions& opts) {
  if (x.n() != y.n() || x.p() != y.p())
    throw std::invalid_argument("log_map_shooting: dimension mismatch");
  const Index n = x.n(), p = x.p();
  const ShootingParam par(n, p);
  const Matrix complement = orth_complement(x.mat);

  auto zero_tangent = [&] {
    return make_tangent(x, complement, Matrix::Zero(p, p),
                        Matrix::Zero(n - p, p));
  };

  const double gap = (x.mat - y.mat).norm();
  if (gap > opts.gap_guard) {
    ShootingResult res{zero_tangent(), gap, 0, ShootingStatus::TooFarApart};
    return res;
  }

  auto residual = [&](const Vector& theta) -> Vector {
    Matrix omega, k;
    par.unpack(theta, omega, k);
    StiefelPoint yt = exp_map(make_tangent(x, complement, omega, k), 1.0);
    Matrix diff = yt.mat - y.mat;
    return Eigen::Map<const Vector>(diff.data(), diff.size());
  };

  // First-order initial guess: blocks of Y - X.
  Matrix d0 = y.mat - x.mat;
  Matrix w0 = x.mat.transpose() * d0;
  Matrix omega0 = 0.5 * (w0 - w0.transpose());
  Matrix k0 = complement.transpose() * d0;
  Vector theta = par.pack(omega0, k0);

  Vector r = residual(theta);
  double rnorm = r.norm();
  int iter = 0;
  int stall = 0;
  bool converged = rnorm <= opts.tol;

  while (!converged && iter < opts.max_iter) {
    ++iter;
    Matrix jac(r.size(), par.q);
    for (Index j = 0; j < par.q; ++j) {
      Vector tp = theta;
      tp(j) += opts.fd_step;
      jac.col(j) = (residual(tp) - r) / opts.fd_step;
    }
    Vector step = jac.colPivHouseholderQr().solve(-r);

    double alpha = 1.0;
    Vector r_new;
    double rnorm_new = rnorm;
    bool improved = false;
    for (int h = 0; h < 20; ++h) {
      r_new = residual(theta + alpha * step);
      rnorm_new = r_new.norm();
      if (rnorm_new < rnorm) {
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;

    if (rnorm_new > 0.999 * rnorm) {
      if (++stall >= 3) {
        theta += alpha * step;
        r = r_new;
        rnorm = rnorm_new;
        break;
      }
    } else {
      stall = 0;
    }
    theta += alpha * step;
    r = r_new;
    rnorm = rnorm_new;
    converged = rnorm <= opts.tol;
  }

  Matrix omega, k;
  par.unpack(theta, omega, k);
  TangentVector xi = make_tangent(x, complement, omega, k);

  ShootingStatus status = ShootingStatus::NotConverged;
  if (converged) {
    status = xi.canonical_norm() <= opts.minimal_norm_cap
                 ? ShootingStatus::Converged
                 : ShootingStatus::NonMinimal;
  }
  return ShootingResult{std::move(xi), rnorm, iter, status};
}

double riemannian_distance(const StiefelPoint& x, const StiefelPoint& y,
                           const ShootingOptions& opts) {
  ShootingResult res = log_map_shooting(x, y, opts);
  switch (res.status) {
    case ShootingStatus::Converged:
      return res.xi.canonical_norm();
    case ShootingStatus::TooFarApart:
      throw TooFarApartError("riemannian_distance: chordal gap " +
                             std::to_string(res.residual) +
                             " exceeds shooting guard");
    case ShootingStatus::NonMinimal:
      throw NotConvergedError(
          "riemannian_distance: shooting returned a non-minimal tangent");
    default:
      throw NotConvergedError("riemannian_distance: shooting stagnated at "
                              "residual " +
                              std::to_string(res.residual));
  }
}

StiefelPoint geodesic_midpoint(const StiefelPoint& a, const StiefelPoint& b,
                               const ShootingOptions& opts) {
  ShootingResult res = log_map_shooting(a, b, midpoint_options(opts));
  if (res.status == ShootingStatus::TooFarApart)
    throw TooFarApartError("geodesic_midpoint: endpoints exceed the guard");
  if (res.status == ShootingStatus::NonMinimal)
    throw IllPosedError("geodesic_midpoint: distance exceeds delta_g");
  if (!res.converged())
    throw NotConvergedError("geodesic_midpoint: shooting failed, residual " +
                            std::to_string(res.residual));
  if (res.xi.canonical_norm() > kDeltaG)
    throw IllPosedError("geodesic_midpoint: distance exceeds delta_g");
  return exp_map(res.xi, 0.5);
}

double max_chordal_gap(const PiecewisePath& path) {
  double g = 0.0;
  for (int i = 0; i + 1 < path.m(); ++i)
    g = std::max(g, spectral_norm(path.points[i].mat - path.points[i + 1].mat));
  return g;
}

double path_err(const PiecewisePath& path, const PiecewisePath& reference) {
  double s = 0.0;
  for (int i = 0; i < path.m(); ++i)
    s += (path.points[i].mat - reference.points[i].mat).squaredNorm();
  return std::sqrt(s);
}

PathLength path_length(const PiecewisePath& path, const ShootingOptions& opts) {
  PathLength out;
  for (int i = 0; i + 1 < path.m(); ++i) {
    const double d =
        riemannian_distance(path.points[i], path.points[i + 1], opts);
    out.length += d;
    out.f_value += d * d;
  }
  return out;
}

PiecewisePath leapfrog_sweep(const PiecewisePath& path,
                             const ShootingOptions& opts) {
  if (path.m() < 3)
    throw std::invalid_argument("leapfrog_sweep: need at least 3 points");
  PiecewisePath out = path;
  for (int i = 1; i + 1 < out.m(); ++i) {
    try {
      out.points[i] = geodesic_midpoint(out.points[i - 1], out.points[i + 1], opts);
    } catch (const NumericalError& e) {
      throw IllPosedError("leapfrog_sweep: midpoint subproblem " +
                              std::to_string(i) + " failed: " + e.what(),
                          i);
    }
  }
  return out;
}

std::pair<PiecewisePath, LeapfrogTrace> leapfrog_run(
    const PiecewisePath& path0, const LeapfrogOptions& opts,
    const PiecewisePath* reference) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PiecewisePath path = path0;
  LeapfrogTrace trace;

  auto record = [&](int sweep, double prev_err) {
    SweepRecord rec;
    rec.sweep = sweep;
    if (opts.record_lengths) {
      // segments of a transient path may exceed the endpoint-log guard
      PathLength pl = path_length(path, midpoint_options(opts.shoot));
      rec.length = pl.length;
      rec.f_value = pl.f_value;
    } else {
      rec.length = rec.f_value = nan;
    }
    rec.max_gap = max_chordal_gap(path);
    rec.err = reference ? path_err(path, *reference) : nan;
    rec.mu = (reference && sweep > 0 && prev_err > opts.rate_floor)
                 ? rec.err / prev_err
                 : nan;
    trace.records.push_back(rec);
  };

  record(0, nan);
  trace.termination = LeapfrogTermination::MaxIters;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    PiecewisePath next;
    try {
      next = leapfrog_sweep(path, opts.shoot);
    } catch (const IllPosedError& e) {
      trace.termination = LeapfrogTermination::IllPosed;
      trace.failed_sweep = sweep;
      return {std::move(path), std::move(trace)};
    }
    double movement = 0.0;
    for (int i = 0; i < path.m(); ++i)
      movement = std::max(
          movement, (next.points[i].mat - path.points[i].mat).norm());
    const double prev_err = trace.records.back().err;
    path = std::move(next);
    record(sweep, prev_err);
    if (movement <= opts.stop_tol) {
      trace.termination = LeapfrogTermination::Converged;
      break;
    }
  }
  return {std::move(path), std::move(trace)};
}

PiecewisePath path_chord_project(const StiefelPoint& x, const StiefelPoint& y,
                                 int m, std::uint64_t seed,
                                 std::uint64_t stream) {
  if (m < 3) throw std::invalid_argument("path_chord_project: m must be >= 3");
  auto eng = make_engine(seed, stream);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> ts(m - 2);
  for (double& t : ts) t = u(eng);
  std::sort(ts.begin(), ts.end());

  PiecewisePath path;
  path.points.reserve(m);
  path.points.push_back(x);
  for (double t : ts)
    path.points.push_back(
        StiefelPoint{polar_orthogonal((1.0 - t) * x.mat + t * y.mat)});
  path.points.push_back(y);
  return path;
}

PiecewisePath path_geodesic_sample(const TangentVector& xi, int m) {
  if (m < 3)
    throw std::invalid_argument("path_geodesic_sample: m must be >= 3");
  PiecewisePath path;
  path.points.reserve(m);
  path.points.push_back(xi.base);
  for (int i = 1; i < m; ++i)
    path.points.push_back(exp_map(xi, static_cast<double>(i) / (m - 1)));
  return path;
}

PiecewisePath path_perturbed_geodesic(const TangentVector& xi, int m,
                                      double sigma, std::uint64_t seed,
                                      std::uint64_t stream) {
  PiecewisePath path = path_geodesic_sample(xi, m);
  for (int i = 1; i + 1 < m; ++i) {
    TangentVector noise = random_tangent(path.points[i], sigma, seed,
                                         stream * 1000003ULL + i);
    path.points[i] =
        StiefelPoint{polar_orthogonal(path.points[i].mat + noise.ambient)};
  }
  return path;
}

}  // namespace lfgs
