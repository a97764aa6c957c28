#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "lfgs/stiefel.hpp"

namespace lfgs {

/// Safe-separation constant: below this Riemannian distance the minimizing
/// geodesic (and hence the two-point center of mass) is unique.
constexpr double kDeltaG = 0.89 * std::numbers::pi;

struct ShootingOptions {
  double tol = 1e-10;
  int max_iter = 100;
  // Chordal proxy for d <= delta_g / 2; shooting refuses larger gaps.
  double gap_guard = 1.4;
  double fd_step = 1e-7;
  // A recovered tangent longer than this is flagged non-minimal.
  double minimal_norm_cap = 0.95 * std::numbers::pi;
};

enum class ShootingStatus { Converged, NotConverged, NonMinimal, TooFarApart };

struct ShootingResult {
  TangentVector xi;
  double residual = 0.0;
  int iterations = 0;
  ShootingStatus status = ShootingStatus::NotConverged;

  bool converged() const { return status == ShootingStatus::Converged; }
};

/// Riemannian logarithm by single shooting: Gauss-Newton on the unknowns
/// (strict upper triangle of Omega, all of K) with residual
/// Exp_x(xi) - y and a forward-difference Jacobian.
ShootingResult log_map_shooting(const StiefelPoint& x, const StiefelPoint& y,
                                const ShootingOptions& opts = {});

/// Canonical norm of the logarithm. Throws TooFarApartError /
/// NotConvergedError when shooting fails.
double riemannian_distance(const StiefelPoint& x, const StiefelPoint& y,
                           const ShootingOptions& opts = {});

/// Midpoint of the minimizing geodesic, i.e. the two-point Riemannian center
/// of mass. Requires d(a,b) <= kDeltaG.
StiefelPoint geodesic_midpoint(const StiefelPoint& a, const StiefelPoint& b,
                               const ShootingOptions& opts = {});

/// The leapfrog state: an m-tuple of points with fixed endpoints.
struct PiecewisePath {
  std::vector<StiefelPoint> points;

  int m() const { return static_cast<int>(points.size()); }
  Index n() const { return points.front().n(); }
  Index p() const { return points.front().p(); }
};

/// Largest ||X_i - X_{i+1}||_2 over consecutive pairs.
double max_chordal_gap(const PiecewisePath& path);

/// Frobenius norm of the stacked difference against a reference tuple.
double path_err(const PiecewisePath& path, const PiecewisePath& reference);

struct PathLength {
  double length = 0.0;  // sum of segment distances
  double f_value = 0.0;  // sum of squared segment distances
};
PathLength path_length(const PiecewisePath& path,
                       const ShootingOptions& opts = {});

struct SweepRecord {
  int sweep = 0;
  double length = 0.0;
  double f_value = 0.0;
  double err = 0.0;      // NaN when no reference is given
  double max_gap = 0.0;  // chordal
  double mu = 0.0;       // err reduction rate, NaN when not defined
};

enum class LeapfrogTermination { Converged, MaxIters, IllPosed };

struct LeapfrogTrace {
  std::vector<SweepRecord> records;
  LeapfrogTermination termination = LeapfrogTermination::MaxIters;
  int failed_sweep = -1;  // sweep index on IllPosed
};

/// One Gauss-Seidel sweep: for i = 1..m-2, X_i <- midpoint(X_{i-1}, X_{i+1})
/// using the already-updated left neighbor. Endpoints untouched.
/// Throws IllPosedError when a midpoint subproblem violates the kDeltaG guard.
PiecewisePath leapfrog_sweep(const PiecewisePath& path,
                             const ShootingOptions& opts = {});

struct LeapfrogOptions {
  int max_sweeps = 300;
  // Stop when the max point movement in a sweep falls below this.
  double stop_tol = 1e-12;
  bool record_lengths = true;
  ShootingOptions shoot;
  // err floor below which reduction rates are no longer recorded
  double rate_floor = 1e-12;
};

std::pair<PiecewisePath, LeapfrogTrace> leapfrog_run(
    const PiecewisePath& path0, const LeapfrogOptions& opts = {},
    const PiecewisePath* reference = nullptr);

/// m-2 interior points polar-projected from sorted random parameters of the
/// chord between x and y.
PiecewisePath path_chord_project(const StiefelPoint& x, const StiefelPoint& y,
                                 int m, std::uint64_t seed,
                                 std::uint64_t stream = 0);

/// Equidistant samples exp(xi.base, xi, i/(m-1)).
PiecewisePath path_geodesic_sample(const TangentVector& xi, int m);

/// Geodesic samples with tangent noise of canonical norm sigma at each
/// interior point, re-projected to the manifold.
PiecewisePath path_perturbed_geodesic(const TangentVector& xi, int m,
                                      double sigma, std::uint64_t seed,
                                      std::uint64_t stream = 0);

}  // namespace lfgs
