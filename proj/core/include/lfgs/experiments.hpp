#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lfgs/hessian.hpp"

namespace lfgs {

enum class InitMode { ChordProject, GeodesicSample, PerturbedGeodesic };

struct ProblemSpec {
  Index n = 12;
  Index p = 3;
  int m = 10;
  double target_length = 0.95 * std::numbers::pi;
  std::uint64_t seed = 0;
  InitMode init = InitMode::ChordProject;
  double init_sigma = 0.0;  // PerturbedGeodesic only
  int sweeps = 300;
  double stop_tol = 1e-12;
};

struct Problem {
  StiefelPoint x;  // [I_p; 0]
  StiefelPoint y;  // Exp_x(xi_star)
  TangentVector xi_star;
  PiecewisePath reference;  // equidistant geodesic samples
};

Problem gen_problem(const ProblemSpec& spec);

PiecewisePath make_initial_path(const Problem& prob, const ProblemSpec& spec,
                                std::uint64_t stream = 0);

/// Leapfrog convergence series per m (err-k against the reference tuple).
std::map<int, LeapfrogTrace> run_convergence(const ProblemSpec& spec,
                                             const std::vector<int>& m_list);

struct RateSummary {
  int m = 0;
  int trials_ok = 0;
  int trials_failed = 0;
  double max_mu0 = 0.0;
  double max_mu_all = 0.0;
  double median_max_mu = 0.0;
};

/// Error reduction rates mu_k = err-(k+1)/err-k over random chord-projected
/// initializations; rates recorded only while err-k > 1e-12. Trials run in
/// parallel with per-trial derived seeds.
std::vector<RateSummary> run_rate_table(const ProblemSpec& base, int trials,
                                        int iters,
                                        const std::vector<int>& m_list);

struct SpectralStudy {
  std::vector<SpectralReport> rows;
  double slope_lambda = 0.0;  // log-log slope of |lmin(G') - lmin(A)| vs delta
  double slope_vev = 0.0;     // slope of |vmin^T E vmin| vs delta
  double slope_norm_e = 0.0;  // slope of ||E||_2 vs delta
};

/// Eigenvalue-perturbation study over a list of target gaps. When at_limit is
/// true the path is an exact geodesic sampling; otherwise interior points are
/// perturbed with tangent noise sigma = 0.1 * delta.
SpectralStudy run_spectral_study(Index n, Index p, int m,
                                 const std::vector<double>& deltas,
                                 bool at_limit, std::uint64_t seed);

/// Trial parallelism cap: LFGS_THREADS, defaulting to hardware concurrency.
int max_threads();

// CSV emission. Each writer starts with a "# generated ..." timestamp
// comment; everything after it is a deterministic function of the inputs.
void write_trace_csv(const std::string& filename, const LeapfrogTrace& trace);
void write_table1_csv(const std::string& filename,
                      const std::vector<RateSummary>& rows);
void write_spectral_csv(const std::string& filename, const SpectralStudy& study);

}  // namespace lfgs
