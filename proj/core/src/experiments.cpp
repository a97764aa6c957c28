#include "lfgs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <thread>

namespace lfgs {

int max_threads() {
  if (const char* env = std::getenv("LFGS_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

Problem gen_problem(const ProblemSpec& spec) {
  if (spec.target_length <= 0)
    throw std::invalid_argument("gen_problem: target_length must be positive");
  if (spec.m < 3) throw std::invalid_argument("gen_problem: m must be >= 3");
  Matrix x0 = Matrix::Zero(spec.n, spec.p);
  x0.topRows(spec.p) = Matrix::Identity(spec.p, spec.p);
  Problem prob;
  prob.x = make_point(x0);
  prob.xi_star = random_tangent(prob.x, spec.target_length, spec.seed, 0);
  prob.y = exp_map(prob.xi_star, 1.0);
  prob.reference = path_geodesic_sample(prob.xi_star, spec.m);
  return prob;
}

PiecewisePath make_initial_path(const Problem& prob, const ProblemSpec& spec,
                                std::uint64_t stream) {
  switch (spec.init) {
    case InitMode::ChordProject:
      return path_chord_project(prob.x, prob.y, spec.m, spec.seed, stream + 1);
    case InitMode::GeodesicSample:
      return path_geodesic_sample(prob.xi_star, spec.m);
    case InitMode::PerturbedGeodesic:
      return path_perturbed_geodesic(prob.xi_star, spec.m, spec.init_sigma,
                                     spec.seed, stream + 1);
  }
  throw std::invalid_argument("make_initial_path: bad init mode");
}

std::map<int, LeapfrogTrace> run_convergence(const ProblemSpec& spec,
                                             const std::vector<int>& m_list) {
  std::map<int, LeapfrogTrace> out;
  for (int m : m_list) {
    ProblemSpec s = spec;
    s.m = m;
    Problem prob = gen_problem(s);
    PiecewisePath path0 = make_initial_path(prob, s);
    LeapfrogOptions opts;
    opts.max_sweeps = s.sweeps;
    opts.stop_tol = s.stop_tol;
    auto [path, trace] = leapfrog_run(path0, opts, &prob.reference);
    out.emplace(m, std::move(trace));
  }
  return out;
}

namespace {

struct TrialResult {
  bool ok = false;
  double mu0 = std::numeric_limits<double>::quiet_NaN();
  double max_mu = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

std::vector<RateSummary> run_rate_table(const ProblemSpec& base, int trials,
                                        int iters,
                                        const std::vector<int>& m_list) {
  if (trials < 1) throw std::invalid_argument("run_rate_table: trials >= 1");
  std::vector<RateSummary> out;
  for (int m : m_list) {
    ProblemSpec spec = base;
    spec.m = m;
    Problem prob = gen_problem(spec);
    PiecewisePath reference = prob.reference;

    std::vector<TrialResult> results(trials);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= trials) return;
        PiecewisePath path0 = path_chord_project(
            prob.x, prob.y, m, spec.seed, static_cast<std::uint64_t>(t) + 1);
        LeapfrogOptions opts;
        opts.max_sweeps = iters;
        opts.stop_tol = spec.stop_tol;
        opts.record_lengths = false;
        auto [path, trace] = leapfrog_run(path0, opts, &reference);
        if (trace.termination == LeapfrogTermination::IllPosed) continue;
        TrialResult res;
        res.ok = true;
        double max_mu = std::numeric_limits<double>::quiet_NaN();
        for (const auto& rec : trace.records) {
          if (std::isnan(rec.mu)) continue;
          if (rec.sweep == 1) res.mu0 = rec.mu;
          if (std::isnan(max_mu) || rec.mu > max_mu) max_mu = rec.mu;
        }
        res.max_mu = max_mu;
        results[t] = res;
      }
    };
    const int nthreads = std::min(max_threads(), trials);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    RateSummary sum;
    sum.m = m;
    std::vector<double> per_trial_max;
    for (const auto& res : results) {
      if (!res.ok || std::isnan(res.max_mu)) {
        ++sum.trials_failed;
        continue;
      }
      ++sum.trials_ok;
      if (!std::isnan(res.mu0)) sum.max_mu0 = std::max(sum.max_mu0, res.mu0);
      sum.max_mu_all = std::max(sum.max_mu_all, res.max_mu);
      per_trial_max.push_back(res.max_mu);
    }
    if (!per_trial_max.empty()) {
      std::sort(per_trial_max.begin(), per_trial_max.end());
      const size_t nsz = per_trial_max.size();
      sum.median_max_mu = (nsz % 2) ? per_trial_max[nsz / 2]
                                    : 0.5 * (per_trial_max[nsz / 2 - 1] +
                                             per_trial_max[nsz / 2]);
    }
    out.push_back(sum);
  }
  return out;
}

namespace {

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  // least-squares slope of log(y) against log(x), skipping nonpositive values
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0 || ys[i] <= 0) continue;
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

}  // namespace

SpectralStudy run_spectral_study(Index n, Index p, int m,
                                 const std::vector<double>& deltas,
                                 bool at_limit, std::uint64_t seed) {
  Matrix x0 = Matrix::Zero(n, p);
  x0.topRows(p) = Matrix::Identity(p, p);
  StiefelPoint x = make_point(x0);
  TangentVector direction = random_tangent(x, 1.0, seed, 0);

  SpectralStudy study;
  std::vector<double> ds, dl, dv, de;
  for (size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    TangentVector xi = tangent_from_blocks(x, delta * (m - 1) * direction.omega,
                                           delta * (m - 1) * direction.k);
    PiecewisePath path =
        at_limit ? path_geodesic_sample(xi, m)
                 : path_perturbed_geodesic(xi, m, 0.1 * delta, seed, i + 1);
    auto [a, e, rep] = split_A_E(path);
    ds.push_back(rep.delta);
    dl.push_back(std::abs(rep.lambda_min_Gprime - rep.lambda_min_A));
    dv.push_back(std::abs(rep.vmin_E_vmin));
    de.push_back(rep.norm_E_actual);
    study.rows.push_back(rep);
  }
  study.slope_lambda = loglog_slope(ds, dl);
  study.slope_vev = loglog_slope(ds, dv);
  study.slope_norm_e = loglog_slope(ds, de);
  return study;
}

namespace {

std::ofstream open_csv(const std::string& filename) {
  std::ofstream f(filename);
  if (!f) throw std::runtime_error("cannot open " + filename);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  f << "# generated " << buf << "\n";
  f << std::setprecision(17);
  return f;
}

}  // namespace

void write_trace_csv(const std::string& filename, const LeapfrogTrace& trace) {
  auto f = open_csv(filename);
  f << "sweep,length,F,err,max_gap,mu\n";
  // the sweep-0 snapshot stays in the in-memory trace but is not a sweep,
  // so the file holds exactly one row per executed sweep
  for (const auto& rec : trace.records) {
    if (rec.sweep == 0) continue;
    f << rec.sweep << ',' << rec.length << ',' << rec.f_value << ',' << rec.err
      << ',' << rec.max_gap << ',' << rec.mu << '\n';
  }
}

void write_table1_csv(const std::string& filename,
                      const std::vector<RateSummary>& rows) {
  auto f = open_csv(filename);
  f << "m,trials_ok,max_mu0,max_mu_all,median_max_mu\n";
  for (const auto& r : rows)
    f << r.m << ',' << r.trials_ok << ',' << r.max_mu0 << ',' << r.max_mu_all
      << ',' << r.median_max_mu << '\n';
}

void write_spectral_csv(const std::string& filename,
                        const SpectralStudy& study) {
  auto f = open_csv(filename);
  f << "m,n,p,delta,lambda_min_A,lambda_min_Gprime,normE,boundE,rho_bgs,vEv,"
       "threshold\n";
  for (const auto& r : study.rows)
    f << r.m << ',' << r.n << ',' << r.p << ',' << r.delta << ','
      << r.lambda_min_A << ',' << r.lambda_min_Gprime << ',' << r.norm_E_actual
      << ',' << r.norm_E_bound << ',' << r.rho_bgs << ',' << r.vmin_E_vmin
      << ',' << r.threshold_delta << '\n';
  f << "# slope_lambda=" << study.slope_lambda
    << " slope_vEv=" << study.slope_vev
    << " slope_normE=" << study.slope_norm_e << '\n';
}

}  // namespace lfgs
