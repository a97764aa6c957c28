// Command-line front end: endpoint geodesics, leapfrog runs, and the
// convergence-rate / spectral experiment suites with CSV output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfgs/experiments.hpp"
#include "lfgs/matrix_io.hpp"

namespace {

using namespace lfgs;

// Accepts "0.6" or "0.95pi".
double parse_length(const std::string& text) {
  std::string body = text;
  double factor = 1.0;
  if (body.size() > 2 && body.substr(body.size() - 2) == "pi") {
    factor = std::numbers::pi;
    body = body.substr(0, body.size() - 2);
  }
  size_t used = 0;
  const double value = std::stod(body, &used);
  if (used != body.size())
    throw CLI::ValidationError("--length", "cannot parse '" + text + "'");
  return value * factor;
}

std::vector<int> parse_m_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const int m = std::stoi(tok);
    if (m < 3) throw CLI::ValidationError("--m", "each m must be >= 3");
    out.push_back(m);
  }
  if (out.empty()) throw CLI::ValidationError("--m", "empty list");
  return out;
}

void apply_init(ProblemSpec& spec, const std::string& text) {
  if (text == "chord") {
    spec.init = InitMode::ChordProject;
  } else if (text == "geodesic") {
    spec.init = InitMode::GeodesicSample;
  } else if (text.rfind("perturbed:", 0) == 0) {
    spec.init = InitMode::PerturbedGeodesic;
    spec.init_sigma = std::stod(text.substr(10));
  } else {
    throw CLI::ValidationError(
        "--init", "expected chord, geodesic, or perturbed:<sigma>");
  }
}

int cmd_log(const ProblemSpec& spec, const std::string& out) {
  Problem prob = gen_problem(spec);
  ShootingResult res = log_map_shooting(prob.x, prob.y);
  const char* status = "converged";
  switch (res.status) {
    case ShootingStatus::Converged: break;
    case ShootingStatus::NotConverged: status = "not-converged"; break;
    case ShootingStatus::NonMinimal: status = "non-minimal"; break;
    case ShootingStatus::TooFarApart: status = "too-far-apart"; break;
  }
  std::printf("status=%s iterations=%d residual=%.3e\n", status,
              res.iterations, res.residual);
  if (res.status == ShootingStatus::Converged ||
      res.status == ShootingStatus::NonMinimal) {
    std::printf("distance=%.17g target=%.17g recovery_error=%.3e\n",
                res.xi.canonical_norm(), spec.target_length,
                (res.xi.ambient - prob.xi_star.ambient).norm());
    if (!out.empty()) save_matrix(out, res.xi.ambient);
  }
  return res.converged() ? 0 : 1;
}

int cmd_leapfrog(const ProblemSpec& spec, const std::string& out) {
  Problem prob = gen_problem(spec);
  PiecewisePath path0 = make_initial_path(prob, spec);
  LeapfrogOptions opts;
  opts.max_sweeps = spec.sweeps;
  opts.stop_tol = spec.stop_tol;
  auto [path, trace] = leapfrog_run(path0, opts, &prob.reference);
  if (!out.empty()) write_trace_csv(out, trace);
  const auto& last = trace.records.back();
  std::printf("sweeps=%d length=%.12f F=%.12e err=%.3e\n", last.sweep,
              last.length, last.f_value, last.err);
  if (trace.termination == LeapfrogTermination::IllPosed) {
    std::fprintf(stderr, "leapfrog: midpoint subproblem ill-posed at sweep %d\n",
                 trace.failed_sweep);
    return 1;
  }
  return 0;
}

int cmd_table1(const ProblemSpec& spec, int trials, int iters,
               const std::string& m_text, const std::string& out) {
  const std::vector<int> m_list = parse_m_list(m_text);
  std::vector<RateSummary> rows = run_rate_table(spec, trials, iters, m_list);
  if (!out.empty()) write_table1_csv(out, rows);
  std::printf("%6s %9s %10s %12s %14s\n", "m", "trials_ok", "max_mu0",
              "max_mu_all", "median_max_mu");
  for (const auto& r : rows)
    std::printf("%6d %9d %10.4f %12.4f %14.4f\n", r.m, r.trials_ok, r.max_mu0,
                r.max_mu_all, r.median_max_mu);
  for (const auto& r : rows)
    if (r.trials_ok == 0) return 1;
  return 0;
}

int cmd_spectral(const ProblemSpec& spec, bool at_limit,
                 const std::string& out) {
  // two decades of gaps, log-spaced, descending
  std::vector<double> deltas;
  for (int i = 0; i < 13; ++i)
    deltas.push_back(std::pow(10.0, -1.0 - 2.0 * i / 12.0));
  SpectralStudy study =
      run_spectral_study(spec.n, spec.p, spec.m, deltas, at_limit, spec.seed);
  if (!out.empty()) write_spectral_csv(out, study);
  std::printf("%10s %14s %14s %10s %10s %10s\n", "delta", "lmin_A", "lmin_G'",
              "|E|", "rho_bgs", "vEv");
  for (const auto& r : study.rows)
    std::printf("%10.4e %14.9f %14.9f %10.4e %10.4f %10.3e\n", r.delta,
                r.lambda_min_A, r.lambda_min_Gprime, r.norm_E_actual,
                r.rho_bgs, r.vmin_E_vmin);
  std::printf("slope_lambda=%.3f slope_vEv=%.3f slope_normE=%.3f\n",
              study.slope_lambda, study.slope_vev, study.slope_norm_e);
  return 0;
}

int cmd_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%-42s %s\n", name, ok ? "ok" : "FAIL");
    if (!ok) ++failures;
  };

  // metric identity g = |xi|_F^2 - 1/2 |x' xi|_F^2
  {
    bool ok = true;
    for (int s = 0; s < 20 && ok; ++s) {
      StiefelPoint x = random_point(8, 3, 100 + s);
      TangentVector xi = random_tangent(x, 1.0, 200 + s);
      const double lhs = canonical_inner(xi, xi);
      const double rhs = xi.ambient.squaredNorm() -
                         0.5 * (x.mat.transpose() * xi.ambient).squaredNorm();
      ok = std::abs(lhs - rhs) <= 1e-12;
    }
    check("canonical metric identity", ok);
  }
  // exp/log roundtrip
  {
    bool ok = true;
    for (int s = 0; s < 5 && ok; ++s) {
      StiefelPoint x = random_point(10, 3, 300 + s);
      TangentVector xi = random_tangent(x, 0.8, 400 + s);
      ShootingResult res = log_map_shooting(x, exp_map(xi, 1.0));
      ok = res.converged() && (res.xi.ambient - xi.ambient).norm() <= 1e-8;
    }
    check("exp/log roundtrip", ok);
  }
  // leapfrog descent on a short random instance
  {
    ProblemSpec spec;
    spec.n = 8;
    spec.p = 2;
    spec.m = 5;
    spec.target_length = 0.5 * std::numbers::pi;
    spec.seed = 3;
    spec.sweeps = 10;
    Problem prob = gen_problem(spec);
    PiecewisePath path0 = make_initial_path(prob, spec);
    LeapfrogOptions opts;
    opts.max_sweeps = 10;
    auto [path, trace] = leapfrog_run(path0, opts, &prob.reference);
    bool ok = trace.termination != LeapfrogTermination::IllPosed;
    for (size_t k = 1; k < trace.records.size() && ok; ++k)
      ok = trace.records[k].f_value <=
           trace.records[k - 1].f_value + 1e-12;
    check("leapfrog monotone descent", ok);
  }
  // block diagonalization at coincident points
  {
    StiefelPoint z = random_point(7, 3, 11);
    Matrix q = build_Q_i(z);
    Matrix dd = q.transpose() * hessian_D_exact(z, z) * q;
    Matrix ll = q.transpose() * hessian_L_exact(z, z) * q;
    const Index np = 21, skew = 3, kdim = 12;
    Matrix dref = Matrix::Zero(np, np), lref = Matrix::Zero(np, np);
    for (Index i = 0; i < np; ++i) dref(i, i) = i < skew ? 1 : 2;
    for (Index i = 0; i < np; ++i)
      lref(i, i) = i < skew ? -1 : (i < skew + kdim ? -2 : 0);
    check("hessian block diagonalization",
          (dd - dref).norm() <= 1e-10 && (ll - lref).norm() <= 1e-10);
  }
  // tridiagonal eigenvalue formula
  {
    bool ok = true;
    for (int m : {4, 7, 12, 20}) {
      const std::vector<double> spec_a = lambda_spectrum_A(m, 6, 2);
      const double lo = *std::min_element(spec_a.begin(), spec_a.end());
      ok = ok && std::abs(lo - lambda_min_A(m)) <= 1e-12;
    }
    check("lambda_min(A) closed form", ok);
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stiefel-manifold geodesics via the leapfrog algorithm"};
  app.require_subcommand(1);

  ProblemSpec spec;
  std::string length_text = "0.95pi";
  std::string out, init_text = "chord", m_text = "4,6,8,10";
  int trials = 100, iters = 50;
  bool at_limit = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", spec.n, "ambient dimension");
    sub->add_option("--p", spec.p, "number of columns");
    sub->add_option("--length", length_text,
                    "endpoint distance, <float> or <float>pi");
    sub->add_option("--seed", spec.seed, "RNG seed");
    sub->add_option("--out", out, "output file");
  };

  CLI::App* log_cmd =
      app.add_subcommand("log", "Riemannian logarithm by single shooting");
  add_common(log_cmd);

  CLI::App* lf_cmd = app.add_subcommand("leapfrog", "leapfrog geodesic run");
  add_common(lf_cmd);
  lf_cmd->add_option("--m", spec.m, "number of path points");
  lf_cmd->add_option("--sweeps", spec.sweeps, "maximum sweeps");
  lf_cmd->add_option("--stop-tol", spec.stop_tol, "movement stopping tolerance");
  lf_cmd->add_option("--init", init_text,
                     "chord | geodesic | perturbed:<sigma>");

  CLI::App* t1_cmd =
      app.add_subcommand("table1", "error-reduction-rate statistics");
  add_common(t1_cmd);
  t1_cmd->add_option("--m", m_text, "comma-separated list of m values");
  t1_cmd->add_option("--trials", trials, "random initializations per m");
  t1_cmd->add_option("--iters", iters, "leapfrog iterations per trial");
  t1_cmd->add_option("--stop-tol", spec.stop_tol, "movement stopping tolerance");

  CLI::App* sp_cmd =
      app.add_subcommand("spectral", "eigenvalue perturbation study");
  add_common(sp_cmd);
  sp_cmd->add_option("--m", spec.m, "number of path points");
  sp_cmd->add_flag("--at-limit", at_limit,
                   "evaluate at the limiting geodesic (no perturbation)");

  CLI::App* st_cmd = app.add_subcommand("selftest", "run the invariant suite");
  (void)st_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    spec.target_length = parse_length(length_text);
    if (log_cmd->parsed()) return cmd_log(spec, out);
    if (lf_cmd->parsed()) {
      apply_init(spec, init_text);
      return cmd_leapfrog(spec, out);
    }
    if (t1_cmd->parsed()) return cmd_table1(spec, trials, iters, m_text, out);
    if (sp_cmd->parsed()) return cmd_spectral(spec, at_limit, out);
    return cmd_selftest();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
